//! Small-signal frequency-domain analysis of the loop
//! `H(s) = U·(kp·s + ki)/s² · 1/(τs + 1)`.

use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use super::PiGains;
use crate::error::{Error, Result};

/// Relative tolerance of the crossover bisection.
const CROSSOVER_RTOL: f64 = 1e-6;

/// `H(s)` at an arbitrary complex frequency.
pub fn open_loop_transfer(gains: &PiGains, tau: f64, plant_gain: f64, s: Complex64) -> Complex64 {
    plant_gain * (gains.kp * s + gains.ki) / (s * s) / (tau * s + 1.0)
}

/// Unwrapped phase of `H(jω)` in degrees: −180° from the double integrator,
/// plus the PI zero lead, minus the delay lag.
fn phase_deg(gains: &PiGains, tau: f64, omega: f64) -> f64 {
    -180.0 + (gains.kp * omega).atan2(gains.ki).to_degrees() - (tau * omega).atan().to_degrees()
}

fn magnitude(gains: &PiGains, tau: f64, plant_gain: f64, omega: f64) -> f64 {
    open_loop_transfer(gains, tau, plant_gain, Complex64::new(0.0, omega)).norm()
}

/// `(20·log10|H(jω)|, ∠H(jω))`, phase in degrees, continuous from −180° at ω → 0.
pub fn open_loop_response(gains: &PiGains, tau: f64, plant_gain: f64, omega: f64) -> Result<(f64, f64)> {
    if !(omega > 0.0) {
        return Err(Error::Analysis(format!("frequency {omega} must be > 0")));
    }
    Ok((
        20.0 * magnitude(gains, tau, plant_gain, omega).log10(),
        phase_deg(gains, tau, omega),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseMargin {
    pub phi_m_deg: f64,
    pub omega_c: f64,
}

/// Phase margin `180° + ∠H(jωc)` at the 0 dB crossing found by bisection on
/// `[ki/kp/100, 100/τ]`.
pub fn phase_margin(gains: &PiGains, tau: f64, plant_gain: f64) -> Result<PhaseMargin> {
    let (mut lo, mut hi) = (gains.corner() / 100.0, 100.0 / tau);
    let mag = |w: f64| magnitude(gains, tau, plant_gain, w);
    if !(lo > 0.0 && hi > lo) || !(mag(lo) > 1.0) || !(mag(hi) < 1.0) {
        return Err(Error::Analysis(format!("no 0 dB crossover in [{lo}, {hi}] rad/s")));
    }
    // |H| is strictly decreasing in ω, bisect in log-frequency
    while hi / lo - 1.0 > CROSSOVER_RTOL {
        let mid = (lo * hi).sqrt();
        if mag(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let omega_c = (lo * hi).sqrt();
    Ok(PhaseMargin {
        phi_m_deg: 180.0 + phase_deg(gains, tau, omega_c),
        omega_c,
    })
}

/// Frequency of maximum open-loop phase, by golden-section search on log ω.
pub fn phase_peak(gains: &PiGains, tau: f64) -> f64 {
    let f = |x: f64| phase_deg(gains, tau, x.exp());
    let (mut a, mut b) = ((gains.corner() / 100.0).ln(), (100.0 / tau).ln());
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    while b - a > CROSSOVER_RTOL {
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    ((a + b) / 2.0).exp()
}

/// Steady-state error of the loop tracking a frequency ramp `κ`, `κ/(U·ki)`.
pub fn steady_state_ramp_error(kappa: f64, ki: f64, plant_gain: f64) -> Result<f64> {
    if !(ki > 0.0) || !(plant_gain > 0.0) {
        return Err(Error::config("ramp error needs ki > 0 and plant gain > 0"));
    }
    Ok(kappa / (plant_gain * ki))
}

/// `E(s) = s / (s + Gc(s))` with `Gc(s) = U·(kp·s + ki)/(τs + 1)`.
pub fn frequency_error_response(gains: &PiGains, tau: f64, plant_gain: f64, s: Complex64) -> Complex64 {
    let gc = plant_gain * (gains.kp * s + gains.ki) / (tau * s + 1.0);
    s / (s + gc)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BodePoint {
    pub omega: f64,
    pub mag_db: f64,
    pub phase_deg: f64,
}

/// Log-spaced sweep of the open-loop response.
pub fn bode_sweep(
    gains: &PiGains,
    tau: f64,
    plant_gain: f64,
    omega_min: f64,
    omega_max: f64,
    points: usize,
) -> Result<Vec<BodePoint>> {
    if !(omega_min > 0.0 && omega_max > omega_min) || points < 2 {
        return Err(Error::Analysis(
            "bode sweep needs 0 < omega_min < omega_max and >= 2 points".into(),
        ));
    }
    let (l0, l1) = (omega_min.ln(), omega_max.ln());
    (0..points)
        .map(|i| {
            let omega = (l0 + (l1 - l0) * i as f64 / (points - 1) as f64).exp();
            let (mag_db, phase_deg) = open_loop_response(gains, tau, plant_gain, omega)?;
            Ok(BodePoint {
                omega,
                mag_db,
                phase_deg,
            })
        })
        .collect()
}

/// Writes `omega,mag_db,phase_deg` rows.
pub fn write_bode_csv<W: Write>(mut w: W, points: &[BodePoint]) -> std::io::Result<()> {
    writeln!(w, "omega,mag_db,phase_deg")?;
    for p in points {
        writeln!(w, "{},{},{}", p.omega, p.mag_db, p.phase_deg)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pll::{tune_symmetrical_optimum, TunerInput, SQRT_2_3};
    use proptest::prelude::*;

    const TAU: f64 = 0.00025;

    fn so(alpha: f64) -> PiGains {
        tune_symmetrical_optimum(&TunerInput::new(alpha, TAU)).unwrap().0
    }

    fn margin_law(alpha: f64) -> f64 {
        alpha.atan().to_degrees() - (1.0 / alpha).atan().to_degrees()
    }

    #[test]
    fn unit_gain_at_design_crossover() {
        let (db, _) = open_loop_response(&so(40.0), TAU, SQRT_2_3, 100.0).unwrap();
        assert!(db.abs() < 0.2, "{db}");
    }

    #[test]
    fn phase_matches_complex_argument() {
        let g = so(10.0);
        for w in [0.1, 3.0, 40.0, 400.0, 4000.0, 1e5] {
            let h = open_loop_transfer(&g, TAU, SQRT_2_3, Complex64::new(0.0, w));
            let (_, ph) = open_loop_response(&g, TAU, SQRT_2_3, w).unwrap();
            let diff = (ph - h.arg().to_degrees()).rem_euclid(360.0);
            assert!(
                diff < 1e-9 || 360.0 - diff < 1e-9,
                "w={w}: {ph} vs {}",
                h.arg().to_degrees()
            );
        }
    }

    #[test]
    fn low_frequency_phase_tends_to_minus_180() {
        let (_, ph) = open_loop_response(&so(40.0), TAU, SQRT_2_3, 1e-6).unwrap();
        assert!((ph + 180.0).abs() < 1e-3);
    }

    #[test]
    fn magnitude_slopes() {
        // finite-difference slope in dB/decade
        let g = so(40.0);
        let slope = |w: f64| {
            let (a, _) = open_loop_response(&g, TAU, SQRT_2_3, w).unwrap();
            let (b, _) = open_loop_response(&g, TAU, SQRT_2_3, w * 1.01).unwrap();
            (b - a) / 1.01f64.log10()
        };
        // corners at 2.5 and 4000 rad/s
        assert!((slope(0.01) + 40.0).abs() < 0.1);
        assert!((slope(100.0) + 20.0).abs() < 0.5);
        assert!((slope(1e7) + 40.0).abs() < 0.1);
    }

    #[test]
    fn margin_for_reference_tuning() {
        let pm = phase_margin(&so(40.0), TAU, SQRT_2_3).unwrap();
        assert!((pm.phi_m_deg - 87.138).abs() < 0.01, "{pm:?}");
        assert!((pm.omega_c - 100.0).abs() < 1e-3);
        assert!(pm.phi_m_deg < 90.0);
    }

    #[test]
    fn margin_for_small_alpha() {
        let pm = phase_margin(&so(4.0), TAU, SQRT_2_3).unwrap();
        assert!((pm.phi_m_deg - 61.93).abs() < 0.01, "{pm:?}");
    }

    #[test]
    fn margin_grows_with_alpha() {
        let m = |a| phase_margin(&so(a), TAU, SQRT_2_3).unwrap().phi_m_deg;
        assert!(m(40.0) > m(10.0) && m(10.0) > m(4.0));
    }

    #[test]
    fn no_crossover_is_an_error() {
        // huge gains push the crossover above 100/τ
        let g = PiGains::new(1e9, 1e6);
        assert!(matches!(phase_margin(&g, TAU, 1.0), Err(Error::Analysis(_))));
    }

    #[test]
    fn ramp_error_values() {
        let g = so(40.0);
        let e = steady_state_ramp_error(100.0, g.ki, SQRT_2_3).unwrap();
        assert!((e - 0.4).abs() < 1e-3, "{e}");
        assert!((e - 1.5f64.sqrt() * 100.0 / g.ki).abs() < 1e-15);
        assert_eq!(steady_state_ramp_error(0.0, g.ki, SQRT_2_3).unwrap(), 0.0);
        let half = steady_state_ramp_error(100.0, 2.0 * g.ki, SQRT_2_3).unwrap();
        assert!((half - e / 2.0).abs() < 1e-15);
    }

    #[test]
    fn ramp_error_is_final_value_of_error_response() {
        // lim s→0 s·E(s)·κ/s²
        let g = so(40.0);
        let kappa = 100.0;
        let s = Complex64::new(1e-9, 0.0);
        let fv = (s * frequency_error_response(&g, TAU, SQRT_2_3, s) * kappa / (s * s)).re;
        let closed = steady_state_ramp_error(kappa, g.ki, SQRT_2_3).unwrap();
        assert!((fv - closed).abs() < 1e-6 * closed, "{fv} vs {closed}");
    }

    #[test]
    fn bode_csv_layout() {
        let pts = bode_sweep(&so(40.0), TAU, SQRT_2_3, 1.0, 1e5, 11).unwrap();
        assert_eq!(pts.len(), 11);
        assert!((pts[10].omega - 1e5).abs() < 1e-6);
        let mut buf = Vec::new();
        write_bode_csv(&mut buf, &pts).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("omega,mag_db,phase_deg\n"));
        assert_eq!(text.lines().count(), 12);
    }

    proptest! {
        #[test]
        fn margin_follows_arctan_law(alpha in 2.0f64..200.0) {
            let pm = phase_margin(&so(alpha), TAU, SQRT_2_3).unwrap();
            prop_assert!((pm.phi_m_deg - margin_law(alpha)).abs() < 1e-3);
            prop_assert!((pm.omega_c * alpha * TAU - 1.0).abs() < 1e-5);
        }

        #[test]
        fn phase_peaks_at_crossover(alpha in 2.0f64..200.0) {
            let g = so(alpha);
            let peak = phase_peak(&g, TAU);
            let wc = 1.0 / (alpha * TAU);
            prop_assert!((peak / wc - 1.0).abs() < 1e-3, "peak {} wc {}", peak, wc);
        }
    }
}
