//! Model-free online frequency estimator.
//!
//! Each phase channel drives a second-order band-pass
//! `2ω̃s / (s² + 2ω̃s + ω̃²)` whose output `ν = η2` has unit gain and zero phase at
//! `s = jω̃`. The centre frequency adapts with
//! `dω̃/dt = −γ·sign(η1)·(z − ν)` until the filter sits on the input frequency.
//! The three per-phase estimates are averaged before they are fed forward.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signals::ThreePhaseSample;

/// Euler stability limit on `ω̃·dt`.
pub const MAX_OMEGA_DT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorConfig {
    /// Adaptation gain γ.
    pub gamma: f64,
    /// Initial estimate ω̃(0) [rad/s]; start above the expected frequency.
    pub omega_init: f64,
    /// Lower clamp on ω̃ [rad/s].
    pub omega_floor: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            gamma: 4000.0,
            omega_init: 120.0,
            omega_floor: 1.0,
        }
    }
}

impl EstimatorConfig {
    pub fn new(gamma: f64, omega_init: f64) -> Self {
        Self {
            gamma,
            omega_init,
            ..Self::default()
        }
    }

    pub(crate) fn violations(&self, dt: f64) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            v.push("estimator gamma must be > 0".to_string());
        }
        if !(self.omega_floor > 0.0) {
            v.push("estimator omega_floor must be > 0".to_string());
        }
        if !(self.omega_init > self.omega_floor && self.omega_init.is_finite()) {
            v.push("estimator omega_init must exceed omega_floor".to_string());
        }
        if !(self.omega_init * dt < MAX_OMEGA_DT) {
            v.push(format!(
                "estimator omega_init·dt = {} violates the Euler limit {MAX_OMEGA_DT}",
                self.omega_init * dt
            ));
        }
        v
    }

    pub fn validate(&self, dt: f64) -> Result<()> {
        let v = self.violations(dt);
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(v))
        }
    }
}

/// Filter states and current estimate of one channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorState {
    pub eta1: f64,
    pub eta2: f64,
    pub omega_tilde: f64,
}

/// `sign` with `sign(0) = 0`.
fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl EstimatorState {
    /// Zero filter states at `cfg.omega_init`.
    pub fn new(cfg: &EstimatorConfig) -> Self {
        Self {
            eta1: 0.0,
            eta2: 0.0,
            omega_tilde: cfg.omega_init,
        }
    }

    /// Filter output ν.
    pub fn output(&self) -> f64 {
        self.eta2
    }

    /// One explicit Euler step of filter and adaptation law.
    pub fn step(&self, z: f64, dt: f64, cfg: &EstimatorConfig) -> Result<Self> {
        self.advance(z, dt, Some(cfg))
    }

    /// Euler step with ω̃ frozen; used while the input is invalid.
    pub fn hold_step(&self, z: f64, dt: f64) -> Result<Self> {
        self.advance(z, dt, None)
    }

    fn advance(&self, z: f64, dt: f64, adapt: Option<&EstimatorConfig>) -> Result<Self> {
        if !z.is_finite() {
            return Err(Error::Numerical(format!("estimator input {z} is not finite")));
        }
        let w = self.omega_tilde;
        let d_eta1 = self.eta2;
        let d_eta2 = -w * w * self.eta1 - 2.0 * w * self.eta2 + 2.0 * w * z;
        let omega_tilde = match adapt {
            Some(cfg) => {
                let d_omega = -cfg.gamma * sign(self.eta1) * (z - self.eta2);
                (w + dt * d_omega).max(cfg.omega_floor)
            }
            None => w,
        };
        let next = Self {
            eta1: self.eta1 + dt * d_eta1,
            eta2: self.eta2 + dt * d_eta2,
            omega_tilde,
        };
        if next.eta1.is_finite() && next.eta2.is_finite() && next.omega_tilde.is_finite() {
            Ok(next)
        } else {
            Err(Error::Numerical("estimator state diverged".to_string()))
        }
    }
}

/// Arithmetic mean of the three per-phase estimates.
pub fn average_estimate(wa: f64, wb: f64, wc: f64) -> f64 {
    (wa + wb + wc) / 3.0
}

/// Upper bound on the exponential convergence rate, `γ·Z/(2ω) + δ` [1/s].
pub fn convergence_bound(gamma: f64, amplitude: f64, omega: f64, delta: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::config("convergence bound needs omega > 0"));
    }
    if gamma < 0.0 || amplitude < 0.0 || delta < 0.0 {
        return Err(Error::config(
            "convergence bound needs non-negative gamma, amplitude and delta",
        ));
    }
    Ok(gamma * amplitude / (2.0 * omega) + delta)
}

/// Three identical estimators, one per phase.
#[derive(Debug, Clone)]
pub struct ThreePhaseEstimator {
    cfg: EstimatorConfig,
    channels: [EstimatorState; 3],
}

impl ThreePhaseEstimator {
    pub fn new(cfg: EstimatorConfig) -> Self {
        Self {
            channels: [EstimatorState::new(&cfg); 3],
            cfg,
        }
    }

    pub fn config(&self) -> &EstimatorConfig {
        &self.cfg
    }

    pub fn channels(&self) -> &[EstimatorState; 3] {
        &self.channels
    }

    pub fn estimate(&self) -> f64 {
        let [a, b, c] = self.channels.map(|s| s.omega_tilde);
        average_estimate(a, b, c)
    }

    /// Advances all channels on `s` (normalized). Invalid samples freeze ω̃.
    /// On error no channel is modified.
    pub fn step(&mut self, s: &ThreePhaseSample, dt: f64) -> Result<f64> {
        let z = s.channels();
        let mut next = self.channels;
        for (st, zn) in next.iter_mut().zip(z) {
            *st = if s.valid {
                st.step(zn, dt, &self.cfg)?
            } else {
                st.hold_step(zn, dt)?
            };
        }
        self.channels = next;
        Ok(self.estimate())
    }
}

/// Exponential fit of the estimation-error decay.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    /// Fitted rate [1/s]; positive for a decaying error.
    pub rate: f64,
    /// Number of half-period points used.
    pub points: usize,
}

/// Fits `|ε(t)| ~ exp(−rate·t)` to an estimate trace sampled at `dt` while the
/// true frequency is the constant `omega`.
///
/// The trace is averaged over half periods of `omega`, which removes the
/// double-frequency ripple of the estimate. The first period (initial
/// acquisition) is skipped, and the fit uses the following consecutive blocks
/// whose deviation from the settled value still exceeds `floor_rel·omega`.
/// The settled value is the mean of the last quarter of the blocks. Returns
/// `None` with fewer than two usable blocks.
pub fn fit_decay_rate(omega_tilde: &[f64], dt: f64, omega: f64, floor_rel: f64) -> Option<DecayFit> {
    let per = (std::f64::consts::PI / omega / dt).round() as usize;
    if per == 0 {
        return None;
    }
    let blocks: Vec<(f64, f64)> = omega_tilde
        .chunks_exact(per)
        .enumerate()
        .map(|(j, c)| {
            let t = (j as f64 + 0.5) * per as f64 * dt;
            (t, c.iter().sum::<f64>() / per as f64)
        })
        .collect();
    if blocks.len() < 16 {
        return None;
    }
    let tail = &blocks[blocks.len() * 3 / 4..];
    let settled = tail.iter().map(|b| b.1).sum::<f64>() / tail.len() as f64;
    let floor = floor_rel * omega;
    let pts: Vec<(f64, f64)> = blocks[2..]
        .iter()
        .map(|&(t, m)| (t, (m - settled).abs()))
        .take_while(|&(_, d)| d > floor)
        .map(|(t, d)| (t, d.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let ml = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - ml)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    Some(DecayFit {
        rate: -sxy / sxx,
        points: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const DT: f64 = 0.00025;
    const ZBAR: f64 = 0.816_496_580_927_726;

    fn run_sine(cfg: &EstimatorConfig, omega: f64, t_end: f64) -> Vec<f64> {
        let mut st = EstimatorState::new(cfg);
        (0..(t_end / DT) as usize)
            .map(|k| {
                let z = ZBAR * (omega * k as f64 * DT).sin();
                st = st.step(z, DT, cfg).unwrap();
                st.omega_tilde
            })
            .collect()
    }

    #[test]
    fn zero_input_is_a_fixed_point() {
        let cfg = EstimatorConfig::default();
        let mut st = EstimatorState::new(&cfg);
        for _ in 0..10_000 {
            st = st.step(0.0, DT, &cfg).unwrap();
        }
        assert_eq!(st, EstimatorState::new(&cfg));
    }

    #[test]
    fn sign_of_zero_is_zero() {
        assert_eq!(sign(0.0), 0.0);
        assert_eq!(sign(-0.0), 0.0);
        assert_eq!(sign(-2.0), -1.0);
    }

    #[test]
    fn converges_from_above() {
        let w = run_sine(&EstimatorConfig::default(), 50.0, 2.0);
        let last = w.last().unwrap();
        assert!((last - 50.0).abs() < 0.5, "{last}");
    }

    #[test]
    fn locked_filter_stays_in_ripple_band() {
        // start on the filter's steady response at ω̃ = ω
        let omega = 50.0;
        let cfg = EstimatorConfig {
            omega_init: omega,
            ..Default::default()
        };
        // bandpass has unit gain / zero phase at ω: η2 = z, η1 = ∫η2
        let mut st = EstimatorState {
            eta1: -ZBAR * (0.0f64).cos() / omega,
            eta2: 0.0,
            omega_tilde: omega,
        };
        let per = (std::f64::consts::TAU / omega / DT).round() as usize;
        for p in 0..5 {
            let mut mean_err = 0.0;
            for k in p * per..(p + 1) * per {
                let z = ZBAR * (omega * k as f64 * DT).sin();
                mean_err += z - st.output();
                st = st.step(z, DT, &cfg).unwrap();
            }
            mean_err /= per as f64;
            assert!(mean_err.abs() < 1e-2, "period {p}: mean residual {mean_err}");
            // within the ripple band, well under 1 %
            assert!(
                (st.omega_tilde - omega).abs() / omega < 5e-3,
                "period {p}: drift to {}",
                st.omega_tilde
            );
        }
    }

    #[test]
    fn floor_clamps_estimate() {
        let cfg = EstimatorConfig {
            gamma: 4000.0,
            omega_init: 5.0,
            omega_floor: 2.0,
        };
        // true frequency 1 rad/s, below the floor
        let mut st = EstimatorState::new(&cfg);
        for k in 0..20_000 {
            st = st.step((k as f64 * DT).sin() * ZBAR, DT, &cfg).unwrap();
            assert!(st.omega_tilde >= 2.0);
        }
    }

    #[test]
    fn hold_step_freezes_estimate() {
        let cfg = EstimatorConfig::default();
        let st = EstimatorState {
            eta1: 0.01,
            eta2: 0.2,
            omega_tilde: 73.0,
        };
        let next = st.hold_step(0.5, DT).unwrap();
        assert_eq!(next.omega_tilde, 73.0);
        assert_ne!(next.eta2, st.eta2);
        assert_ne!(st.step(0.5, DT, &cfg).unwrap().omega_tilde, 73.0);
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let cfg = EstimatorConfig::default();
        let st = EstimatorState::new(&cfg);
        assert!(matches!(st.step(f64::NAN, DT, &cfg), Err(Error::Numerical(_))));
        let mut three = ThreePhaseEstimator::new(cfg);
        let bad = ThreePhaseSample::new(0.0, 0.1, f64::INFINITY, 0.0);
        assert!(three.step(&bad, DT).is_err());
        assert_eq!(three.channels(), &[EstimatorState::new(&cfg); 3]);
    }

    #[test]
    fn average_is_mean_and_symmetric() {
        assert_eq!(average_estimate(50.0, 50.0, 50.0), 50.0);
        assert_eq!(average_estimate(49.0, 50.0, 51.0), 50.0);
        assert_eq!(average_estimate(1.0, 2.0, 7.0), average_estimate(7.0, 1.0, 2.0));
    }

    #[test]
    fn bound_values() {
        let b150 = convergence_bound(4000.0, ZBAR, 150.0, 0.0).unwrap();
        let b50 = convergence_bound(4000.0, ZBAR, 50.0, 0.0).unwrap();
        assert!((b150 - 10.8866).abs() < 1e-3, "{b150}");
        assert!((b50 - 32.6599).abs() < 1e-3, "{b50}");
        assert_eq!(convergence_bound(0.0, ZBAR, 50.0, 0.3).unwrap(), 0.3);
        assert!(convergence_bound(4000.0, ZBAR, 0.0, 0.0).is_err());
    }

    #[test]
    fn config_checks_euler_limit() {
        let cfg = EstimatorConfig::new(4000.0, 2500.0);
        assert!(cfg.validate(DT).is_err());
        assert!(EstimatorConfig::default().validate(DT).is_ok());
        let bad = EstimatorConfig {
            gamma: -1.0,
            omega_init: 0.5,
            omega_floor: 1.0,
        };
        match bad.validate(DT) {
            Err(Error::Config(v)) => assert_eq!(v.len(), 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn decay_fit_recovers_synthetic_rate() {
        // ε(t) = 10·exp(−8t) + ripple at 2ω
        let omega = 50.0;
        let trace: Vec<f64> = (0..(3.0 / DT) as usize)
            .map(|k| {
                let t = k as f64 * DT;
                omega + 10.0 * (-8.0 * t).exp() + 0.3 * (2.0 * omega * t).sin()
            })
            .collect();
        let fit = fit_decay_rate(&trace, DT, omega, 1e-4).unwrap();
        assert!((fit.rate - 8.0).abs() < 0.2, "{fit:?}");
    }
}
