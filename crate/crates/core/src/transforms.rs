//! Stationary three-phase to rotating dq frame projection.
//!
//! The projection is amplitude invariant (2/3 scaling) and has no zero-sequence
//! output. For a balanced input `Z·cos(θ − 2πn/3)` evaluated at frame angle `θ*`
//! it yields `zd = Z·cos(θ* − θ)` and `zq = Z·sin(θ* − θ)`, so `zq` is positive
//! when the frame leads the input.

use std::f64::consts::PI;

use crate::signals::ThreePhaseSample;

const PHASE_SHIFT: [f64; 3] = [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0];

/// Rotating-frame components evaluated at `theta_star`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DqFrame {
    pub zd: f64,
    pub zq: f64,
    pub theta_star: f64,
}

impl DqFrame {
    pub fn magnitude(&self) -> f64 {
        self.zd.hypot(self.zq)
    }
}

/// Projects `s` onto the frame at angle `theta_star`.
pub fn abc_to_dq(s: &ThreePhaseSample, theta_star: f64) -> DqFrame {
    abc_to_dq_raw([s.za, s.zb, s.zc], theta_star)
}

/// Same as [`abc_to_dq`] on a bare `[za, zb, zc]` triple.
pub fn abc_to_dq_raw(z: [f64; 3], theta_star: f64) -> DqFrame {
    let mut zd = 0.0;
    let mut zq = 0.0;
    for (zn, shift) in z.iter().zip(PHASE_SHIFT) {
        let (sin, cos) = (theta_star - shift).sin_cos();
        zd += cos * zn;
        zq += sin * zn;
    }
    DqFrame {
        zd: zd * 2.0 / 3.0,
        zq: zq * 2.0 / 3.0,
        theta_star,
    }
}

/// Inverse projection (no zero-sequence). Used to build test inputs.
#[doc(hidden)]
pub fn dq_to_abc(zd: f64, zq: f64, theta_star: f64) -> [f64; 3] {
    // zd = Z cos(θ*−θ), zq = Z sin(θ*−θ)  ⇒  Z cos(θ − φ) = zd cos(θ*−φ) + zq sin(θ*−φ)
    PHASE_SHIFT.map(|shift| {
        let (sin, cos) = (theta_star - shift).sin_cos();
        zd * cos + zq * sin
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn balanced(z: f64, theta: f64) -> [f64; 3] {
        PHASE_SHIFT.map(|s| z * (theta - s).cos())
    }

    #[test]
    fn aligned_frame_gives_pure_d() {
        let dq = abc_to_dq_raw(balanced(1.0, 0.3), 0.3);
        assert!((dq.zd - 1.0).abs() < 1e-12);
        assert!(dq.zq.abs() < 1e-12);
    }

    #[test]
    fn small_lead_reads_sine_of_offset() {
        let dq = abc_to_dq_raw(balanced(1.0, 0.0), 0.01);
        assert!((dq.zq - 0.01f64.sin()).abs() < 1e-12);
        assert!((dq.zq - 0.0099998).abs() < 1e-7);
    }

    #[test]
    fn quarter_turn_lead_is_pure_q() {
        let theta = 0.7;
        let dq = abc_to_dq_raw(balanced(2.0, theta), theta + PI / 2.0);
        assert!(dq.zd.abs() < 1e-12);
        assert!((dq.zq - 2.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_round_trips() {
        let abc = dq_to_abc(0.8, -0.3, 1.1);
        let dq = abc_to_dq_raw(abc, 1.1);
        assert!((dq.zd - 0.8).abs() < 1e-12 && (dq.zq + 0.3).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn matrix_matches_closed_form(z in 0.01f64..100.0, theta in -10.0f64..10.0, theta_star in -10.0f64..10.0) {
            let dq = abc_to_dq_raw(balanced(z, theta), theta_star);
            let tol = 1e-12 * z.max(1.0);
            prop_assert!((dq.zd - z * (theta_star - theta).cos()).abs() <= tol);
            prop_assert!((dq.zq - z * (theta_star - theta).sin()).abs() <= tol);
            prop_assert!((dq.magnitude() - z).abs() <= tol);
        }

        #[test]
        fn small_angle_linearity(z in 0.01f64..10.0, theta in 0.0f64..6.3, delta in -0.1f64..0.1) {
            let dq = abc_to_dq_raw(balanced(z, theta), theta + delta);
            prop_assert!((dq.zq - z * delta).abs() <= z * delta.abs().powi(3) / 6.0 + 1e-12);
        }

        #[test]
        fn periodic_in_frame_angle(za in -2.0f64..2.0, zb in -2.0f64..2.0, zc in -2.0f64..2.0, theta_star in 0.0f64..6.3) {
            let a = abc_to_dq_raw([za, zb, zc], theta_star);
            let b = abc_to_dq_raw([za, zb, zc], theta_star + 2.0 * PI);
            prop_assert!((a.zd - b.zd).abs() < 1e-12 && (a.zq - b.zq).abs() < 1e-12);
        }
    }
}
