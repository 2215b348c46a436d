//! Synchronous-reference-frame PLL: PI loop filter, angle integrator and
//! feed-forward frequency injection.
//!
//! The error fed to the PI is `−zq` of the normalized input, so a frame that
//! leads the input (`zq > 0`) slows down. The feed-forward frequency is added
//! to the PI output ahead of the angle integrator.

mod analysis;
mod tuning;

pub use analysis::{
    bode_sweep, frequency_error_response, open_loop_response, open_loop_transfer, phase_margin, phase_peak,
    steady_state_ramp_error, write_bode_csv, BodePoint, PhaseMargin,
};
pub use tuning::{tune_symmetrical_optimum, PiGains, TunerInput, SQRT_2_3};

use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Loop state after a step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PllState {
    /// Frame angle, always in `[0, 2π)`.
    pub theta_star: f64,
    /// Loop frequency ω* [rad/s].
    pub omega_star: f64,
    /// PI integrator [rad/s].
    pub integ: f64,
}

impl Default for PllState {
    fn default() -> Self {
        Self::new(0.0)
    }
}

impl PllState {
    pub fn new(theta_star: f64) -> Self {
        Self {
            theta_star: wrap_2pi(theta_star),
            omega_star: 0.0,
            integ: 0.0,
        }
    }

    /// Advances the loop with the measured `zq` (normalized) and feed-forward `omega_ff`.
    pub fn step(&self, zq: f64, omega_ff: f64, gains: &PiGains, dt: f64) -> Result<Self> {
        if !zq.is_finite() || !omega_ff.is_finite() {
            return Err(Error::Numerical(format!(
                "pll input zq={zq}, ff={omega_ff} is not finite"
            )));
        }
        let e = -zq;
        let integ = self.integ + gains.ki * e * dt;
        let omega_star = gains.kp * e + integ + omega_ff;
        Ok(Self {
            theta_star: wrap_2pi(self.theta_star + omega_star * dt),
            omega_star,
            integ,
        })
    }

    /// Open-loop advance with zero error: the integrator holds and the angle
    /// keeps turning at `integ + omega_ff`.
    pub fn coast(&self, omega_ff: f64, dt: f64) -> Self {
        let omega_star = self.integ + omega_ff;
        Self {
            theta_star: wrap_2pi(self.theta_star + omega_star * dt),
            omega_star,
            integ: self.integ,
        }
    }
}

/// Free-function form of [`PllState::step`].
pub fn pll_step(state: &PllState, zq: f64, omega_ff: f64, gains: &PiGains, dt: f64) -> Result<PllState> {
    state.step(zq, omega_ff, gains, dt)
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_2pi(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Wraps an angle difference into `(−π, π]`.
pub fn wrap_pi(x: f64) -> f64 {
    let r = std::f64::consts::PI - (std::f64::consts::PI - x).rem_euclid(TAU);
    if r <= -std::f64::consts::PI {
        r + TAU
    } else {
        r
    }
}
