use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Peak channel amplitude of a normalized balanced signal, `sqrt(2/3)`.
pub const SQRT_2_3: f64 = 0.816_496_580_927_726;

/// Parallel-form PI gains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiGains {
    pub kp: f64,
    pub ki: f64,
}

impl PiGains {
    pub fn new(kp: f64, ki: f64) -> Self {
        Self { kp, ki }
    }

    /// Lower corner frequency `ki/kp` [rad/s].
    pub fn corner(&self) -> f64 {
        self.ki / self.kp
    }

    /// Positive gains whose PI zero sits well below the delay corner (`kp/ki > 10τ`).
    pub(crate) fn violations(&self, tau: f64) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.kp > 0.0 && self.kp.is_finite()) || !(self.ki > 0.0 && self.ki.is_finite()) {
            v.push("PI gains must be > 0".to_string());
        } else if !(self.kp / self.ki > 10.0 * tau) {
            v.push(format!(
                "kp/ki = {} must exceed 10·tau = {}",
                self.kp / self.ki,
                10.0 * tau
            ));
        }
        v
    }

    pub fn validate(&self, tau: f64) -> Result<()> {
        let v = self.violations(tau);
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(v))
        }
    }
}

/// Inputs of the symmetrical-optimum rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TunerInput {
    /// Normalizing factor; crossover sits `alpha` below the delay corner `1/tau`.
    pub alpha: f64,
    /// Sampling delay [s].
    pub tau: f64,
    /// Plant gain; `sqrt(2/3)` for a normalized input.
    #[serde(default = "default_plant_gain")]
    pub plant_gain: f64,
}

fn default_plant_gain() -> f64 {
    SQRT_2_3
}

impl TunerInput {
    pub fn new(alpha: f64, tau: f64) -> Self {
        Self {
            alpha,
            tau,
            plant_gain: SQRT_2_3,
        }
    }

    pub fn with_plant_gain(mut self, plant_gain: f64) -> Self {
        self.plant_gain = plant_gain;
        self
    }

    pub(crate) fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.alpha > 1.0 && self.alpha.is_finite()) {
            v.push("tuner alpha must be > 1".to_string());
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            v.push("tuner tau must be > 0".to_string());
        }
        if !(self.plant_gain > 0.0 && self.plant_gain.is_finite()) {
            v.push("tuner plant_gain must be > 0".to_string());
        }
        v
    }
}

/// Symmetrical-optimum PI gains and the resulting crossover `1/(α·τ)`.
///
/// `kp = 1/(U·α·τ)`, `ki = 1/(U·α³·τ²)`; the PI corner `ki/kp` and the delay
/// corner `1/τ` sit a factor `α` below and above the crossover.
pub fn tune_symmetrical_optimum(input: &TunerInput) -> Result<(PiGains, f64)> {
    let v = input.violations();
    if !v.is_empty() {
        return Err(Error::Config(v));
    }
    let TunerInput {
        alpha,
        tau,
        plant_gain: u,
    } = *input;
    let gains = PiGains {
        kp: 1.0 / (u * alpha * tau),
        ki: 1.0 / (u * alpha.powi(3) * tau * tau),
    };
    Ok((gains, 1.0 / (alpha * tau)))
}
