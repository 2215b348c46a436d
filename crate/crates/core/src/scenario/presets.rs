//! Named scenarios for the three experiment classes: torque steps at a steady
//! 50 or 150 rad/s with a short measurement loss, and a start-up frequency ramp.
//!
//! All presets sample at 4 kHz with the α = 40 symmetrical-optimum loop and an
//! estimator gain of 4000.

use crate::estimator::EstimatorConfig;
use crate::metrics::Window;
use crate::scenario::config::{
    FeedForward, LoopTuning, LossPolicy, OutputPaths, PllInit, ScenarioConfig, SignalSource, SyntheticSignal,
    DEFAULT_DT,
};
use crate::signals::{
    AmplitudeProfile, DisturbanceConfig, FrequencyProfile, LossWindow, SegmentKind, DEFAULT_NORM_FLOOR,
};

pub const PRESET_NAMES: [&str; 3] = ["load-step-50", "load-step-150", "ramp-startup"];

/// Start of the data-loss window in the load-step presets [s].
pub const LOAD_STEP_LOSS_START: f64 = 3.5;
/// Length of the data-loss window [s].
pub const LOAD_STEP_LOSS_DURATION: f64 = 0.05;
/// Ramp inclination of the `ramp-startup` preset [rad/s²].
pub const RAMP_KAPPA: f64 = 100.0;

pub fn preset(name: &str, ff: FeedForward) -> Option<ScenarioConfig> {
    match name {
        "load-step-50" => Some(load_step(50.0, ff)),
        "load-step-150" => Some(load_step(150.0, ff)),
        "ramp-startup" => Some(ramp_startup(RAMP_KAPPA, ff)),
        _ => None,
    }
}

fn base(
    name: String,
    duration: f64,
    signal: SyntheticSignal,
    ff: FeedForward,
    estimator: EstimatorConfig,
) -> ScenarioConfig {
    ScenarioConfig {
        name,
        dt: DEFAULT_DT,
        duration: Some(duration),
        allow_dt_mismatch: false,
        signal: SignalSource::Synthetic(signal),
        tuner: LoopTuning::reference(),
        estimator,
        feedforward: ff,
        pll: PllInit::default(),
        loss_policy: LossPolicy::Coast,
        phase_reference: Default::default(),
        metric_mode: Default::default(),
        norm_floor: DEFAULT_NORM_FLOOR,
        windows: Vec::new(),
        output: OutputPaths::default(),
    }
}

fn ff_suffix(ff: FeedForward) -> String {
    match ff {
        FeedForward::Off => "ff-off".into(),
        FeedForward::Estimated => "ff-estimated".into(),
        FeedForward::Constant(w) => format!("ff-constant-{w}"),
    }
}

/// Steady frequency `omega` with five amplitude steps from 0.5 to 1.5, light
/// noise, notch spikes and a 0.05 s data loss at 3.5 s. Runs 6 s.
pub fn load_step(omega: f64, ff: FeedForward) -> ScenarioConfig {
    let duration = 6.0;
    let signal = SyntheticSignal {
        frequency: FrequencyProfile::constant(omega, duration),
        amplitude: AmplitudeProfile::steps(&[(0.0, 0.5), (1.0, 0.7), (2.0, 0.9), (3.0, 1.1), (4.0, 1.3), (5.0, 1.5)]),
        disturbance: DisturbanceConfig {
            noise_std: 0.01,
            notch_rate: 10.0,
            notch_amplitude: 0.1,
            data_loss_windows: vec![LossWindow {
                start: LOAD_STEP_LOSS_START,
                duration: LOAD_STEP_LOSS_DURATION,
            }],
            rng_seed: 1,
            ..Default::default()
        },
    };
    // start the estimator above the operating frequency
    let estimator = EstimatorConfig::new(4000.0, (omega * 1.5).max(120.0));
    let mut cfg = base(
        format!("load-step-{omega}/{}", ff_suffix(ff)),
        duration,
        signal,
        ff,
        estimator,
    );
    cfg.windows = vec![Window::new(0.0, duration), Window::new(1.0, duration)];
    cfg
}

/// 50 rad/s for 6 s, then a ramp of `kappa` for 4 s. Metrics over the last
/// second of the ramp, `[9, 10)`, and over the whole run.
pub fn ramp_startup(kappa: f64, ff: FeedForward) -> ScenarioConfig {
    let duration = 10.0;
    let signal = SyntheticSignal {
        frequency: FrequencyProfile::constant(50.0, 6.0).then(4.0, SegmentKind::Ramp { kappa, from: None }),
        amplitude: AmplitudeProfile::constant(1.0),
        disturbance: DisturbanceConfig::clean(),
    };
    let mut cfg = base(
        format!("ramp-startup-{kappa}/{}", ff_suffix(ff)),
        duration,
        signal,
        ff,
        EstimatorConfig::new(4000.0, 120.0),
    );
    cfg.windows = vec![Window::new(9.0, 10.0), Window::new(0.0, duration)];
    cfg
}
