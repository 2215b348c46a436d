use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::EstimatorConfig;
use crate::metrics::{PhaseErrorMode, PhaseReference, Window};
use crate::pll::{tune_symmetrical_optimum, PiGains, TunerInput};
use crate::signals::{AmplitudeProfile, DisturbanceConfig, FrequencyProfile, DEFAULT_NORM_FLOOR};

/// Sampling period of the reference setup (4 kHz).
pub const DEFAULT_DT: f64 = 0.00025;

/// Default gap threshold for ingested data, in multiples of the median step.
pub const DEFAULT_GAP_FACTOR: f64 = 1.5;

/// Declarative description of one closed-loop run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Run length [s]. Required for synthetic signals; truncates ingested data.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration: Option<f64>,
    /// Permit a sampling period that differs from the tuner's `tau`.
    #[serde(default)]
    pub allow_dt_mismatch: bool,
    pub signal: SignalSource,
    pub tuner: LoopTuning,
    #[serde(default)]
    pub estimator: EstimatorConfig,
    #[serde(default)]
    pub feedforward: FeedForward,
    #[serde(default)]
    pub pll: PllInit,
    #[serde(default)]
    pub loss_policy: LossPolicy,
    #[serde(default)]
    pub phase_reference: PhaseReference,
    #[serde(default)]
    pub metric_mode: PhaseErrorMode,
    #[serde(default = "default_floor")]
    pub norm_floor: f64,
    /// Metric windows; the whole run when empty.
    #[serde(default)]
    pub windows: Vec<Window>,
    #[serde(default)]
    pub output: OutputPaths,
}

fn default_dt() -> f64 {
    DEFAULT_DT
}

fn default_floor() -> f64 {
    DEFAULT_NORM_FLOOR
}

/// Where the input samples come from. Exactly one source per scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignalSource {
    Synthetic(SyntheticSignal),
    Ingest(IngestSource),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSignal {
    pub frequency: FrequencyProfile,
    pub amplitude: AmplitudeProfile,
    #[serde(default)]
    pub disturbance: DisturbanceConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IngestSource {
    pub path: PathBuf,
    #[serde(default)]
    pub columns: ColumnMap,
    #[serde(default = "default_gap_factor")]
    pub gap_factor: f64,
}

fn default_gap_factor() -> f64 {
    DEFAULT_GAP_FACTOR
}

/// Column names of a recorded CSV file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ColumnMap {
    pub t: String,
    pub a: String,
    pub b: String,
    pub c: String,
    /// Optional reference angle [rad].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<String>,
    /// Optional reference frequency [rad/s].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<String>,
}

impl Default for ColumnMap {
    fn default() -> Self {
        Self {
            t: "t".into(),
            a: "za".into(),
            b: "zb".into(),
            c: "zc".into(),
            theta: None,
            omega: None,
        }
    }
}

/// PI gains, either tuned or given explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LoopTuning {
    SymmetricalOptimum(TunerInput),
    Explicit {
        kp: f64,
        ki: f64,
        /// Delay constant for the gain check; `dt` when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tau: Option<f64>,
    },
}

impl LoopTuning {
    /// α = 40 at the default 4 kHz sampling.
    pub fn reference() -> Self {
        LoopTuning::SymmetricalOptimum(TunerInput::new(40.0, DEFAULT_DT))
    }

    pub fn tau(&self, dt: f64) -> f64 {
        match self {
            LoopTuning::SymmetricalOptimum(t) => t.tau,
            LoopTuning::Explicit { tau, .. } => tau.unwrap_or(dt),
        }
    }

    pub fn gains(&self) -> Result<PiGains> {
        match self {
            LoopTuning::SymmetricalOptimum(t) => Ok(tune_symmetrical_optimum(t)?.0),
            LoopTuning::Explicit { kp, ki, .. } => Ok(PiGains::new(*kp, *ki)),
        }
    }
}

/// Feed-forward frequency injected ahead of the angle integrator.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FeedForward {
    /// Plain loop, no injection.
    Off,
    /// Averaged three-phase estimate.
    #[default]
    Estimated,
    /// Fixed nominal frequency [rad/s].
    Constant(f64),
}

impl fmt::Display for FeedForward {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeedForward::Off => f.write_str("off"),
            FeedForward::Estimated => f.write_str("estimated"),
            FeedForward::Constant(w) => write!(f, "constant:{w}"),
        }
    }
}

impl FromStr for FeedForward {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "off" => Ok(FeedForward::Off),
            "estimated" => Ok(FeedForward::Estimated),
            _ => match s.strip_prefix("constant:") {
                Some(v) => v
                    .trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|w| w.is_finite())
                    .map(FeedForward::Constant)
                    .ok_or_else(|| format!("bad constant feed-forward `{v}`")),
                None => Err(format!(
                    "feed-forward must be off, estimated or constant:<rad/s>, got `{s}`"
                )),
            },
        }
    }
}

impl TryFrom<String> for FeedForward {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        s.parse()
    }
}

impl From<FeedForward> for String {
    fn from(f: FeedForward) -> String {
        f.to_string()
    }
}

/// What the loop does on invalid samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossPolicy {
    /// Ignore the phase detector; integrator holds, angle keeps turning.
    #[default]
    Coast,
    /// Keep feeding the (held) measurement to the loop.
    Track,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PllInit {
    pub theta_star0: f64,
    pub integ0: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<PathBuf>,
}

impl ScenarioConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("scenario configs always serialize")
    }

    /// Overrides the disturbance seed of a synthetic signal.
    pub fn with_seed(mut self, seed: u64) -> Self {
        if let SignalSource::Synthetic(s) = &mut self.signal {
            s.disturbance.rng_seed = seed;
        }
        self
    }

    pub fn with_feedforward(mut self, ff: FeedForward) -> Self {
        self.feedforward = ff;
        self
    }

    /// Every violated constraint, or `Ok`.
    pub fn validate(&self) -> Result<()> {
        let mut v = Vec::new();
        if self.name.trim().is_empty() {
            v.push("scenario name must not be empty".to_string());
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            v.push("dt must be > 0".to_string());
        }
        if !(self.norm_floor > 0.0) {
            v.push("norm_floor must be > 0".to_string());
        }
        match &self.signal {
            SignalSource::Synthetic(s) => match self.duration {
                Some(d) if d > self.dt && d.is_finite() => {
                    v.extend(s.frequency.violations());
                    v.extend(s.amplitude.violations());
                    v.extend(s.disturbance.violations(d));
                }
                Some(_) => v.push("duration must exceed dt".to_string()),
                None => v.push("synthetic signals need a duration".to_string()),
            },
            SignalSource::Ingest(src) => {
                if !(src.gap_factor > 1.0) {
                    v.push("ingest gap_factor must be > 1".to_string());
                }
                if let Some(d) = self.duration {
                    if !(d > 0.0) {
                        v.push("duration must be > 0".to_string());
                    }
                }
            }
        }
        let tau = self.tuner.tau(self.dt);
        match self.tuner {
            LoopTuning::SymmetricalOptimum(t) => {
                let tv = t.violations();
                if tv.is_empty() {
                    if let Ok(g) = self.tuner.gains() {
                        v.extend(g.violations(tau));
                    }
                }
                v.extend(tv);
            }
            LoopTuning::Explicit { kp, ki, .. } => v.extend(PiGains::new(kp, ki).violations(tau)),
        }
        if !self.allow_dt_mismatch && self.dt > 0.0 && ((tau - self.dt) / self.dt).abs() > 1e-9 {
            v.push(format!(
                "dt = {} differs from tuner tau = {tau}; set allow_dt_mismatch to run anyway",
                self.dt
            ));
        }
        if self.feedforward == FeedForward::Estimated {
            v.extend(self.estimator.violations(self.dt));
        }
        for (i, w) in self.windows.iter().enumerate() {
            if !(w.end > w.start) || !w.start.is_finite() || !w.end.is_finite() {
                v.push(format!("window {i} must satisfy start < end"));
            }
        }
        if !(self.pll.theta_star0.is_finite() && self.pll.integ0.is_finite()) {
            v.push("pll initial state must be finite".to_string());
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(v))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::presets;

    #[test]
    fn feedforward_syntax() {
        assert_eq!("off".parse::<FeedForward>().unwrap(), FeedForward::Off);
        assert_eq!(
            "constant:50".parse::<FeedForward>().unwrap(),
            FeedForward::Constant(50.0)
        );
        assert!("constant:x".parse::<FeedForward>().is_err());
        assert!("fast".parse::<FeedForward>().is_err());
        assert_eq!(FeedForward::Constant(12.5).to_string(), "constant:12.5");
    }

    #[test]
    fn presets_round_trip_through_toml() {
        for name in presets::PRESET_NAMES {
            for ff in [FeedForward::Off, FeedForward::Estimated] {
                let cfg = presets::preset(name, ff).unwrap();
                let text = cfg.to_toml_string();
                let back = ScenarioConfig::from_toml_str(&text).unwrap();
                assert_eq!(back, cfg, "{text}");
                back.validate().unwrap();
            }
        }
    }

    #[test]
    fn hand_written_config_parses() {
        let text = r#"
name = "hand"
duration = 2.0
feedforward = "constant:50"

[signal.synthetic.frequency]
segments = [
  { kind = "constant", omega = 50.0, duration = 1.0 },
  { kind = "ramp", kappa = 20.0, duration = 1.0 },
]

[signal.synthetic.amplitude]
segments = [{ start = 0.0, amplitude = 1.0 }]

[signal.synthetic.disturbance]
noise_std = 0.01
rng_seed = 9

[tuner]
kind = "symmetrical-optimum"
alpha = 40.0
tau = 0.00025

[[windows]]
start = 1.0
end = 2.0
"#;
        let cfg = ScenarioConfig::from_toml_str(text).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.feedforward, FeedForward::Constant(50.0));
        assert_eq!(cfg.dt, DEFAULT_DT);
        assert_eq!(cfg.windows, vec![Window::new(1.0, 2.0)]);
    }

    #[test]
    fn validation_lists_every_violation() {
        let mut cfg = presets::preset("ramp-startup", FeedForward::Estimated).unwrap();
        cfg.dt = 0.001;
        cfg.estimator.gamma = -1.0;
        cfg.windows.push(Window::new(3.0, 2.0));
        cfg.name.clear();
        match cfg.validate() {
            Err(Error::Config(v)) => {
                assert!(v.iter().any(|m| m.contains("differs from tuner tau")), "{v:?}");
                assert!(v.iter().any(|m| m.contains("gamma")), "{v:?}");
                assert!(v.iter().any(|m| m.contains("window 2")), "{v:?}");
                assert!(v.iter().any(|m| m.contains("name")), "{v:?}");
            }
            other => panic!("{other:?}"),
        }
        cfg.allow_dt_mismatch = true;
        match cfg.validate() {
            Err(Error::Config(v)) => assert!(!v.iter().any(|m| m.contains("differs"))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut text = presets::preset("load-step-50", FeedForward::Off)
            .unwrap()
            .to_toml_string();
        text.insert_str(0, "bogus = 1\n");
        assert!(ScenarioConfig::from_toml_str(&text).is_err());
    }
}
