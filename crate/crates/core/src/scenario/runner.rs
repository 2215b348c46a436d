use std::path::Path;

use crate::error::{Error, Result};
use crate::estimator::ThreePhaseEstimator;
use crate::metrics::{reconstruct_sample, summarize, MetricSummary, RunTrace, Window};
use crate::pll::{PiGains, PllState};
use crate::scenario::config::{FeedForward, LossPolicy, ScenarioConfig, SignalSource};
use crate::scenario::ingest::ingest_csv;
use crate::scenario::trace_io::{metrics_json, write_trace_csv};
use crate::signals::{normalize_with_floor, GeneratedSample, SignalGenerator};
use crate::transforms::abc_to_dq;

/// Trace and metric records of one run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trace: RunTrace,
    pub metrics: Vec<MetricSummary>,
}

impl RunOutput {
    pub fn trace_csv(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &self.trace).expect("writing to memory");
        buf
    }

    pub fn metrics_json(&self) -> String {
        metrics_json(&self.metrics)
    }

    /// Writes `trace.csv` and `metrics.json` (or the configured names) under `dir`.
    pub fn write_to(&self, dir: &Path, cfg: &ScenarioConfig) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let trace = dir.join(cfg.output.trace.as_deref().unwrap_or(Path::new("trace.csv")));
        let metrics = dir.join(cfg.output.metrics.as_deref().unwrap_or(Path::new("metrics.json")));
        write_trace_csv(std::fs::File::create(trace)?, &self.trace)?;
        std::fs::write(metrics, self.metrics_json())?;
        Ok(())
    }
}

/// Validates `cfg`, acquires its samples and runs the closed loop.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunOutput> {
    cfg.validate()?;
    match &cfg.signal {
        SignalSource::Synthetic(s) => {
            let duration = cfg.duration.expect("validated");
            let gen = SignalGenerator::new(
                s.frequency.clone(),
                s.amplitude.clone(),
                s.disturbance.clone(),
                cfg.dt,
                duration,
            )?;
            run_samples(cfg, gen.iter(), cfg.dt)
        }
        SignalSource::Ingest(src) => {
            let sig = ingest_csv(&src.path, &src.columns, src.gap_factor)?;
            run_ingested(cfg, &sig.samples, sig.dt)
        }
    }
}

/// Runs the loop on already ingested samples sampled every `dt`.
pub fn run_ingested(cfg: &ScenarioConfig, samples: &[GeneratedSample], dt: f64) -> Result<RunOutput> {
    let tau = cfg.tuner.tau(dt);
    if !cfg.allow_dt_mismatch && ((tau - dt) / dt).abs() > 1e-6 {
        return Err(Error::config(format!(
            "recorded sampling step {dt} differs from tuner tau = {tau}; set allow_dt_mismatch to run anyway"
        )));
    }
    let t0 = samples.first().map_or(0.0, |g| g.sample.t);
    let end = cfg.duration.map_or(f64::INFINITY, |d| t0 + d);
    run_samples(cfg, samples.iter().copied().take_while(|g| g.sample.t < end), dt)
}

/// Closed loop over a sample stream: normalize, estimate, project, step the PLL, record.
pub fn run_samples<I>(cfg: &ScenarioConfig, samples: I, dt: f64) -> Result<RunOutput>
where
    I: IntoIterator<Item = GeneratedSample>,
{
    let gains: PiGains = cfg.tuner.gains()?;
    let samples = samples.into_iter();
    let mut trace = RunTrace::with_capacity(samples.size_hint().0);
    let mut est = ThreePhaseEstimator::new(cfg.estimator);
    let mut pll = PllState::new(cfg.pll.theta_star0);
    pll.integ = cfg.pll.integ0;

    for (k, g) in samples.enumerate() {
        let raw = g.sample;
        if !raw.is_finite() {
            return Err(Error::Numerical(format!("sample {k} at t={} is not finite", raw.t)));
        }
        let norm = normalize_with_floor(&raw, cfg.norm_floor);
        let (omega_ff, omega_tilde) = match cfg.feedforward {
            FeedForward::Off => (0.0, f64::NAN),
            FeedForward::Constant(w) => (w, w),
            FeedForward::Estimated => {
                let w = est
                    .step(&norm, dt)
                    .map_err(|e| Error::Numerical(format!("t={}: {e}", raw.t)))?;
                (w, w)
            }
        };
        let dq = abc_to_dq(&norm, pll.theta_star);
        let next = if norm.valid || cfg.loss_policy == LossPolicy::Track {
            pll.step(dq.zq, omega_ff, &gains, dt)
                .map_err(|e| Error::Numerical(format!("t={}: {e}", raw.t)))?
        } else {
            pll.coast(omega_ff, dt)
        };

        trace.t.push(raw.t);
        trace.za.push(raw.za);
        trace.zb.push(raw.zb);
        trace.zc.push(raw.zc);
        trace.valid.push(norm.valid);
        trace.omega_true.push(g.omega_true);
        trace.theta_true.push(g.theta_true);
        trace.omega_tilde.push(omega_tilde);
        trace.omega_star.push(next.omega_star);
        trace.theta_star.push(pll.theta_star);
        trace.zq.push(dq.zq);
        trace.zbar_a.push(norm.za);
        trace
            .zbar_a_star
            .push(reconstruct_sample(pll.theta_star, cfg.phase_reference));
        pll = next;
    }
    if trace.is_empty() {
        return Err(Error::config("scenario produced no samples"));
    }

    let windows = if cfg.windows.is_empty() {
        vec![trace.full_window()]
    } else {
        cfg.windows.clone()
    };
    let metrics = windows
        .iter()
        .map(|w: &Window| summarize(&trace, &cfg.name, w, cfg.metric_mode))
        .collect::<Result<Vec<_>>>()?;
    Ok(RunOutput { trace, metrics })
}
