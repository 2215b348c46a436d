//! Synchronization quality: phase-error sums, waveform reconstruction and RMSE.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pll::{wrap_pi, SQRT_2_3};

/// Per-sample series of one closed-loop run. All vectors share one length.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunTrace {
    pub t: Vec<f64>,
    pub za: Vec<f64>,
    pub zb: Vec<f64>,
    pub zc: Vec<f64>,
    pub valid: Vec<bool>,
    pub omega_true: Vec<f64>,
    pub theta_true: Vec<f64>,
    pub omega_tilde: Vec<f64>,
    pub omega_star: Vec<f64>,
    pub theta_star: Vec<f64>,
    pub zq: Vec<f64>,
    /// Normalized measured phase a.
    pub zbar_a: Vec<f64>,
    /// Phase a reconstructed from `theta_star`.
    pub zbar_a_star: Vec<f64>,
}

impl RunTrace {
    pub fn with_capacity(n: usize) -> Self {
        let v = || Vec::with_capacity(n);
        Self {
            t: v(),
            za: v(),
            zb: v(),
            zc: v(),
            valid: Vec::with_capacity(n),
            omega_true: v(),
            theta_true: v(),
            omega_tilde: v(),
            omega_star: v(),
            theta_star: v(),
            zq: v(),
            zbar_a: v(),
            zbar_a_star: v(),
        }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Checks equal lengths and strictly increasing time.
    pub fn check(&self) -> Result<()> {
        let n = self.t.len();
        let lens = [
            self.za.len(),
            self.zb.len(),
            self.zc.len(),
            self.valid.len(),
            self.omega_true.len(),
            self.theta_true.len(),
            self.omega_tilde.len(),
            self.omega_star.len(),
            self.theta_star.len(),
            self.zq.len(),
            self.zbar_a.len(),
            self.zbar_a_star.len(),
        ];
        if lens.iter().any(|&l| l != n) {
            return Err(Error::Metric("trace columns differ in length".into()));
        }
        if let Some(i) = self.t.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::Metric(format!("trace time not increasing at index {}", i + 1)));
        }
        Ok(())
    }

    /// Index range of the half-open window.
    pub fn window_range(&self, w: &Window) -> std::ops::Range<usize> {
        let lo = self.t.partition_point(|&t| t < w.start);
        let hi = self.t.partition_point(|&t| t < w.end);
        lo..hi.max(lo)
    }

    /// Whole-run window: from the first sample to one step past the last.
    pub fn full_window(&self) -> Window {
        let n = self.t.len();
        match n {
            0 => Window { start: 0.0, end: 0.0 },
            1 => Window::new(self.t[0], self.t[0] + 1.0),
            _ => Window::new(self.t[0], self.t[n - 1] + (self.t[n - 1] - self.t[n - 2])),
        }
    }
}

/// Half-open time window `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub start: f64,
    pub end: f64,
}

impl Window {
    pub fn new(start: f64, end: f64) -> Self {
        Self { start, end }
    }
}

/// How `θ* − θ` is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseErrorMode {
    /// Difference wrapped into `(−π, π]`.
    #[default]
    Wrapped,
    /// Raw difference of the two `[0, 2π)` sawtooth angles, including the
    /// near-2π spikes whenever only one of them has rolled over.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseErrorMetrics {
    /// Accumulated absolute error.
    pub e_sigma: f64,
    /// Mean absolute error.
    pub e_me: f64,
    /// Number of samples in the window.
    pub k: usize,
}

/// Accumulated and mean absolute phase error over a window.
pub fn phase_error_metrics(trace: &RunTrace, window: &Window, mode: PhaseErrorMode) -> Result<PhaseErrorMetrics> {
    let r = trace.window_range(window);
    phase_error_metrics_slices(&trace.theta_star[r.clone()], &trace.theta_true[r], mode)
}

/// [`phase_error_metrics`] on bare angle series.
pub fn phase_error_metrics_slices(
    theta_star: &[f64],
    theta: &[f64],
    mode: PhaseErrorMode,
) -> Result<PhaseErrorMetrics> {
    if theta_star.len() != theta.len() {
        return Err(Error::Metric("angle series differ in length".into()));
    }
    if theta.is_empty() {
        return Err(Error::Metric("metric window holds no samples".into()));
    }
    let e_sigma: f64 = theta_star
        .iter()
        .zip(theta)
        .map(|(a, b)| match mode {
            PhaseErrorMode::Wrapped => wrap_pi(a - b).abs(),
            PhaseErrorMode::Raw => (a - b).abs(),
        })
        .sum();
    let k = theta.len();
    Ok(PhaseErrorMetrics {
        e_sigma,
        e_me: e_sigma / k as f64,
        k,
    })
}

/// Which trigonometric function the reconstruction uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseReference {
    /// `Z̄·cos(θ*)`, consistent with cosine-referenced phase channels.
    #[default]
    Cosine,
    /// `Z̄·sin(θ*)`; a quarter period off cosine-referenced channels.
    Sine,
}

/// `Z̄·sin(θ*)` with `Z̄ = sqrt(2/3)`.
pub fn reconstruct_waveform(theta_star: &[f64]) -> Vec<f64> {
    reconstruct_waveform_with(theta_star, PhaseReference::Sine)
}

pub fn reconstruct_waveform_with(theta_star: &[f64], reference: PhaseReference) -> Vec<f64> {
    theta_star.iter().map(|&th| reconstruct_sample(th, reference)).collect()
}

pub(crate) fn reconstruct_sample(theta_star: f64, reference: PhaseReference) -> f64 {
    match reference {
        PhaseReference::Cosine => SQRT_2_3 * theta_star.cos(),
        PhaseReference::Sine => SQRT_2_3 * theta_star.sin(),
    }
}

/// Root mean square difference of two equally long series.
pub fn waveform_rmse(z_meas: &[f64], z_star: &[f64]) -> Result<f64> {
    if z_meas.len() != z_star.len() {
        return Err(Error::Metric(format!(
            "series lengths differ: {} vs {}",
            z_meas.len(),
            z_star.len()
        )));
    }
    if z_meas.is_empty() {
        return Err(Error::Metric("RMSE window holds no samples".into()));
    }
    // scale by the largest difference so tiny differences do not underflow to zero
    let scale = z_meas
        .iter()
        .zip(z_star)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let ms = z_meas
        .iter()
        .zip(z_star)
        .map(|(a, b)| ((a - b) / scale).powi(2))
        .sum::<f64>()
        / z_meas.len() as f64;
    Ok(scale * ms.sqrt())
}

/// RMSE of `zbar_a` against `zbar_a_star` inside a window.
pub fn trace_rmse(trace: &RunTrace, window: &Window) -> Result<f64> {
    let r = trace.window_range(window);
    waveform_rmse(&trace.zbar_a[r.clone()], &trace.zbar_a_star[r])
}

/// One metric record as written to the metrics JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub scenario: String,
    pub mode: PhaseErrorMode,
    pub window: [f64; 2],
    /// `None` when the trace has no phase reference (e.g. ingested data without angle).
    #[serde(rename = "E_sigma")]
    pub e_sigma: Option<f64>,
    #[serde(rename = "E_me")]
    pub e_me: Option<f64>,
    #[serde(rename = "E_rms")]
    pub e_rms: f64,
    #[serde(rename = "K")]
    pub k: usize,
}

/// Computes the summary record for one window.
pub fn summarize(trace: &RunTrace, scenario: &str, window: &Window, mode: PhaseErrorMode) -> Result<MetricSummary> {
    let r = trace.window_range(window);
    let k = r.len();
    if k == 0 {
        return Err(Error::Metric(format!(
            "window [{}, {}) holds no samples",
            window.start, window.end
        )));
    }
    let has_reference = trace.theta_true[r.clone()].iter().all(|x| x.is_finite());
    let phase = if has_reference {
        Some(phase_error_metrics(trace, window, mode)?)
    } else {
        None
    };
    Ok(MetricSummary {
        scenario: scenario.to_string(),
        mode,
        window: [window.start, window.end],
        e_sigma: phase.map(|p| p.e_sigma),
        e_me: phase.map(|p| p.e_me),
        e_rms: trace_rmse(trace, window)?,
        k,
    })
}
