//! Synthetic three-phase test signals and amplitude normalization.
//!
//! Phase channels follow `Z·cos(θ − 2πn/3)`, `n ∈ {0, 1, 2}`. The phase `θ` is the
//! forward-Euler running integral of the frequency profile on the sampling grid,
//! i.e. the same integration the loop simulator uses for its own angle.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default normalization floor below which a sample is flagged invalid.
pub const DEFAULT_NORM_FLOOR: f64 = 1e-9;

const PHASE_SHIFT: [f64; 3] = [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0];

/// One time-stamped phase triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreePhaseSample {
    pub t: f64,
    pub za: f64,
    pub zb: f64,
    pub zc: f64,
    /// `false` inside a data-loss window or when normalization hit the floor.
    pub valid: bool,
}

impl ThreePhaseSample {
    pub fn new(t: f64, za: f64, zb: f64, zc: f64) -> Self {
        Self {
            t,
            za,
            zb,
            zc,
            valid: true,
        }
    }

    /// Clean balanced sample `Z·cos(θ − 2πn/3)`.
    pub fn balanced(t: f64, amplitude: f64, theta: f64) -> Self {
        let [za, zb, zc] = PHASE_SHIFT.map(|s| amplitude * (theta - s).cos());
        Self::new(t, za, zb, zc)
    }

    pub fn channels(&self) -> [f64; 3] {
        [self.za, self.zb, self.zc]
    }

    pub fn with_channels(self, [za, zb, zc]: [f64; 3]) -> Self {
        Self { za, zb, zc, ..self }
    }

    /// Euclidean norm of the phase vector.
    pub fn norm(&self) -> f64 {
        (self.za * self.za + self.zb * self.zb + self.zc * self.zc).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.za.is_finite() && self.zb.is_finite() && self.zc.is_finite()
    }
}

/// Divides every channel by the vector norm so the peak channel amplitude of a
/// balanced input becomes `sqrt(2/3)` whatever its magnitude.
///
/// Uses [`DEFAULT_NORM_FLOOR`].
pub fn normalize(s: &ThreePhaseSample) -> ThreePhaseSample {
    normalize_with_floor(s, DEFAULT_NORM_FLOOR)
}

/// [`normalize`] with an explicit floor. Below the floor the sample is passed
/// through unchanged and flagged invalid.
pub fn normalize_with_floor(s: &ThreePhaseSample, floor: f64) -> ThreePhaseSample {
    let n = s.norm();
    if !(n >= floor) || n == 0.0 {
        return ThreePhaseSample { valid: false, ..*s };
    }
    ThreePhaseSample {
        za: s.za / n,
        zb: s.zb / n,
        zc: s.zc / n,
        ..*s
    }
}

/// Shape of one frequency segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SegmentKind {
    /// Hold `omega` [rad/s].
    Constant { omega: f64 },
    /// Linear change with inclination `kappa` [rad/s²]. Starts from `from`
    /// when given, otherwise from the frequency at the end of the previous segment.
    Ramp {
        kappa: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        from: Option<f64>,
    },
    /// Jump to `omega`, optionally with an instantaneous phase jump [rad].
    Step {
        omega: f64,
        #[serde(default)]
        phase_jump: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencySegment {
    pub duration: f64,
    #[serde(flatten)]
    pub kind: SegmentKind,
}

/// Piecewise frequency trajectory. Past the last segment the final frequency is held.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyProfile {
    #[serde(default)]
    pub theta0: f64,
    pub segments: Vec<FrequencySegment>,
}

impl FrequencyProfile {
    pub fn constant(omega: f64, duration: f64) -> Self {
        Self {
            theta0: 0.0,
            segments: vec![FrequencySegment {
                duration,
                kind: SegmentKind::Constant { omega },
            }],
        }
    }

    pub fn then(mut self, duration: f64, kind: SegmentKind) -> Self {
        self.segments.push(FrequencySegment { duration, kind });
        self
    }

    pub fn with_theta0(mut self, theta0: f64) -> Self {
        self.theta0 = theta0;
        self
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    pub(crate) fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.segments.is_empty() {
            out.push("frequency profile has no segments".to_string());
        }
        if !self.theta0.is_finite() {
            out.push("theta0 must be finite".to_string());
        }
        for (i, seg) in self.segments.iter().enumerate() {
            if !(seg.duration > 0.0 && seg.duration.is_finite()) {
                out.push(format!("frequency segment {i}: duration must be > 0"));
            }
            let finite = match seg.kind {
                SegmentKind::Constant { omega } => omega.is_finite(),
                SegmentKind::Ramp { kappa, from } => {
                    if i == 0 && from.is_none() {
                        out.push("frequency segment 0: a leading ramp needs `from`".to_string());
                    }
                    kappa.is_finite() && from.is_none_or(f64::is_finite)
                }
                SegmentKind::Step { omega, phase_jump } => omega.is_finite() && phase_jump.is_finite(),
            };
            if !finite {
                out.push(format!("frequency segment {i}: values must be finite"));
            }
        }
        out
    }

    fn resolve(&self) -> Vec<ResolvedSegment> {
        let mut out = Vec::with_capacity(self.segments.len());
        let mut start = 0.0;
        let mut omega_prev = 0.0;
        for seg in &self.segments {
            let (omega_start, kappa, phase_jump) = match seg.kind {
                SegmentKind::Constant { omega } => (omega, 0.0, 0.0),
                SegmentKind::Ramp { kappa, from } => (from.unwrap_or(omega_prev), kappa, 0.0),
                SegmentKind::Step { omega, phase_jump } => (omega, 0.0, phase_jump),
            };
            out.push(ResolvedSegment {
                start,
                omega_start,
                kappa,
                phase_jump,
            });
            omega_prev = omega_start + kappa * seg.duration;
            start += seg.duration;
        }
        // Hold the final frequency after the profile ends.
        out.push(ResolvedSegment {
            start,
            omega_start: omega_prev,
            kappa: 0.0,
            phase_jump: 0.0,
        });
        out
    }

    /// Instantaneous frequency at `t`.
    pub fn omega_at(&self, t: f64) -> f64 {
        let table = self.resolve();
        let seg = table.iter().rev().find(|s| s.start <= t).unwrap_or(&table[0]);
        seg.omega_at(t)
    }
}

#[derive(Debug, Clone, Copy)]
struct ResolvedSegment {
    start: f64,
    omega_start: f64,
    kappa: f64,
    phase_jump: f64,
}

impl ResolvedSegment {
    fn omega_at(&self, t: f64) -> f64 {
        self.omega_start + self.kappa * (t - self.start)
    }
}

/// One amplitude level starting at `start` [s].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeStep {
    pub start: f64,
    pub amplitude: f64,
}

/// Piecewise-constant magnitude `Z(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeProfile {
    pub segments: Vec<AmplitudeStep>,
}

impl AmplitudeProfile {
    pub fn constant(amplitude: f64) -> Self {
        Self {
            segments: vec![AmplitudeStep { start: 0.0, amplitude }],
        }
    }

    pub fn steps(levels: &[(f64, f64)]) -> Self {
        Self {
            segments: levels
                .iter()
                .map(|&(start, amplitude)| AmplitudeStep { start, amplitude })
                .collect(),
        }
    }

    pub fn amplitude_at(&self, t: f64) -> f64 {
        self.segments
            .iter()
            .rev()
            .find(|s| s.start <= t)
            .or(self.segments.first())
            .map_or(0.0, |s| s.amplitude)
    }

    pub(crate) fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.segments.is_empty() {
            out.push("amplitude profile has no segments".to_string());
        }
        for (i, s) in self.segments.iter().enumerate() {
            if !(s.amplitude > 0.0 && s.amplitude.is_finite()) {
                out.push(format!("amplitude segment {i}: amplitude must be > 0"));
            }
            if !s.start.is_finite() {
                out.push(format!("amplitude segment {i}: start must be finite"));
            }
        }
        if self.segments.windows(2).any(|w| w[1].start <= w[0].start) {
            out.push("amplitude segments must have increasing start times".to_string());
        }
        out
    }
}

/// Interval during which the measurement freezes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossWindow {
    pub start: f64,
    pub duration: f64,
}

impl LossWindow {
    pub fn contains(&self, t: f64) -> bool {
        t >= self.start && t < self.start + self.duration
    }

    pub fn end(&self) -> f64 {
        self.start + self.duration
    }
}

/// Additive disturbances and measurement dropouts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DisturbanceConfig {
    /// Standard deviation of the band-limited zero-mean noise, per channel.
    pub noise_std: f64,
    /// Noise corner frequency [rad/s]; `None` means `1/(10·dt)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_corner: Option<f64>,
    /// Third-harmonic amplitude relative to the fundamental.
    pub harmonic3_ratio: f64,
    /// Phase of the third harmonic relative to `3θ` [rad].
    pub harmonic3_phase: f64,
    /// Mean number of notch spikes per second.
    pub notch_rate: f64,
    pub notch_amplitude: f64,
    pub data_loss_windows: Vec<LossWindow>,
    pub rng_seed: u64,
}

impl Default for DisturbanceConfig {
    fn default() -> Self {
        Self {
            noise_std: 0.0,
            noise_corner: None,
            harmonic3_ratio: 0.0,
            harmonic3_phase: 0.0,
            notch_rate: 0.0,
            notch_amplitude: 0.0,
            data_loss_windows: Vec::new(),
            rng_seed: 0,
        }
    }
}

impl DisturbanceConfig {
    pub fn clean() -> Self {
        Self::default()
    }

    pub(crate) fn violations(&self, t_end: f64) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            out.push("noise_std must be >= 0".to_string());
        }
        if let Some(c) = self.noise_corner {
            if !(c > 0.0 && c.is_finite()) {
                out.push("noise_corner must be > 0".to_string());
            }
        }
        if !(0.0..=0.5).contains(&self.harmonic3_ratio) {
            out.push("harmonic3_ratio must lie in [0, 0.5]".to_string());
        }
        if !self.harmonic3_phase.is_finite() {
            out.push("harmonic3_phase must be finite".to_string());
        }
        if !(self.notch_rate >= 0.0 && self.notch_rate.is_finite()) {
            out.push("notch_rate must be >= 0".to_string());
        }
        if !self.notch_amplitude.is_finite() {
            out.push("notch_amplitude must be finite".to_string());
        }
        for (i, w) in self.data_loss_windows.iter().enumerate() {
            if !(w.duration > 0.0) || !(w.start >= 0.0) || !(w.end() <= t_end) {
                out.push(format!(
                    "data-loss window {i} [{}, {}) must have positive length and lie within [0, {t_end}]",
                    w.start,
                    w.end()
                ));
            }
        }
        let mut sorted = self.data_loss_windows.clone();
        sorted.sort_by(|a, b| a.start.total_cmp(&b.start));
        for pair in sorted.windows(2) {
            if pair[1].start < pair[0].end() {
                out.push(format!(
                    "data-loss windows starting at {} and {} overlap",
                    pair[0].start, pair[1].start
                ));
            }
        }
        out
    }
}

/// A generated sample together with the ground truth it was built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratedSample {
    pub sample: ThreePhaseSample,
    pub omega_true: f64,
    /// True phase wrapped into `[0, 2π)`.
    pub theta_true: f64,
}

/// Deterministic three-phase signal source.
#[derive(Debug, Clone)]
pub struct SignalGenerator {
    frequency: FrequencyProfile,
    amplitude: AmplitudeProfile,
    disturbance: DisturbanceConfig,
    dt: f64,
    t_end: f64,
}

impl SignalGenerator {
    pub fn new(
        frequency: FrequencyProfile,
        amplitude: AmplitudeProfile,
        disturbance: DisturbanceConfig,
        dt: f64,
        t_end: f64,
    ) -> Result<Self> {
        let mut v = Vec::new();
        if !(dt > 0.0 && dt.is_finite()) {
            v.push("dt must be > 0".to_string());
        }
        if !(t_end > dt && t_end.is_finite()) {
            v.push("run length must exceed dt".to_string());
        }
        v.extend(frequency.violations());
        v.extend(amplitude.violations());
        v.extend(disturbance.violations(t_end));
        if !v.is_empty() {
            return Err(Error::Config(v));
        }
        Ok(Self {
            frequency,
            amplitude,
            disturbance,
            dt,
            t_end,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of samples on `[0, t_end)`.
    pub fn len(&self) -> usize {
        (self.t_end / self.dt - 1e-9).ceil() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> GeneratorIter<'_> {
        let corner = self.disturbance.noise_corner.unwrap_or(1.0 / (10.0 * self.dt));
        let pole = (-corner * self.dt).exp();
        let white_std = self.disturbance.noise_std * ((1.0 + pole) / (1.0 - pole)).sqrt();
        let mut noise_rng = ChaCha8Rng::seed_from_u64(self.disturbance.rng_seed);
        noise_rng.set_stream(1);
        let mut notch_rng = ChaCha8Rng::seed_from_u64(self.disturbance.rng_seed);
        notch_rng.set_stream(2);
        // start the noise filters in their stationary distribution
        let noise_state = [0; 3].map(|_| {
            let g: f64 = noise_rng.sample(StandardNormal);
            g * self.disturbance.noise_std
        });
        GeneratorIter {
            gen: self,
            table: self.frequency.resolve(),
            seg: 0,
            k: 0,
            n: self.len(),
            theta: self.frequency.theta0.rem_euclid(TAU),
            pole,
            white_std,
            noise_state,
            noise_rng,
            notch_rng,
            notch_sign: 1.0,
            held: None,
        }
    }

    pub fn generate(&self) -> Vec<GeneratedSample> {
        self.iter().collect()
    }
}

pub struct GeneratorIter<'a> {
    gen: &'a SignalGenerator,
    table: Vec<ResolvedSegment>,
    seg: usize,
    k: usize,
    n: usize,
    theta: f64,
    pole: f64,
    white_std: f64,
    noise_state: [f64; 3],
    noise_rng: ChaCha8Rng,
    notch_rng: ChaCha8Rng,
    notch_sign: f64,
    held: Option<[f64; 3]>,
}

impl Iterator for GeneratorIter<'_> {
    type Item = GeneratedSample;

    fn next(&mut self) -> Option<GeneratedSample> {
        if self.k >= self.n {
            return None;
        }
        let g = self.gen;
        let d = &g.disturbance;
        let t = self.k as f64 * g.dt;
        while self.seg + 1 < self.table.len() && self.table[self.seg + 1].start <= t + 1e-12 * g.dt {
            self.seg += 1;
            self.theta = (self.theta + self.table[self.seg].phase_jump).rem_euclid(TAU);
        }
        let omega = self.table[self.seg].omega_at(t);
        let theta = self.theta;
        let z = g.amplitude.amplitude_at(t);

        let mut ch = [0.0; 3];
        for (n, shift) in PHASE_SHIFT.iter().enumerate() {
            let mut v = (theta - shift).cos();
            if d.harmonic3_ratio > 0.0 {
                v += d.harmonic3_ratio * (3.0 * (theta - shift) + d.harmonic3_phase).cos();
            }
            ch[n] = z * v;
        }
        if d.noise_std > 0.0 {
            for (c, y) in ch.iter_mut().zip(self.noise_state.iter_mut()) {
                let w: f64 = self.noise_rng.sample(StandardNormal);
                *y = self.pole * *y + (1.0 - self.pole) * self.white_std * w;
                *c += *y;
            }
        }
        if d.notch_rate > 0.0 {
            let p = 1.0 - (-d.notch_rate * g.dt).exp();
            if self.notch_rng.random::<f64>() < p {
                let which = self.notch_rng.random_range(0..3);
                ch[which] += self.notch_sign * d.notch_amplitude;
                self.notch_sign = -self.notch_sign;
            }
        }

        let lost = d.data_loss_windows.iter().any(|w| w.contains(t));
        let sample = if lost {
            let [za, zb, zc] = self.held.unwrap_or([0.0; 3]);
            ThreePhaseSample {
                t,
                za,
                zb,
                zc,
                valid: false,
            }
        } else {
            self.held = Some(ch);
            ThreePhaseSample::new(t, ch[0], ch[1], ch[2])
        };

        self.theta = (self.theta + omega * g.dt).rem_euclid(TAU);
        self.k += 1;
        Some(GeneratedSample {
            sample,
            omega_true: omega,
            theta_true: theta,
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rest = self.n - self.k;
        (rest, Some(rest))
    }
}

impl ExactSizeIterator for GeneratorIter<'_> {}

/// Writes `t,za,zb,zc,valid,omega_true,theta_true` rows.
pub fn write_signal_csv<W: Write>(mut w: W, samples: &[GeneratedSample]) -> std::io::Result<()> {
    writeln!(w, "t,za,zb,zc,valid,omega_true,theta_true")?;
    for g in samples {
        let s = &g.sample;
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            s.t,
            s.za,
            s.zb,
            s.zc,
            u8::from(s.valid),
            g.omega_true,
            g.theta_true
        )?;
    }
    Ok(())
}
