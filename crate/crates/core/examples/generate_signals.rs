//! Synthetic three-phase input with a frequency ramp, amplitude steps, noise,
//! a third harmonic, notches and a measurement dropout.
//!
//!     cargo run --example generate_signals > signal.csv

use srfpll::signals::{
    write_signal_csv, AmplitudeProfile, DisturbanceConfig, FrequencyProfile, LossWindow, SegmentKind, SignalGenerator,
};

fn main() -> srfpll::Result<()> {
    let freq = FrequencyProfile::constant(50.0, 0.5).then(
        0.5,
        SegmentKind::Ramp {
            kappa: 100.0,
            from: None,
        },
    );
    let amp = AmplitudeProfile::steps(&[(0.0, 1.0), (0.3, 0.6), (0.7, 1.2)]);
    let dist = DisturbanceConfig {
        noise_std: 0.02,
        harmonic3_ratio: 0.1,
        notch_rate: 20.0,
        notch_amplitude: 0.3,
        data_loss_windows: vec![LossWindow {
            start: 0.6,
            duration: 0.02,
        }],
        rng_seed: 3,
        ..Default::default()
    };
    let gen = SignalGenerator::new(freq, amp, dist, 0.00025, 1.0)?;
    let samples = gen.generate();
    let lost = samples.iter().filter(|g| !g.sample.valid).count();
    eprintln!("{} samples, {lost} flagged invalid", samples.len());
    write_signal_csv(std::io::stdout().lock(), &samples)?;
    Ok(())
}
