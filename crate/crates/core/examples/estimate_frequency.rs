//! The averaged three-phase frequency estimator on its own: acquisition from
//! 120 rad/s, the ripple bound and the fitted decay rate.
//!
//!     cargo run --example estimate_frequency

use srfpll::estimator::{convergence_bound, fit_decay_rate, EstimatorConfig, ThreePhaseEstimator};
use srfpll::signals::{normalize, ThreePhaseSample};

fn main() -> srfpll::Result<()> {
    let (dt, omega) = (0.00025, 50.0);
    let cfg = EstimatorConfig::new(4000.0, 120.0);
    let mut est = ThreePhaseEstimator::new(cfg);
    let mut trace = Vec::new();
    for k in 0..(3.0 / dt) as usize {
        let t = k as f64 * dt;
        let s = normalize(&ThreePhaseSample::balanced(t, 1.0, omega * t));
        trace.push(est.step(&s, dt)?);
    }
    for t in [0.0, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 2.999] {
        let w = trace[(t / dt) as usize];
        println!(
            "t = {t:5.3} s  estimate = {w:8.4} rad/s  error = {:+.3} %",
            100.0 * (w - omega) / omega
        );
    }
    let beta = convergence_bound(cfg.gamma, (2.0f64 / 3.0).sqrt(), omega, 0.0)?;
    println!("bound beta = {beta:.3} 1/s");
    match fit_decay_rate(&trace, dt, omega, 1e-4) {
        Some(fit) => println!(
            "fitted decay rate = {:.3} 1/s over {} half periods",
            fit.rate, fit.points
        ),
        None => println!("too few points to fit a decay"),
    }
    Ok(())
}
