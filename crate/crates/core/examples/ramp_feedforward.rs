//! Start-up ramp with and without the frequency feed-forward.
//!
//!     cargo run --release --example ramp_feedforward [kappa]

use srfpll::scenario::presets::ramp_startup;
use srfpll::scenario::{run_scenario, FeedForward};

fn main() -> srfpll::Result<()> {
    let kappa: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(100.0);
    let u = (2.0f64 / 3.0).sqrt();
    for ff in [FeedForward::Off, FeedForward::Estimated] {
        let cfg = ramp_startup(kappa, ff);
        let out = run_scenario(&cfg)?;
        let tr = &out.trace;
        let w = tr.window_range(&cfg.windows[0]);
        let loop_err = w.clone().map(|i| -tr.zq[i] / u).sum::<f64>() / w.len() as f64;
        let m = &out.metrics[0];
        println!(
            "{:<28} loop error {loop_err:.5}  E_me {:.4}  E_rms {:.4}",
            m.scenario,
            m.e_me.unwrap_or(f64::NAN),
            m.e_rms
        );
    }
    Ok(())
}
