//! 50 rad/s load-step run with a 0.05 s measurement dropout: the estimate is
//! frozen while samples are invalid and the angle coasts.
//!
//!     cargo run --release --example data_loss_recovery

use srfpll::pll::wrap_pi;
use srfpll::scenario::presets::load_step;
use srfpll::scenario::{run_scenario, FeedForward, LossPolicy};

fn main() -> srfpll::Result<()> {
    for policy in [LossPolicy::Coast, LossPolicy::Track] {
        let mut cfg = load_step(50.0, FeedForward::Estimated);
        cfg.loss_policy = policy;
        let tr = run_scenario(&cfg)?.trace;
        let last_lost = (0..tr.len())
            .rfind(|&i| !tr.valid[i])
            .expect("preset has a loss window");
        println!("{policy:?}: data restored at t = {:.4} s", tr.t[last_lost + 1]);
        for periods in [0.0, 0.5, 1.0, 2.0, 5.0] {
            let i = last_lost + 1 + (periods * 2.0 * std::f64::consts::PI / 50.0 / cfg.dt) as usize;
            let err = wrap_pi(tr.theta_star[i] - tr.theta_true[i]);
            println!(
                "  +{periods:3.1} periods: dtheta = {err:+.4} rad, estimate {:.3} rad/s",
                tr.omega_tilde[i]
            );
        }
    }
    Ok(())
}
