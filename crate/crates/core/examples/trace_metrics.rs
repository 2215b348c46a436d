//! Metrics recomputed from a trace CSV over chosen windows, wrapped and raw.
//!
//!     cargo run --release --example trace_metrics [trace.csv]

use srfpll::metrics::{summarize, PhaseErrorMode, Window};
use srfpll::scenario::{preset, read_trace_csv, run_scenario, FeedForward};

fn main() -> srfpll::Result<()> {
    let trace = match std::env::args().nth(1) {
        Some(p) => read_trace_csv(std::fs::File::open(p)?)?,
        None => {
            // round trip through the CSV format
            let out = run_scenario(&preset("load-step-150", FeedForward::Estimated).expect("built-in preset"))?;
            read_trace_csv(out.trace_csv().as_slice())?
        }
    };
    let end = trace.full_window().end;
    for w in [Window::new(0.0, end), Window::new(0.0, 0.5), Window::new(1.0, end)] {
        for mode in [PhaseErrorMode::Wrapped, PhaseErrorMode::Raw] {
            let m = summarize(&trace, "trace", &w, mode)?;
            println!(
                "[{:6.3}, {:6.3}) {:<8} K = {:6}  E_sigma = {:12.4}  E_me = {:.6}  E_rms = {:.5}",
                w.start,
                w.end,
                format!("{mode:?}"),
                m.k,
                m.e_sigma.unwrap_or(f64::NAN),
                m.e_me.unwrap_or(f64::NAN),
                m.e_rms
            );
        }
    }
    Ok(())
}
