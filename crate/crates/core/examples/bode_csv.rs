//! Open-loop Bode data of the tuned loop, written as CSV.
//!
//!     cargo run --example bode_csv > bode.csv

use srfpll::pll::{bode_sweep, tune_symmetrical_optimum, write_bode_csv, TunerInput};

fn main() -> srfpll::Result<()> {
    let input = TunerInput::new(40.0, 0.00025);
    let (gains, _) = tune_symmetrical_optimum(&input)?;
    let points = bode_sweep(&gains, input.tau, input.plant_gain, 0.1, 1e5, 300)?;
    write_bode_csv(std::io::stdout().lock(), &points)?;
    Ok(())
}
