//! Symmetrical-optimum gains and phase margin for a few values of alpha.
//!
//!     cargo run --example tune_loop

use srfpll::pll::{phase_margin, phase_peak, tune_symmetrical_optimum, TunerInput};

fn main() -> srfpll::Result<()> {
    let tau = 0.00025;
    println!(
        "{:>6} {:>12} {:>12} {:>10} {:>10} {:>10}",
        "alpha", "kp", "ki", "omega_c", "phi_m", "peak at"
    );
    for alpha in [2.0, 4.0, 10.0, 20.0, 40.0, 100.0] {
        let input = TunerInput::new(alpha, tau);
        let (g, wc) = tune_symmetrical_optimum(&input)?;
        let pm = phase_margin(&g, tau, input.plant_gain)?;
        println!(
            "{alpha:>6} {:>12.4} {:>12.4} {wc:>10.2} {:>10.4} {:>10.2}",
            g.kp,
            g.ki,
            pm.phi_m_deg,
            phase_peak(&g, tau)
        );
    }
    Ok(())
}
