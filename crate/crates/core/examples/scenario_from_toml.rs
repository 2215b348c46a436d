//! A scenario written as TOML, validated and run. Pass a path to run your own.
//!
//!     cargo run --release --example scenario_from_toml [scenario.toml]

use srfpll::scenario::{run_scenario, ScenarioConfig};

const SCENARIO: &str = r#"
name = "acceleration"
duration = 3.0
feedforward = "estimated"

[signal.synthetic.frequency]
theta0 = 0.0

[[signal.synthetic.frequency.segments]]
duration = 1.0
kind = "constant"
omega = 80.0

[[signal.synthetic.frequency.segments]]
duration = 2.0
kind = "ramp"
kappa = 150.0

[signal.synthetic.amplitude]
segments = [{ start = 0.0, amplitude = 1.0 }, { start = 2.0, amplitude = 0.4 }]

[signal.synthetic.disturbance]
noise_std = 0.02
harmonic3_ratio = 0.05
rng_seed = 11

[tuner]
kind = "symmetrical-optimum"
alpha = 40.0
tau = 0.00025

[estimator]
gamma = 4000.0
omega_init = 120.0

[[windows]]
start = 2.0
end = 3.0
"#;

fn main() -> srfpll::Result<()> {
    let cfg = match std::env::args().nth(1) {
        Some(p) => ScenarioConfig::from_file(p.as_ref())?,
        None => ScenarioConfig::from_toml_str(SCENARIO)?,
    };
    cfg.validate()?;
    let out = run_scenario(&cfg)?;
    print!("{}", out.metrics_json());
    Ok(())
}
