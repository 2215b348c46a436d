use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use srfpll::metrics::{summarize, PhaseErrorMode, Window};
use srfpll::pll::{bode_sweep, phase_margin, tune_symmetrical_optimum, write_bode_csv, PiGains, TunerInput, SQRT_2_3};
use srfpll::scenario::{
    metrics_json, preset, read_trace_csv, run_scenario, ColumnMap, FeedForward, IngestSource, LoopTuning,
    ScenarioConfig, SignalSource, DEFAULT_GAP_FACTOR, PRESET_NAMES,
};
use srfpll::{Error, Result};

#[derive(Parser)]
#[command(
    name = "srfpll",
    version,
    about = "Three-phase SRF-PLL with feed-forward frequency estimation"
)]
struct Cli {
    /// Print errors as a JSON object on stderr.
    #[arg(long, global = true)]
    error_json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Symmetrical-optimum PI gains, crossover and phase margin.
    Tune(TuneArgs),
    /// Open-loop Bode sweep as CSV (omega,mag_db,phase_deg).
    Bode(BodeArgs),
    /// Run a scenario file or preset; writes trace.csv and metrics.json.
    Simulate(SimArgs),
    /// Recompute metrics from an existing trace CSV.
    Metrics(MetricsArgs),
    /// Run the loop on a recorded CSV file.
    IngestRun(IngestArgs),
}

#[derive(Args)]
struct LoopArgs {
    #[arg(long, default_value_t = 40.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.00025)]
    tau: f64,
    #[arg(long, default_value_t = SQRT_2_3)]
    plant_gain: f64,
}

#[derive(Args)]
struct TuneArgs {
    #[command(flatten)]
    lp: LoopArgs,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BodeArgs {
    #[command(flatten)]
    lp: LoopArgs,
    /// Explicit gains instead of tuning (both required together).
    #[arg(long, requires = "ki")]
    kp: Option<f64>,
    #[arg(long, requires = "kp")]
    ki: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    omega_min: f64,
    #[arg(long, default_value_t = 1e5)]
    omega_max: f64,
    #[arg(long, default_value_t = 400)]
    points: usize,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Disturbance RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// off | estimated | constant:<rad/s>
    #[arg(long)]
    ff: Option<FeedForward>,
    /// Raw (unwrapped) phase error in the metrics.
    #[arg(long = "paper-faithful-metrics")]
    raw_metrics: bool,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, conflicts_with = "preset", required_unless_present_any = ["preset", "list_presets"])]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    list_presets: bool,
    /// Print the resolved config as TOML and exit.
    #[arg(long)]
    dump_config: bool,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct MetricsArgs {
    #[arg(long)]
    trace: PathBuf,
    /// Half-open window `start:end` in seconds; repeatable. Whole trace when absent.
    #[arg(long = "window", value_parser = parse_window)]
    windows: Vec<Window>,
    #[arg(long, default_value = "trace")]
    name: String,
    #[arg(long = "paper-faithful-metrics")]
    raw_metrics: bool,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long)]
    input: PathBuf,
    /// Scenario file supplying loop settings; its signal section is replaced.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "t")]
    t_col: String,
    #[arg(long, default_value = "za")]
    a_col: String,
    #[arg(long, default_value = "zb")]
    b_col: String,
    #[arg(long, default_value = "zc")]
    c_col: String,
    #[arg(long)]
    theta_col: Option<String>,
    #[arg(long)]
    omega_col: Option<String>,
    #[arg(long, default_value_t = DEFAULT_GAP_FACTOR)]
    gap_factor: f64,
    #[arg(long)]
    allow_dt_mismatch: bool,
    #[command(flatten)]
    run: RunArgs,
}

fn parse_window(s: &str) -> std::result::Result<Window, String> {
    let (a, b) = s.split_once(':').ok_or("expected start:end")?;
    let start: f64 = a.trim().parse().map_err(|_| format!("bad start `{a}`"))?;
    let end: f64 = b.trim().parse().map_err(|_| format!("bad end `{b}`"))?;
    if start >= end || start.is_nan() || end.is_nan() {
        return Err("window start must be below end".into());
    }
    Ok(Window::new(start, end))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if cli.error_json {
                let mut v = json!({ "error": e.kind(), "exit_code": e.exit_code(), "message": e.to_string() });
                if let Error::Config(list) = &e {
                    v["violations"] = json!(list);
                }
                eprintln!("{v}");
            } else {
                eprintln!("srfpll: {e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Tune(a) => tune(a),
        Cmd::Bode(a) => bode(a),
        Cmd::Simulate(a) => simulate(a),
        Cmd::Metrics(a) => metrics(a),
        Cmd::IngestRun(a) => ingest_run(a),
    }
}

fn tuner_input(lp: &LoopArgs) -> TunerInput {
    TunerInput::new(lp.alpha, lp.tau).with_plant_gain(lp.plant_gain)
}

fn tune(a: TuneArgs) -> Result<()> {
    let input = tuner_input(&a.lp);
    let (g, wc) = tune_symmetrical_optimum(&input)?;
    let pm = phase_margin(&g, input.tau, input.plant_gain)?;
    if a.json {
        let v = json!({
            "kp": g.kp, "ki": g.ki, "omega_c": wc,
            "phi_m_deg": pm.phi_m_deg, "omega_c_numeric": pm.omega_c,
        });
        println!("{}", serde_json::to_string_pretty(&v).expect("json"));
    } else {
        println!("kp        = {:.6}", g.kp);
        println!("ki        = {:.6}", g.ki);
        println!("omega_c   = {wc:.6} rad/s");
        println!("phi_m     = {:.4} deg (at {:.4} rad/s)", pm.phi_m_deg, pm.omega_c);
    }
    Ok(())
}

fn bode(a: BodeArgs) -> Result<()> {
    let input = tuner_input(&a.lp);
    let gains = match (a.kp, a.ki) {
        (Some(kp), Some(ki)) => PiGains::new(kp, ki),
        _ => tune_symmetrical_optimum(&input)?.0,
    };
    let pts = bode_sweep(&gains, input.tau, input.plant_gain, a.omega_min, a.omega_max, a.points)?;
    match a.out {
        Some(p) => write_bode_csv(std::fs::File::create(p)?, &pts)?,
        None => write_bode_csv(std::io::stdout().lock(), &pts)?,
    }
    Ok(())
}

fn apply_run_args(mut cfg: ScenarioConfig, r: &RunArgs) -> ScenarioConfig {
    if let Some(seed) = r.seed {
        cfg = cfg.with_seed(seed);
    }
    if let Some(ff) = r.ff {
        cfg = cfg.with_feedforward(ff);
    }
    if r.raw_metrics {
        cfg.metric_mode = PhaseErrorMode::Raw;
    }
    cfg
}

fn run_and_write(cfg: &ScenarioConfig, out: &Path) -> Result<()> {
    let res = run_scenario(cfg)?;
    res.write_to(out, cfg)?;
    print!("{}", res.metrics_json());
    Ok(())
}

fn simulate(a: SimArgs) -> Result<()> {
    if a.list_presets {
        for p in PRESET_NAMES {
            println!("{p}");
        }
        return Ok(());
    }
    let cfg = match (&a.config, &a.preset) {
        (Some(path), _) => ScenarioConfig::from_file(path)?,
        (None, Some(name)) => preset(name, a.run.ff.unwrap_or_default())
            .ok_or_else(|| Error::config(format!("unknown preset `{name}`; known: {}", PRESET_NAMES.join(", "))))?,
        (None, None) => return Err(Error::config("either --config or --preset is required")),
    };
    let cfg = apply_run_args(cfg, &a.run);
    if a.dump_config {
        print!("{}", cfg.to_toml_string());
        return Ok(());
    }
    run_and_write(&cfg, &a.run.out)
}

fn metrics(a: MetricsArgs) -> Result<()> {
    let file = std::fs::File::open(&a.trace)?;
    let trace = read_trace_csv(file)?;
    let mode = if a.raw_metrics {
        PhaseErrorMode::Raw
    } else {
        PhaseErrorMode::Wrapped
    };
    let windows = if a.windows.is_empty() {
        vec![trace.full_window()]
    } else {
        a.windows
    };
    let recs = windows
        .iter()
        .map(|w| summarize(&trace, &a.name, w, mode))
        .collect::<Result<Vec<_>>>()?;
    let text = metrics_json(&recs);
    match a.out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn ingest_run(a: IngestArgs) -> Result<()> {
    let source = SignalSource::Ingest(IngestSource {
        path: a.input.clone(),
        columns: ColumnMap {
            t: a.t_col,
            a: a.a_col,
            b: a.b_col,
            c: a.c_col,
            theta: a.theta_col,
            omega: a.omega_col,
        },
        gap_factor: a.gap_factor,
    });
    let mut cfg = match &a.config {
        Some(p) => ScenarioConfig::from_file(p)?,
        None => {
            let mut c = preset("load-step-50", FeedForward::Estimated).expect("built-in preset");
            c.name = a
                .input
                .file_stem()
                .map_or("ingest".into(), |s| s.to_string_lossy().into_owned());
            c.duration = None;
            c.windows.clear();
            c.tuner = LoopTuning::reference();
            c
        }
    };
    cfg.signal = source;
    cfg.allow_dt_mismatch |= a.allow_dt_mismatch;
    let cfg = apply_run_args(cfg, &a.run);
    run_and_write(&cfg, &a.run.out)
}
