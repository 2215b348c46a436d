//! Running the loop on a recorded CSV file. A recording with a dropout is
//! written first, then ingested with renamed columns.
//!
//!     cargo run --release --example ingest_recording [file.csv]

use std::path::PathBuf;

use srfpll::scenario::{ingest_csv, preset, run_scenario, ColumnMap, FeedForward, IngestSource, SignalSource};

fn write_demo(path: &PathBuf) -> std::io::Result<()> {
    let mut text = String::from("time,ia,ib,ic,angle\n");
    for k in 0..12_000usize {
        // 40 ms of missing rows
        if (4000..4160).contains(&k) {
            continue;
        }
        let t = k as f64 * 0.00025;
        let th = 60.0 * t + 10.0 * t * t;
        let ph = |n: f64| 5.0 * (th - n * std::f64::consts::TAU / 3.0).cos();
        text.push_str(&format!("{t},{},{},{},{th}\n", ph(0.0), ph(1.0), ph(2.0)));
    }
    std::fs::write(path, text)
}

fn main() -> srfpll::Result<()> {
    let path = match std::env::args().nth(1) {
        Some(p) => PathBuf::from(p),
        None => {
            let p = std::env::temp_dir().join("srfpll_demo_recording.csv");
            write_demo(&p)?;
            p
        }
    };
    let columns = ColumnMap {
        t: "time".into(),
        a: "ia".into(),
        b: "ib".into(),
        c: "ic".into(),
        theta: Some("angle".into()),
        omega: None,
    };
    let sig = ingest_csv(&path, &columns, 1.5)?;
    println!(
        "{} samples at dt = {} s, loss windows: {:?}",
        sig.samples.len(),
        sig.dt,
        sig.loss_windows
    );

    let mut cfg = preset("load-step-50", FeedForward::Estimated).expect("built-in preset");
    cfg.name = "recording".into();
    cfg.duration = None;
    cfg.windows.clear();
    cfg.signal = SignalSource::Ingest(IngestSource {
        path,
        columns,
        gap_factor: 1.5,
    });
    let out = run_scenario(&cfg)?;
    print!("{}", out.metrics_json());
    Ok(())
}
