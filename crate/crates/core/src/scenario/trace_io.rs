//! Trace CSV: `t,za,zb,zc,valid,omega_true,theta_true,omega_tilde,omega_star,theta_star,zq,zbar_a,zbar_a_star`.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::metrics::{MetricSummary, RunTrace};

pub const TRACE_HEADER: &str =
    "t,za,zb,zc,valid,omega_true,theta_true,omega_tilde,omega_star,theta_star,zq,zbar_a,zbar_a_star";

pub fn write_trace_csv<W: Write>(w: W, trace: &RunTrace) -> std::io::Result<()> {
    let mut w = std::io::BufWriter::new(w);
    writeln!(w, "{TRACE_HEADER}")?;
    for i in 0..trace.len() {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            trace.t[i],
            trace.za[i],
            trace.zb[i],
            trace.zc[i],
            u8::from(trace.valid[i]),
            trace.omega_true[i],
            trace.theta_true[i],
            trace.omega_tilde[i],
            trace.omega_star[i],
            trace.theta_star[i],
            trace.zq[i],
            trace.zbar_a[i],
            trace.zbar_a_star[i],
        )?;
    }
    w.flush()
}

/// Reads a trace written by [`write_trace_csv`]. Columns are located by name.
pub fn read_trace_csv<R: Read>(r: R) -> Result<RunTrace> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let headers = rdr.headers().map_err(|e| Error::Metric(e.to_string()))?.clone();
    let names: Vec<&str> = TRACE_HEADER.split(',').collect();
    let idx: Vec<usize> = names
        .iter()
        .map(|n| {
            headers
                .iter()
                .position(|h| h == *n)
                .ok_or_else(|| Error::Metric(format!("trace is missing column `{n}`")))
        })
        .collect::<Result<_>>()?;
    let mut tr = RunTrace::default();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Metric(format!("row {}: {e}", row + 1)))?;
        let num = |col: usize| -> Result<f64> {
            let s = rec.get(idx[col]).unwrap_or("");
            s.parse::<f64>().map_err(|_| {
                Error::Metric(format!(
                    "row {}: `{s}` in column {} is not a number",
                    row + 1,
                    names[col]
                ))
            })
        };
        let valid = match rec.get(idx[4]).unwrap_or("") {
            "1" | "true" => true,
            "0" | "false" => false,
            other => return Err(Error::Metric(format!("row {}: bad valid flag `{other}`", row + 1))),
        };
        tr.t.push(num(0)?);
        tr.za.push(num(1)?);
        tr.zb.push(num(2)?);
        tr.zc.push(num(3)?);
        tr.valid.push(valid);
        tr.omega_true.push(num(5)?);
        tr.theta_true.push(num(6)?);
        tr.omega_tilde.push(num(7)?);
        tr.omega_star.push(num(8)?);
        tr.theta_star.push(num(9)?);
        tr.zq.push(num(10)?);
        tr.zbar_a.push(num(11)?);
        tr.zbar_a_star.push(num(12)?);
    }
    tr.check()?;
    Ok(tr)
}

/// Pretty JSON array of metric records, newline terminated.
pub fn metrics_json(metrics: &[MetricSummary]) -> String {
    let mut s = serde_json::to_string_pretty(metrics).expect("metric summaries always serialize");
    s.push('\n');
    s
}
