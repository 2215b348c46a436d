//! Recorded three-phase data from CSV.

use std::path::Path;

use std::f64::consts::TAU;

use crate::error::IngestError;
use crate::pll::wrap_pi;
use crate::scenario::config::ColumnMap;
use crate::signals::{GeneratedSample, LossWindow, ThreePhaseSample};

/// A recorded signal on a uniform grid. Gaps are filled with held, invalid samples.
#[derive(Debug, Clone)]
pub struct IngestedSignal {
    /// Samples; `omega_true`/`theta_true` are NaN when the file has no reference.
    pub samples: Vec<GeneratedSample>,
    /// Median sampling step [s].
    pub dt: f64,
    pub loss_windows: Vec<LossWindow>,
}

pub fn ingest_csv(path: &Path, columns: &ColumnMap, gap_factor: f64) -> Result<IngestedSignal, IngestError> {
    let file = std::fs::File::open(path).map_err(|source| IngestError::Open {
        path: path.display().to_string(),
        source,
    })?;
    ingest_reader(file, columns, gap_factor)
}

/// [`ingest_csv`] over any reader. Row numbers in errors count data rows from 1.
pub fn ingest_reader<R: std::io::Read>(
    r: R,
    columns: &ColumnMap,
    gap_factor: f64,
) -> Result<IngestedSignal, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let headers = rdr
        .headers()
        .map_err(|e| IngestError::Malformed {
            row: 0,
            message: e.to_string(),
        })?
        .clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| IngestError::MissingColumn(name.to_string()))
    };
    let ct = find(&columns.t)?;
    let cabc = [find(&columns.a)?, find(&columns.b)?, find(&columns.c)?];
    let ctheta = columns.theta.as_deref().map(find).transpose()?;
    let comega = columns.omega.as_deref().map(find).transpose()?;

    struct Row {
        t: f64,
        z: [f64; 3],
        theta: f64,
        omega: f64,
    }
    let mut rows: Vec<Row> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| IngestError::Malformed {
            row,
            message: e.to_string(),
        })?;
        let num = |col: usize, name: &str| -> Result<f64, IngestError> {
            let s = rec.get(col).unwrap_or("");
            let v: f64 = s.parse().map_err(|_| IngestError::Malformed {
                row,
                message: format!("`{s}` in column `{name}` is not a number"),
            })?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(IngestError::Malformed {
                    row,
                    message: format!("non-finite value in column `{name}`"),
                })
            }
        };
        let t = num(ct, &columns.t)?;
        let z = [
            num(cabc[0], &columns.a)?,
            num(cabc[1], &columns.b)?,
            num(cabc[2], &columns.c)?,
        ];
        let theta = match ctheta {
            Some(c) => num(c, columns.theta.as_deref().unwrap_or_default())?.rem_euclid(std::f64::consts::TAU),
            None => f64::NAN,
        };
        let omega = match comega {
            Some(c) => num(c, columns.omega.as_deref().unwrap_or_default())?,
            None => f64::NAN,
        };
        if let Some(prev) = rows.last() {
            if !(t > prev.t) {
                return Err(IngestError::NonMonotonic { row, t, prev: prev.t });
            }
        }
        rows.push(Row { t, z, theta, omega });
    }
    if rows.len() < 2 {
        return Err(IngestError::TooShort(rows.len()));
    }

    let mut steps: Vec<f64> = rows.windows(2).map(|w| w[1].t - w[0].t).collect();
    steps.sort_by(f64::total_cmp);
    let dt = steps[steps.len() / 2];

    let mut samples = Vec::with_capacity(rows.len());
    let mut loss_windows = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        if i > 0 {
            let prev = &rows[i - 1];
            let gap = r.t - prev.t;
            if gap > gap_factor * dt {
                let missing = ((gap / dt).round() as usize).saturating_sub(1);
                // reference channels are interpolated, the measurement is held
                let dtheta = wrap_pi(r.theta - prev.theta);
                for j in 1..=missing {
                    let t = prev.t + j as f64 * dt;
                    let f = (t - prev.t) / gap;
                    let [za, zb, zc] = prev.z;
                    samples.push(GeneratedSample {
                        sample: ThreePhaseSample {
                            t,
                            za,
                            zb,
                            zc,
                            valid: false,
                        },
                        omega_true: prev.omega + f * (r.omega - prev.omega),
                        theta_true: (prev.theta + f * interp_span(dtheta, prev.omega, r.omega, gap)).rem_euclid(TAU),
                    });
                }
                if missing > 0 {
                    loss_windows.push(LossWindow {
                        start: prev.t + dt,
                        duration: missing as f64 * dt,
                    });
                }
            }
        }
        samples.push(GeneratedSample {
            sample: ThreePhaseSample::new(r.t, r.z[0], r.z[1], r.z[2]),
            omega_true: r.omega,
            theta_true: r.theta,
        });
    }
    Ok(IngestedSignal {
        samples,
        dt,
        loss_windows,
    })
}

/// Angle advanced across a gap. Whole turns are lost in the wrapped difference,
/// so they are restored from the mean reference frequency when one is recorded.
fn interp_span(dtheta: f64, w0: f64, w1: f64, gap: f64) -> f64 {
    let w = 0.5 * (w0 + w1);
    if w.is_finite() {
        dtheta + TAU * ((w * gap - dtheta) / TAU).round()
    } else {
        dtheta
    }
}
