//! Time-series CSV export.

use std::io::Write;
use std::path::Path;

use crate::error::GnrError;
use crate::fem::solve::TimeSeriesRow;

pub const CSV_HEADER: &str =
    "time_days,fx_min,fx_max,fz_min,fz_max,mean_rho_co0,mean_J,newton_iters";

/// Format a float with 17 significant digits so a reader recovers the
/// exact f64 (locale-independent decimal point).
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Serialize the rows (header always present; one line per accepted step).
pub fn format_timeseries(rows: &[TimeSeriesRow]) -> Result<String, GnrError> {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let mut prev = f64::NEG_INFINITY;
    for r in rows {
        if r.time_days < prev {
            return Err(GnrError::Config(format!(
                "time series not monotone at t = {}",
                r.time_days
            )));
        }
        prev = r.time_days;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            num(r.time_days),
            num(r.fx_min),
            num(r.fx_max),
            num(r.fz_min),
            num(r.fz_max),
            num(r.mean_rho_co0),
            num(r.mean_j),
            r.newton_iters
        ));
    }
    Ok(out)
}

pub fn write_timeseries_csv(rows: &[TimeSeriesRow], path: &Path) -> Result<(), GnrError> {
    let text = format_timeseries(rows)?;
    let mut f = std::fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

/// Parse a time-series CSV written by [`format_timeseries`].
pub fn parse_timeseries(text: &str) -> Result<Vec<TimeSeriesRow>, GnrError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        other => {
            return Err(GnrError::Config(format!(
                "bad CSV header: {:?}",
                other.unwrap_or("")
            )))
        }
    }
    let mut rows = Vec::new();
    for (ln, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 8 {
            return Err(GnrError::Config(format!(
                "CSV line {}: expected 8 fields",
                ln + 2
            )));
        }
        let p = |s: &str| -> Result<f64, GnrError> {
            s.trim()
                .parse()
                .map_err(|_| GnrError::Config(format!("CSV line {}: bad number '{s}'", ln + 2)))
        };
        rows.push(TimeSeriesRow {
            time_days: p(f[0])?,
            fx_min: p(f[1])?,
            fx_max: p(f[2])?,
            fz_min: p(f[3])?,
            fz_max: p(f[4])?,
            mean_rho_co0: p(f[5])?,
            mean_j: p(f[6])?,
            newton_iters: f[7].trim().parse().map_err(|_| {
                GnrError::Config(format!("CSV line {}: bad iteration count", ln + 2))
            })?,
        });
    }
    Ok(rows)
}
