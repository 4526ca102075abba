//! Bundled experimental collagen-density dataset.
//!
//! Mean areal collagen density of tissue-engineered strips measured after
//! 7, 14, 21, and 28 days of in vitro maturation, with the reported
//! low/high error-bar bounds. The values are digitized plot coordinates
//! and shipped as data of record.

use crate::error::GnrError;

/// One measurement: day, mean density, and error-bar bounds (ug/mm^3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetRow {
    pub day: f64,
    pub mean: f64,
    pub low: f64,
    pub high: f64,
}

/// Experimental density curve with error bars.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentalDataset {
    pub rows: Vec<DatasetRow>,
}

/// CSV asset carrying the digitized measurements.
pub const BUNDLED_CSV: &str = include_str!("../assets/experimental_density.csv");

impl ExperimentalDataset {
    /// The bundled measurements (days 7, 14, 21, 28).
    pub fn bundled() -> Self {
        Self::from_csv(BUNDLED_CSV).expect("bundled dataset must parse")
    }

    /// Parse `day,mean,low,high` rows (one header line).
    pub fn from_csv(text: &str) -> Result<Self, GnrError> {
        let mut rows = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || ln == 0 {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(GnrError::Config(format!(
                    "dataset line {}: expected 4 comma-separated fields, got {}",
                    ln + 1,
                    fields.len()
                )));
            }
            let mut vals = [0.0f64; 4];
            for (i, f) in fields.iter().enumerate() {
                vals[i] = f.trim().parse().map_err(|_| {
                    GnrError::Config(format!("dataset line {}: bad number '{f}'", ln + 1))
                })?;
            }
            rows.push(DatasetRow {
                day: vals[0],
                mean: vals[1],
                low: vals[2],
                high: vals[3],
            });
        }
        let ds = ExperimentalDataset { rows };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<(), GnrError> {
        let mut prev_day = f64::NEG_INFINITY;
        for r in &self.rows {
            if !(r.low <= r.mean && r.mean <= r.high) {
                return Err(GnrError::Config(format!(
                    "dataset day {}: bounds must satisfy low <= mean <= high \
                     (got {} <= {} <= {})",
                    r.day, r.low, r.mean, r.high
                )));
            }
            if r.day <= prev_day {
                return Err(GnrError::Config(format!(
                    "dataset days must be strictly ascending (day {})",
                    r.day
                )));
            }
            prev_day = r.day;
        }
        Ok(())
    }
}
