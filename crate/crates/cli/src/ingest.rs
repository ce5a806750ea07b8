//! Price CSV ingestion.
//!
//! Files have a header row with a time column (`time` in days, or `index`
//! with the spacing given separately) and either a `price` or a `logprice`
//! column. Prices are converted to natural logs.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use charvol::SampledPath;

use crate::error::{CliError, CliResult};

/// Relative tolerance on grid spacing.
pub const SPACING_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueColumn {
    Price,
    LogPrice,
}

impl ValueColumn {
    fn name(self) -> &'static str {
        match self {
            ValueColumn::Price => "price",
            ValueColumn::LogPrice => "logprice",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestOptions {
    pub time_column: String,
    /// `None` picks `logprice` if present, otherwise `price`.
    pub value: Option<ValueColumn>,
    /// Grid spacing in days; overrides the spacing of the time column.
    pub delta: Option<f64>,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            time_column: "time".into(),
            value: None,
            delta: None,
        }
    }
}

/// One parsed input row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceCsvRow {
    pub time: f64,
    pub logprice: f64,
}

pub fn ingest_csv(path: &Path, opts: &IngestOptions) -> CliResult<SampledPath> {
    let file = File::open(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    ingest_reader(file, opts)
}

pub fn ingest_reader<R: Read>(reader: R, opts: &IngestOptions) -> CliResult<SampledPath> {
    if let Some(d) = opts.delta {
        if !(d > 0.0 && d.is_finite()) {
            return Err(CliError::Config(format!(
                "--delta must be positive, got {d}"
            )));
        }
    }
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let time_idx = find(&opts.time_column)
        .ok_or_else(|| CliError::Data(format!("missing time column '{}'", opts.time_column)))?;
    let value = match opts.value {
        Some(v) => v,
        None if find("logprice").is_some() => ValueColumn::LogPrice,
        None => ValueColumn::Price,
    };
    let value_idx = find(value.name())
        .ok_or_else(|| CliError::Data(format!("missing value column '{}'", value.name())))?;
    if opts.time_column.eq_ignore_ascii_case("index") && opts.delta.is_none() {
        return Err(CliError::Config(
            "--delta is required when time is an index column".into(),
        ));
    }

    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let field = |idx: usize, what: &str| -> CliResult<f64> {
            let s = rec.get(idx).unwrap_or("");
            s.parse::<f64>()
                .map_err(|_| CliError::Data(format!("row {i}: cannot parse {what} '{s}'")))
        };
        let time = field(time_idx, "time")?;
        let raw = field(value_idx, value.name())?;
        let logprice = match value {
            ValueColumn::Price if raw > 0.0 => raw.ln(),
            ValueColumn::Price => {
                return Err(CliError::Data(format!("row {i}: nonpositive price {raw}")))
            }
            ValueColumn::LogPrice => raw,
        };
        if !time.is_finite() || !logprice.is_finite() {
            return Err(CliError::Data(format!("row {i}: non-finite value")));
        }
        rows.push(PriceCsvRow { time, logprice });
    }
    if rows.len() < 2 {
        return Err(CliError::Data(format!(
            "need at least 2 rows, got {}",
            rows.len()
        )));
    }
    let step = check_uniform(&rows)?;
    let delta = opts.delta.unwrap_or_else(|| {
        let n = rows.len() - 1;
        let span = (rows[n].time - rows[0].time) / n as f64;
        if span.is_finite() {
            span
        } else {
            step
        }
    });
    let t0 = if opts.delta.is_some() && opts.time_column.eq_ignore_ascii_case("index") {
        rows[0].time * delta
    } else {
        rows[0].time
    };
    let values = rows.iter().map(|r| r.logprice).collect();
    Ok(SampledPath::with_start(values, delta, t0)?)
}

/// Spacing of the first two rows; every later spacing must match it.
fn check_uniform(rows: &[PriceCsvRow]) -> CliResult<f64> {
    let step = rows[1].time - rows[0].time;
    if !(step > 0.0) {
        return Err(CliError::Data(format!(
            "row 1: time does not increase ({} after {})",
            rows[1].time, rows[0].time
        )));
    }
    for (i, w) in rows.windows(2).enumerate().skip(1) {
        let d = w[1].time - w[0].time;
        if (d - step).abs() > SPACING_TOL * step {
            return Err(CliError::Data(format!(
                "row {}: nonuniform grid, spacing {d} differs from {step}",
                i + 1
            )));
        }
    }
    Ok(step)
}
