use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::error::CliResult;

/// Float with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Buffered writer on `path`, or standard output when `path` is `None` or `-`.
pub fn sink(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    match path {
        Some(p) if p != Path::new("-") => Ok(Box::new(BufWriter::new(File::create(p)?))),
        _ => Ok(Box::new(BufWriter::new(io::stdout()))),
    }
}

pub fn csv_writer(path: Option<&Path>) -> CliResult<csv::Writer<Box<dyn Write>>> {
    Ok(csv::Writer::from_writer(sink(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for x in [
            0.1,
            1.0 / 3.0,
            2.0f64.sqrt() * 1e-300,
            -7.25e12,
            f64::MIN_POSITIVE,
            0.0,
        ] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
    }
}
