//! Report tables: theory limits, worked examples, dataset analysis and the
//! counting curve. CSV output rounds for display; JSON keeps full precision.

mod analyze;
mod curve;
mod theory;

use serde::Serialize;

use crate::error::{Error, Result};

pub use analyze::{analyze, AnalysisReport, Measured, UtilityRow};
pub use curve::{counting_curve, curve_csv, CurvePoint, MAX_CURVE_N};
pub use theory::{theory_csv, worked_csv, worked_examples, WorkedRow};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::BadParams(format!("unknown format {other:?}, expected csv or json"))),
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}
