//! Batch reports behind the `isotube` command line: per-radius, per-sample
//! tube analyses, tube classification and the verification battery.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration error,
//! 3 numerical failure.

mod analyze;
mod config;
mod output;
mod verify;

use serde::{Serialize, Serializer};
use thiserror::Error;

pub use analyze::{cmd_analyze, cmd_classify, cmd_sweep, ClassifyReport, TubeReport, TubeRow};
pub use config::{parse_config, AnalysisConfig, OutputFormat, Wperp, DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TOL};
pub use output::{render_classify, render_tube_report, render_verify};
pub use verify::{cmd_verify, default_battery, Failure, SuiteResult, VerifyReport, VerifySettings, DEFAULT_RADII, SPECTRUM_TOL};

/// Orientation recorded in every report.
pub const ORIENTATION: &str = "S^r = D'(r) D(r)^-1, shape operator with respect to -gamma_xi'(r)";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReportError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl ReportError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ReportError::Config(_) => 2,
            ReportError::Numerical(_) => 3,
        }
    }
}

/// Debug hooks for mutation checks of the verification suite.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FaultInjection {
    /// Negates `S^r` after it is computed.
    pub flip_shape_sign: bool,
}

/// A float written with 17 significant digits in JSON.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Num {
    pub fn json_text(&self) -> String {
        if self.0.is_finite() {
            format!("{:.16e}", self.0)
        } else {
            "null".to_string()
        }
    }

    /// 12 significant digits, as used in CSV.
    pub fn csv_text(&self) -> String {
        if self.0.is_finite() {
            format!("{:.11e}", self.0)
        } else {
            "nan".to_string()
        }
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let raw = serde_json::value::RawValue::from_string(self.json_text()).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

pub(crate) fn nums(values: &[f64]) -> Vec<Num> {
    values.iter().copied().map(Num).collect()
}
