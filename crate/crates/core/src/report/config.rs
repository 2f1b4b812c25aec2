//! Analysis configuration: a flat TOML document.
//!
//! ```toml
//! n = 3
//! wperp = "mixed3"            # or [[1, 0, 0, 0], [0, 0, 1, 0]]
//! radii = [0.5, 1.0, 2.0]
//! samples = 100
//! seed = 42
//! tol = 1e-8
//! format = "json"             # or "csv"
//! ```

use std::fmt;
use std::str::FromStr;

use serde::Deserialize;

use super::ReportError;
use crate::model::ModelSpace;
use crate::subspace::{make_subspace, NormalSubspace, Preset};
use crate::tube::RADIUS_GUARD;

pub const DEFAULT_SAMPLES: usize = 100;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!("unknown output format `{other}` (expected json or csv)")),
        }
    }
}

/// Source of `w^⊥`.
#[derive(Debug, Clone, PartialEq)]
pub enum Wperp {
    Preset(Preset),
    /// Raw vectors of `g_α` in the interleaved layout.
    Basis(Vec<Vec<f64>>),
}

impl fmt::Display for Wperp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Wperp::Preset(p) => write!(f, "{p}"),
            Wperp::Basis(b) => write!(f, "explicit({} vectors)", b.len()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub n: usize,
    pub wperp: Wperp,
    pub radii: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub output_format: OutputFormat,
}

impl AnalysisConfig {
    pub fn model(&self) -> Result<ModelSpace, ReportError> {
        ModelSpace::new(self.n).map_err(|e| ReportError::Config(format!("field `n`: {e}")))
    }

    pub fn subspace(&self) -> Result<NormalSubspace, ReportError> {
        let model = self.model()?;
        match &self.wperp {
            Wperp::Preset(p) => p.build(model),
            Wperp::Basis(raw) => make_subspace(model, raw),
        }
        .map_err(|e| ReportError::Config(format!("field `wperp`: {e}")))
    }

    /// Radii in ascending order; errors when empty.
    pub fn sorted_radii(&self) -> Result<Vec<f64>, ReportError> {
        if self.radii.is_empty() {
            return Err(ReportError::Config("field `radii`: at least one radius is required".into()));
        }
        let mut radii = self.radii.clone();
        radii.sort_by(f64::total_cmp);
        Ok(radii)
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawWperp {
    Name(String),
    Basis(Vec<Vec<f64>>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    n: i64,
    wperp: RawWperp,
    #[serde(default)]
    radii: Vec<f64>,
    samples: Option<i64>,
    seed: Option<u64>,
    tol: Option<f64>,
    #[serde(alias = "output_format")]
    format: Option<String>,
}

/// Parses and validates a configuration document, filling defaults.
pub fn parse_config(text: &str) -> Result<AnalysisConfig, ReportError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ReportError::Config(e.to_string()))?;
    if raw.n < 2 {
        return Err(ReportError::Config(format!("field `n`: must be >= 2, got {}", raw.n)));
    }
    let wperp = match raw.wperp {
        RawWperp::Name(name) => Wperp::Preset(
            name.parse::<Preset>()
                .map_err(|e| ReportError::Config(format!("field `wperp`: {e}")))?,
        ),
        RawWperp::Basis(b) => Wperp::Basis(b),
    };
    for (i, r) in raw.radii.iter().enumerate() {
        if !(r.is_finite() && *r > RADIUS_GUARD) {
            return Err(ReportError::Config(format!(
                "field `radii[{i}]`: radius must exceed {RADIUS_GUARD:e}, got {r}"
            )));
        }
    }
    let samples = raw.samples.unwrap_or(DEFAULT_SAMPLES as i64);
    if samples < 1 {
        return Err(ReportError::Config(format!("field `samples`: must be >= 1, got {samples}")));
    }
    let tol = raw.tol.unwrap_or(DEFAULT_TOL);
    if !(tol.is_finite() && tol > 0.0) {
        return Err(ReportError::Config(format!("field `tol`: must be positive, got {tol}")));
    }
    let output_format = match raw.format {
        Some(f) => f
            .parse()
            .map_err(|e| ReportError::Config(format!("field `format`: {e}")))?,
        None => OutputFormat::Json,
    };
    let config = AnalysisConfig {
        n: raw.n as usize,
        wperp,
        radii: raw.radii,
        samples: samples as usize,
        seed: raw.seed.unwrap_or(DEFAULT_SEED),
        tol,
        output_format,
    };
    // preset and basis constraints
    config.subspace()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config("n = 3\nwperp = \"mixed3\"\nradii = [1.0]\n").unwrap();
        assert_eq!(c.samples, 100);
        assert_eq!(c.seed, 42);
        assert_eq!(c.tol, 1e-8);
        assert_eq!(c.output_format, OutputFormat::Json);
        assert_eq!(c.wperp, Wperp::Preset(Preset::Mixed3));
    }

    #[test]
    fn mixed3_needs_n3() {
        let err = parse_config("n = 2\nwperp = \"mixed3\"\n").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("wperp"));
    }

    #[test]
    fn dependent_basis_is_rejected() {
        let err = parse_config("n = 3\nwperp = [[1, 0, 0, 0], [2, 0, 0, 0]]\n").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("dependent"));
    }

    #[test]
    fn explicit_basis_and_format() {
        let c = parse_config("n = 3\nwperp = [[1, 0, 0, 0], [0, 0, 1, 0]]\nformat = \"csv\"\n").unwrap();
        assert_eq!(c.subspace().unwrap().k(), 2);
        assert_eq!(c.output_format, OutputFormat::Csv);
    }

    #[test]
    fn schema_violations() {
        for text in [
            "n = 3\n",
            "n = 3\nwperp = \"mixed3\"\nradius = [1.0]\n",
            "n = \"three\"\nwperp = \"mixed3\"\n",
            "n = 3\nwperp = \"mixed3\"\nradii = [0.0]\n",
            "n = 3\nwperp = \"mixed3\"\nsamples = 0\n",
            "n = 3\nwperp = \"mixed3\"\ntol = -1.0\n",
            "n = 3\nwperp = \"mixed3\"\nformat = \"xml\"\n",
            "n = 1\nwperp = \"complex(1)\"\n",
            "n = 3\nwperp = \"torus(2)\"\n",
        ] {
            let err = parse_config(text).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{text}");
        }
    }

    #[test]
    fn toml_errors_carry_a_line() {
        let err = parse_config("n = 3\nwperp = \"mixed3\"\nradii = [1.0,\n").unwrap_err();
        assert!(err.to_string().contains("line"), "{err}");
    }

    #[test]
    fn empty_radii_rejected_on_use() {
        let c = parse_config("n = 3\nwperp = \"mixed3\"\n").unwrap();
        assert!(c.sorted_radii().is_err());
    }
}
