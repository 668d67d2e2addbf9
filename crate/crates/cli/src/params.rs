//! Flag groups. Each group also deserializes from `--params-json`, whose keys
//! are the long flag names; a flag given on the command line wins over the
//! same key in the blob.

use std::path::PathBuf;
use std::str::FromStr;

use clap::Args;
use hpme::eigen::{EigenFunction, EigenParams};
use hpme::temporal::{c_from_initial, TemporalParams};
use hpme::verify::{linspace, trusted_eta_grid};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;
use crate::output::Format;

pub const DEFAULT_ORDER: usize = 32;
pub const DEFAULT_GRID_COUNT: usize = 21;

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Output format
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write the document here instead of stdout
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// JSON object of flag values (long names without dashes); `@path` reads a file
    #[arg(long, value_name = "JSON")]
    pub params_json: Option<String>,
}

/// A complex flag value: `re` or `re,im`. In JSON, a number or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "ComplexRepr", into = "ComplexRepr")]
pub struct ComplexArg(pub Complex64);

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ComplexRepr {
    Real(f64),
    Pair([f64; 2]),
}

impl From<ComplexRepr> for ComplexArg {
    fn from(r: ComplexRepr) -> Self {
        match r {
            ComplexRepr::Real(x) => ComplexArg(Complex64::new(x, 0.0)),
            ComplexRepr::Pair([re, im]) => ComplexArg(Complex64::new(re, im)),
        }
    }
}

impl From<ComplexArg> for ComplexRepr {
    fn from(c: ComplexArg) -> Self {
        ComplexRepr::Pair([c.0.re, c.0.im])
    }
}

impl FromStr for ComplexArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
        match s.split_once(',') {
            Some((re, im)) => Ok(ComplexArg(Complex64::new(parse(re)?, parse(im)?))),
            None => Ok(ComplexArg(Complex64::new(parse(s)?, 0.0))),
        }
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct EigenArgs {
    /// Exponent n >= 2 [default: 2]
    #[arg(long)]
    pub n: Option<u32>,
    /// Eigenvalue, nonzero [default: 1]
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    /// Geometric constant delta' > 0 [default: 1]
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// Value of u at the center, nonzero [default: 1]
    #[arg(long, allow_hyphen_values = true)]
    pub a0: Option<f64>,
    /// Slope of u at the center [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub a1: Option<f64>,
    /// Expansion point, away from +-delta'
    #[arg(long, allow_hyphen_values = true)]
    pub center: Option<f64>,
    /// Truncation order N >= 2; N + 1 coefficients are computed [default: 32]
    #[arg(long)]
    pub order: Option<usize>,
}

impl EigenArgs {
    pub fn resolve(&self, default_center: f64) -> Result<(EigenParams<f64>, usize), CliError> {
        let order = self.order.unwrap_or(DEFAULT_ORDER);
        if order < 2 {
            return Err(CliError::Invalid("order must be ≥ 2".into()));
        }
        let p = EigenParams::new(
            self.n.unwrap_or(2),
            self.lambda.unwrap_or(1.0),
            self.delta.unwrap_or(1.0),
            self.a0.unwrap_or(1.0),
            self.a1.unwrap_or(0.0),
        )?
        .with_center(self.center.unwrap_or(default_center))?;
        Ok((p, order))
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct EtaGridArgs {
    /// First eta of the grid; omit both ends to sample the trusted range
    #[arg(long, allow_hyphen_values = true)]
    pub eta_min: Option<f64>,
    /// Last eta of the grid
    #[arg(long, allow_hyphen_values = true)]
    pub eta_max: Option<f64>,
    /// Number of eta points [default: 21]
    #[arg(long)]
    pub eta_count: Option<usize>,
}

impl EtaGridArgs {
    pub fn resolve(&self, ef: &EigenFunction) -> Result<Vec<f64>, CliError> {
        let count = positive("eta-count", self.eta_count.unwrap_or(DEFAULT_GRID_COUNT))?;
        match (self.eta_min, self.eta_max) {
            (None, None) => trusted_eta_grid(ef, count).map_err(|e| {
                CliError::Invalid(format!("{e}; choose --eta-min/--eta-max or a center beyond delta'"))
            }),
            (Some(lo), Some(hi)) => Ok(linspace(lo, hi, count)),
            _ => Err(CliError::Invalid("eta-min and eta-max must be given together".into())),
        }
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct TimeGridArgs {
    /// First time of the grid [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub t_min: Option<f64>,
    /// Last time of the grid [default: 3]
    #[arg(long, allow_hyphen_values = true)]
    pub t_max: Option<f64>,
    /// Number of time points [default: 21]
    #[arg(long)]
    pub t_count: Option<usize>,
}

impl TimeGridArgs {
    pub fn resolve(&self) -> Result<Vec<f64>, CliError> {
        let count = positive("t-count", self.t_count.unwrap_or(DEFAULT_GRID_COUNT))?;
        Ok(linspace(self.t_min.unwrap_or(0.0), self.t_max.unwrap_or(3.0), count))
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct TemporalArgs {
    /// Coefficient A1 of f^n, as `re` or `re,im` [default: the eigenvalue in pde, 1 in temporal]
    #[arg(long = "A1", allow_hyphen_values = true)]
    #[serde(rename = "A1")]
    pub big_a1: Option<ComplexArg>,
    /// Coefficient A2 of f, as `re` or `re,im` [default: -1]
    #[arg(long = "A2", allow_hyphen_values = true)]
    #[serde(rename = "A2")]
    pub big_a2: Option<ComplexArg>,
    /// Initial value f(0); sets c [default: 0.5]
    #[arg(long, allow_hyphen_values = true, conflicts_with = "c")]
    pub f0: Option<ComplexArg>,
    /// Integration constant c, instead of f0
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<ComplexArg>,
    /// Root branch k < n - 1 [default: chosen to match f0, else 0]
    #[arg(long)]
    pub branch: Option<u32>,
}

impl TemporalArgs {
    pub fn resolve(&self, n: u32, default_a1: f64) -> Result<TemporalParams, CliError> {
        let a1 = self.big_a1.map_or(Complex64::new(default_a1, 0.0), |c| c.0);
        let a2 = self.big_a2.map_or(Complex64::new(-1.0, 0.0), |c| c.0);
        let p = match (self.c, self.f0) {
            (Some(_), Some(_)) => return Err(CliError::Invalid("give either c or f0, not both".into())),
            (Some(c), None) => TemporalParams::new(n, a1, a2, c.0)?,
            (None, f0) => c_from_initial(n, a1, a2, f0.map_or(Complex64::new(0.5, 0.0), |f| f.0))?,
        };
        Ok(match self.branch {
            Some(k) => p.with_branch(k)?,
            None => p,
        })
    }
}

fn positive(name: &str, count: usize) -> Result<usize, CliError> {
    if count == 0 {
        return Err(CliError::Invalid(format!("{name} must be ≥ 1")));
    }
    Ok(count)
}

fn read_blob(blob: &str) -> Result<String, CliError> {
    match blob.strip_prefix('@') {
        Some(path) => {
            std::fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("cannot read params file {path}: {e}")))
        }
        None => Ok(blob.to_string()),
    }
}

/// Fills every flag left unset with the value of the same key in `blob`.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, blob: Option<&str>) -> Result<T, CliError> {
    let Some(blob) = blob else {
        return Ok(serde_json::from_value(serde_json::to_value(flags)?)?);
    };
    let Value::Object(mut merged) = serde_json::to_value(flags)? else {
        unreachable!("flag groups serialize to objects");
    };
    let parsed: Value = serde_json::from_str(&read_blob(blob)?)
        .map_err(|e| CliError::Invalid(format!("params-json is not valid JSON: {e}")))?;
    let Value::Object(given) = parsed else {
        return Err(CliError::Invalid("params-json must be a JSON object".into()));
    };
    for (key, value) in given {
        match merged.get_mut(&key) {
            None => return Err(CliError::Invalid(format!("params-json has unknown key {key:?}"))),
            Some(slot) if slot.is_null() => *slot = value,
            Some(_) => {}
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Invalid(format!("params-json: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_flags_parse() {
        assert_eq!("2".parse::<ComplexArg>().unwrap().0, Complex64::new(2.0, 0.0));
        assert_eq!("-1, 0.5".parse::<ComplexArg>().unwrap().0, Complex64::new(-1.0, 0.5));
        assert!("1,x".parse::<ComplexArg>().is_err());
    }

    #[test]
    fn flags_take_precedence_over_blob() {
        let flags = EigenArgs {
            lambda: Some(3.0),
            ..EigenArgs::default()
        };
        let merged = merge(&flags, Some(r#"{"lambda": 5, "a0": 2, "order": 4}"#)).unwrap();
        assert_eq!(merged.lambda, Some(3.0));
        assert_eq!(merged.a0, Some(2.0));
        assert_eq!(merged.order, Some(4));
    }

    #[test]
    fn blob_errors_are_invalid_input() {
        let flags = EigenArgs::default();
        for blob in [r#"{"lamda": 1}"#, "[1]", "{", r#"{"n": -2}"#] {
            assert_eq!(merge(&flags, Some(blob)).unwrap_err().exit_code(), 2, "{blob}");
        }
    }

    #[test]
    fn complex_values_accept_numbers_and_pairs() {
        let merged = merge(&TemporalArgs::default(), Some(r#"{"A1": 2, "A2": [0, -0.8]}"#)).unwrap();
        assert_eq!(merged.big_a1.unwrap().0, Complex64::new(2.0, 0.0));
        assert_eq!(merged.big_a2.unwrap().0, Complex64::new(0.0, -0.8));
    }

    #[test]
    fn order_below_two_is_rejected() {
        let args = EigenArgs {
            order: Some(1),
            ..EigenArgs::default()
        };
        let err = args.resolve(0.0).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("order must be ≥ 2"));
    }
}
