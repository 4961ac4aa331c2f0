//! Declarative run configuration.
//!
//! Serde-friendly mirror structs for the domain types, as read from a TOML
//! (or any serde) source by the command-line driver. `build` methods convert
//! them into validated domain objects, naming the offending field on
//! failure. Unknown fields are rejected at deserialization time.

use serde::Deserialize;

use crate::distortion::DistortionFunction;
use crate::equilibrium::TiePolicy;
use crate::error::{Error, Result};
use crate::loss::LossModel;

/// Default sign-scan resolution for solves driven by configuration.
pub const DEFAULT_RESOLUTION: usize = 4096;

/// Top-level run configuration: what to solve and how.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub distortion: DistortionConfig,
    pub loss: LossConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    /// Output path; a `--out` flag takes precedence.
    #[serde(default)]
    pub output: Option<String>,
}

/// Distortion block: `kind` selects the family, the other fields supply its
/// parameters.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistortionConfig {
    /// identity | tvar | var | tk | piecewise | tabulated
    pub kind: String,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub theta: Option<f64>,
    /// (t, value) knots for `piecewise`.
    #[serde(default)]
    pub knots: Option<Vec<[f64; 2]>>,
    /// Values on a uniform t-grid for `tabulated`.
    #[serde(default)]
    pub values: Option<Vec<f64>>,
}

fn missing(what: &'static str, kind: &str, field: &str) -> Error {
    Error::Construction {
        what,
        reason: format!("kind '{kind}' requires field '{field}'"),
    }
}

impl DistortionConfig {
    pub fn build(&self) -> Result<DistortionFunction> {
        let what = "distortion config";
        match self.kind.as_str() {
            "identity" => Ok(DistortionFunction::identity()),
            "tvar" => DistortionFunction::tvar(
                self.alpha.ok_or_else(|| missing(what, "tvar", "alpha"))?,
            ),
            "var" => {
                DistortionFunction::var(self.alpha.ok_or_else(|| missing(what, "var", "alpha"))?)
            }
            "tk" => DistortionFunction::tversky_kahneman(
                self.theta.ok_or_else(|| missing(what, "tk", "theta"))?,
            ),
            "piecewise" => {
                let knots = self
                    .knots
                    .as_ref()
                    .ok_or_else(|| missing(what, "piecewise", "knots"))?;
                DistortionFunction::piecewise_linear(
                    knots.iter().map(|&[t, v]| (t, v)).collect(),
                )
            }
            "tabulated" => {
                let values = self
                    .values
                    .as_ref()
                    .ok_or_else(|| missing(what, "tabulated", "values"))?;
                DistortionFunction::tabulated(values.clone())
            }
            other => Err(Error::Construction {
                what,
                reason: format!(
                    "unknown kind '{other}' (expected identity, tvar, var, tk, piecewise, or tabulated)"
                ),
            }),
        }
    }
}

/// Loss block: `kind` selects the family; `m` (alias `M`) is the support
/// bound.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossConfig {
    /// uniform | truncexp | kumaraswamy | tabulated
    pub kind: String,
    #[serde(alias = "M")]
    pub m: f64,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default)]
    pub b: Option<f64>,
    /// CDF values on a uniform x-grid for `tabulated`.
    #[serde(default)]
    pub cdf: Option<Vec<f64>>,
}

impl LossConfig {
    pub fn build(&self) -> Result<LossModel> {
        let what = "loss config";
        match self.kind.as_str() {
            "uniform" => LossModel::uniform(self.m),
            "truncexp" => LossModel::truncated_exponential(
                self.lambda
                    .ok_or_else(|| missing(what, "truncexp", "lambda"))?,
                self.m,
            ),
            "kumaraswamy" => LossModel::kumaraswamy(
                self.a.ok_or_else(|| missing(what, "kumaraswamy", "a"))?,
                self.b.ok_or_else(|| missing(what, "kumaraswamy", "b"))?,
                self.m,
            ),
            "tabulated" => LossModel::tabulated(
                self.m,
                self.cdf
                    .as_ref()
                    .ok_or_else(|| missing(what, "tabulated", "cdf"))?
                    .clone(),
            ),
            other => Err(Error::Construction {
                what,
                reason: format!(
                    "unknown kind '{other}' (expected uniform, truncexp, kumaraswamy, or tabulated)"
                ),
            }),
        }
    }
}

/// Solver block: scan resolution and tie policy.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub resolution: usize,
    /// retain | cede | insurer
    pub tie: String,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            resolution: DEFAULT_RESOLUTION,
            tie: "retain".to_string(),
        }
    }
}

impl SolverConfig {
    pub fn tie_policy(&self) -> Result<TiePolicy> {
        parse_tie(&self.tie)
    }
}

/// Parse a tie policy name as used in configs and on the command line.
pub fn parse_tie(name: &str) -> Result<TiePolicy> {
    match name {
        "retain" => Ok(TiePolicy::Retain),
        "cede" => Ok(TiePolicy::Cede),
        "insurer" => Ok(TiePolicy::InsurerOptimal),
        other => Err(Error::Construction {
            what: "solver config",
            reason: format!("unknown tie policy '{other}' (expected retain, cede, or insurer)"),
        }),
    }
}

/// Sweep block: parameter grid for profile runs. Only the preference
/// parameter `theta` can be swept; loss-parameter profiles come from separate
/// configs.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            parameter: "theta".to_string(),
            start: 0.30,
            stop: 0.80,
            step: 0.01,
        }
    }
}

impl SweepConfig {
    /// The parameter grid: start, start + step, ..., up to stop inclusive
    /// (within a relative slack of 1e-9 on the last point).
    pub fn grid(&self) -> Result<Vec<f64>> {
        let what = "sweep config";
        if self.parameter != "theta" {
            return Err(Error::Construction {
                what,
                reason: format!(
                    "unknown sweep parameter '{}' (only 'theta' can be swept)",
                    self.parameter
                ),
            });
        }
        if !self.step.is_finite() || self.step <= 0.0 {
            return Err(Error::Construction {
                what,
                reason: format!("step must be positive, got {}", self.step),
            });
        }
        if !(self.start.is_finite() && self.stop.is_finite()) || self.start > self.stop {
            return Err(Error::Construction {
                what,
                reason: format!("invalid range [{}, {}]", self.start, self.stop),
            });
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|i| self.start + self.step * i as f64).collect())
    }
}
