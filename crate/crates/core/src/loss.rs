//! Bounded loss models on [0, M] with strictly increasing CDF.
//!
//! The engine needs only F, the survival function S = 1 - F, and the quantile
//! F^-1: every functional is evaluated as a layer integral over [0, M], so
//! the quantile derivative that appears in the quantile-space formulas is
//! never differentiated numerically (the independent cross-check route in
//! `oracle` uses exact quantile increments instead).

use crate::error::{Error, Result};

/// A bounded loss on [0, M] with strictly increasing CDF.
#[derive(Debug, Clone, PartialEq)]
pub enum LossModel {
    /// F(x) = x / M.
    Uniform { bound: f64 },
    /// F(x) = (1 - e^(-lambda x)) / (1 - e^(-lambda M)).
    TruncatedExponential { lambda: f64, bound: f64 },
    /// F(x) = 1 - (1 - (x/M)^a)^b.
    Kumaraswamy { a: f64, b: f64, bound: f64 },
    /// Linear interpolation of CDF values on a uniform x-grid over [0, M];
    /// strictly increasing with per-cell slope at least 1e-10.
    Tabulated { bound: f64, cdf: Vec<f64> },
}

use LossModel::*;

impl std::fmt::Display for LossModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Uniform { bound } => write!(f, "uniform(m={bound})"),
            TruncatedExponential { lambda, bound } => {
                write!(f, "truncexp(lambda={lambda}, m={bound})")
            }
            Kumaraswamy { a, b, bound } => write!(f, "kumaraswamy(a={a}, b={b}, m={bound})"),
            Tabulated { bound, cdf } => write!(f, "tabulated(m={bound}, {} points)", cdf.len()),
        }
    }
}

impl LossModel {
    pub fn uniform(bound: f64) -> Result<Self> {
        check_bound(bound)?;
        Ok(Uniform { bound })
    }

    pub fn truncated_exponential(lambda: f64, bound: f64) -> Result<Self> {
        check_bound(bound)?;
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Domain {
                name: "lambda",
                value: lambda,
                min: f64::MIN_POSITIVE,
                max: f64::INFINITY,
            });
        }
        Ok(TruncatedExponential { lambda, bound })
    }

    pub fn kumaraswamy(a: f64, b: f64, bound: f64) -> Result<Self> {
        check_bound(bound)?;
        for (name, value) in [("a", a), ("b", b)] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::Domain {
                    name,
                    value,
                    min: f64::MIN_POSITIVE,
                    max: f64::INFINITY,
                });
            }
        }
        Ok(Kumaraswamy { a, b, bound })
    }

    /// Tabulated CDF on the uniform grid x_i = i M / (n-1). The table must
    /// start at 0, end at 1, and be strictly increasing with slope at least
    /// 1e-10 per cell (the strictly-increasing-CDF assumption is a hard
    /// precondition of the equilibrium theory).
    pub fn tabulated(bound: f64, cdf: Vec<f64>) -> Result<Self> {
        check_bound(bound)?;
        if cdf.len() < 2 {
            return Err(Error::Construction {
                what: "tabulated CDF",
                reason: format!("need at least 2 values, got {}", cdf.len()),
            });
        }
        let n = cdf.len();
        let mut cleaned = Vec::with_capacity(n);
        let dx = bound / (n - 1) as f64;
        for (i, &v) in cdf.iter().enumerate() {
            let v = if i == 0 {
                if v.abs() > 1e-12 {
                    return Err(Error::Construction {
                        what: "tabulated CDF",
                        reason: format!("cdf_values[0] must be 0, got {v}"),
                    });
                }
                0.0
            } else if i == n - 1 {
                if (v - 1.0).abs() > 1e-12 {
                    return Err(Error::Construction {
                        what: "tabulated CDF",
                        reason: format!("cdf_values[last] must be 1, got {v}"),
                    });
                }
                1.0
            } else {
                v
            };
            if let Some(&prev) = cleaned.last() {
                if (v - prev) / dx < 1e-10 {
                    return Err(Error::Construction {
                        what: "tabulated CDF",
                        reason: format!(
                            "cdf_values not strictly increasing at index {i} (slope {} < 1e-10)",
                            (v - prev) / dx
                        ),
                    });
                }
            }
            cleaned.push(v);
        }
        Ok(Tabulated {
            bound,
            cdf: cleaned,
        })
    }

    /// Upper bound M of the loss support.
    pub fn bound(&self) -> f64 {
        match self {
            Uniform { bound }
            | TruncatedExponential { bound, .. }
            | Kumaraswamy { bound, .. }
            | Tabulated { bound, .. } => *bound,
        }
    }

    /// F(x). Errors if x falls outside [0, M] beyond a relative 1e-12 slack.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.check_support(x)?;
        Ok(self.cdf_clamped(x))
    }

    /// S(x) = 1 - F(x), computed exactly as that difference.
    pub fn survival(&self, x: f64) -> Result<f64> {
        Ok(1.0 - self.cdf(x)?)
    }

    /// Left-continuous inverse of F; quantile(0) = 0 and quantile(1) = M
    /// exactly.
    pub fn quantile(&self, t: f64) -> Result<f64> {
        if !(-1e-12..=1.0 + 1e-12).contains(&t) {
            return Err(Error::Domain {
                name: "t",
                value: t,
                min: 0.0,
                max: 1.0,
            });
        }
        Ok(self.quantile_clamped(t.clamp(0.0, 1.0)))
    }

    /// Probability density f(x) = F'(x). For Kumaraswamy shapes below 1 the
    /// density is unbounded at the corresponding endpoint; the engine never
    /// integrates it (all functionals are layer integrals of bounded
    /// integrands).
    pub fn density(&self, x: f64) -> Result<f64> {
        self.check_support(x)?;
        let x = x.clamp(0.0, self.bound());
        Ok(match self {
            Uniform { bound } => 1.0 / bound,
            TruncatedExponential { lambda, bound } => {
                lambda * (-lambda * x).exp() / -(-lambda * bound).exp_m1()
            }
            Kumaraswamy { a, b, bound } => {
                let u = x / bound;
                (a * b / bound) * u.powf(a - 1.0) * (1.0 - u.powf(*a)).powf(b - 1.0)
            }
            Tabulated { bound, cdf } => {
                let n = cdf.len();
                let dx = bound / (n - 1) as f64;
                let i = ((x / dx).floor() as usize).min(n - 2);
                (cdf[i + 1] - cdf[i]) / dx
            }
        })
    }

    pub(crate) fn cdf_clamped(&self, x: f64) -> f64 {
        let m = self.bound();
        if x <= 0.0 {
            return 0.0;
        }
        if x >= m {
            return 1.0;
        }
        match self {
            Uniform { bound } => x / bound,
            TruncatedExponential { lambda, bound } => {
                (-lambda * x).exp_m1() / (-lambda * bound).exp_m1()
            }
            Kumaraswamy { a, b, bound } => 1.0 - (1.0 - (x / bound).powf(*a)).powf(*b),
            Tabulated { bound, cdf } => {
                let n = cdf.len();
                let pos = x / bound * (n - 1) as f64;
                let i = (pos.floor() as usize).min(n - 2);
                let w = pos - i as f64;
                cdf[i] + w * (cdf[i + 1] - cdf[i])
            }
        }
        .clamp(0.0, 1.0)
    }

    /// Survival on the already-validated support; the engine's hot path.
    pub(crate) fn survival_clamped(&self, x: f64) -> f64 {
        1.0 - self.cdf_clamped(x)
    }

    pub(crate) fn quantile_clamped(&self, t: f64) -> f64 {
        let m = self.bound();
        if t <= 0.0 {
            return 0.0;
        }
        if t >= 1.0 {
            return m;
        }
        match self {
            Uniform { bound } => t * bound,
            TruncatedExponential { lambda, bound } => {
                -f64::ln_1p(t * (-lambda * bound).exp_m1()) / lambda
            }
            Kumaraswamy { a, b, bound } => {
                bound * (1.0 - (1.0 - t).powf(1.0 / b)).powf(1.0 / a)
            }
            Tabulated { bound, cdf } => {
                let n = cdf.len();
                // First index with cdf value >= t; t < 1 so j <= n-1.
                let j = cdf.partition_point(|&v| v < t).min(n - 1).max(1);
                let (v0, v1) = (cdf[j - 1], cdf[j]);
                let dx = bound / (n - 1) as f64;
                let x0 = (j - 1) as f64 * dx;
                x0 + (t - v0) / (v1 - v0) * dx
            }
        }
        .clamp(0.0, m)
    }

    fn check_support(&self, x: f64) -> Result<()> {
        let m = self.bound();
        let slack = m * 1e-12;
        if (-slack..=m + slack).contains(&x) {
            Ok(())
        } else {
            Err(Error::Domain {
                name: "x",
                value: x,
                min: 0.0,
                max: m,
            })
        }
    }
}

fn check_bound(bound: f64) -> Result<()> {
    if bound > 0.0 && bound.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "M",
            value: bound,
            min: f64::MIN_POSITIVE,
            max: f64::INFINITY,
        })
    }
}
