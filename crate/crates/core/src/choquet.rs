//! Indemnities, contracts, and the model's functionals in layer form.
//!
//! An indemnity I is stored through its marginal kappa: [0,M] -> [0,1],
//! piecewise constant over a partition of the loss support, so that
//! I(x) = integral of kappa over [0, x]. Every functional of the model is a
//! layer integral weighted by a (distorted) survival probability:
//!
//! - risk measure of the loss:       integral of T(S(y)) dy
//! - premium / Choquet of indemnity: integral of kappa(y) g(S(y)) dy
//! - policyholder objective:         integral of (1-kappa) T(S) + kappa g(S) dy
//! - insurer profit:                 integral of kappa (g(S) - S) dy
//!
//! The integrands are piecewise smooth; all breakpoints are known in advance
//! (indemnity segment bounds plus loss-space images of distortion kinks and
//! jumps), so splitting at them keeps each quadrature cell smooth.

use crate::distortion::DistortionFunction;
use crate::error::{Error, Result};
use crate::loss::LossModel;
use crate::quad;

/// Marginal-indemnity representation: ordered segments (upper bound, level)
/// partitioning [0, M]; kappa equals `level` on each segment.
///
/// Feasibility (the no-sabotage condition) is levels in [0,1]: both the
/// indemnity and the retention are then non-decreasing and 1-Lipschitz.
#[derive(Debug, Clone, PartialEq)]
pub struct Indemnity {
    /// (upper bound, level) pairs; bounds strictly increasing, last = M.
    segments: Vec<(f64, f64)>,
    /// Cumulative indemnity at each segment's upper bound.
    prefix: Vec<f64>,
}

impl Indemnity {
    /// Build from (upper bound, level) pairs. Bounds must be strictly
    /// increasing and end at the loss support's upper bound; levels must lie
    /// in [0,1] (1e-12 slack, clamped).
    pub fn new(segments: Vec<(f64, f64)>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Construction {
                what: "indemnity",
                reason: "no segments".to_string(),
            });
        }
        let mut cleaned = Vec::with_capacity(segments.len());
        let mut prev = 0.0;
        for (i, &(upper, level)) in segments.iter().enumerate() {
            if !upper.is_finite() || upper <= prev {
                return Err(Error::Construction {
                    what: "indemnity",
                    reason: format!("segment bounds not strictly increasing at index {i}"),
                });
            }
            if !(-1e-12..=1.0 + 1e-12).contains(&level) {
                return Err(Error::Construction {
                    what: "indemnity",
                    reason: format!("level {level} at index {i} outside [0,1]"),
                });
            }
            cleaned.push((upper, level.clamp(0.0, 1.0)));
            prev = upper;
        }
        let mut prefix = Vec::with_capacity(cleaned.len());
        let mut acc = 0.0;
        let mut lo = 0.0;
        for &(upper, level) in &cleaned {
            acc += level * (upper - lo);
            prefix.push(acc);
            lo = upper;
        }
        Ok(Indemnity {
            segments: cleaned,
            prefix,
        })
    }

    /// Full insurance: kappa = 1 on [0, bound].
    pub fn full(bound: f64) -> Result<Self> {
        Indemnity::new(vec![(bound, 1.0)])
    }

    /// No insurance: kappa = 0 on [0, bound].
    pub fn zero(bound: f64) -> Result<Self> {
        Indemnity::new(vec![(bound, 0.0)])
    }

    /// Upper bound of the partition (the loss support bound M).
    pub fn upper_bound(&self) -> f64 {
        self.segments.last().unwrap().0
    }

    /// Segments as (lower, upper, level) triples.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let mut lo = 0.0;
        self.segments.iter().map(move |&(upper, level)| {
            let seg = (lo, upper, level);
            lo = upper;
            seg
        })
    }

    /// Interior segment boundaries (quadrature breakpoints).
    pub(crate) fn interior_bounds(&self) -> Vec<f64> {
        self.segments[..self.segments.len() - 1]
            .iter()
            .map(|&(u, _)| u)
            .collect()
    }

    /// kappa(y). Segment i covers (upper_{i-1}, upper_i]; y <= 0 falls in the
    /// first segment.
    pub fn marginal_at(&self, y: f64) -> f64 {
        let i = self
            .segments
            .partition_point(|&(upper, _)| upper < y)
            .min(self.segments.len() - 1);
        self.segments[i].1
    }

    /// I(x) = integral of kappa over [0, x], clamped to the partition.
    pub fn indemnity_at(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let n = self.segments.len();
        let i = self.segments.partition_point(|&(upper, _)| upper < x);
        if i >= n {
            return self.prefix[n - 1];
        }
        let lower = if i == 0 { 0.0 } else { self.segments[i - 1].0 };
        let before = if i == 0 { 0.0 } else { self.prefix[i - 1] };
        before + self.segments[i].1 * (x - lower)
    }

    /// R(x) = x - I(x); the policyholder's retained part.
    pub fn retention_at(&self, x: f64) -> f64 {
        x - self.indemnity_at(x)
    }

    /// Retention quantile q(t) = F^-1(t) - I(F^-1(t)); well defined because
    /// retention is non-decreasing and quantiles are comonotonic-additive.
    pub fn retention_quantile(&self, m: &LossModel, t: f64) -> Result<f64> {
        let x = m.quantile(t)?;
        Ok(self.retention_at(x))
    }

    /// Complement indemnity with marginal 1 - kappa (swaps the roles of
    /// indemnity and retention).
    pub fn complement(&self) -> Indemnity {
        Indemnity::new(
            self.segments
                .iter()
                .map(|&(u, level)| (u, 1.0 - level))
                .collect(),
        )
        .expect("complement of a feasible indemnity is feasible")
    }

    /// Layerwise sum of two marginals over the merged partition. Errors if
    /// the sum exceeds 1 anywhere (infeasible) or the bounds differ.
    pub fn checked_add(&self, other: &Indemnity) -> Result<Indemnity> {
        if (self.upper_bound() - other.upper_bound()).abs() > 1e-9 {
            return Err(Error::BoundMismatch {
                indemnity_bound: self.upper_bound(),
                model_bound: other.upper_bound(),
            });
        }
        let mut bounds: Vec<f64> = self
            .segments
            .iter()
            .chain(other.segments.iter())
            .map(|&(u, _)| u)
            .collect();
        bounds.sort_by(|a, b| a.partial_cmp(b).unwrap());
        bounds.dedup_by(|a, b| (*a - *b).abs() <= 0.0);
        let mut merged = Vec::with_capacity(bounds.len());
        let mut lo = 0.0;
        for u in bounds {
            let mid = 0.5 * (lo + u);
            let level = self.marginal_at(mid) + other.marginal_at(mid);
            if level > 1.0 + 1e-12 {
                return Err(Error::Construction {
                    what: "indemnity sum",
                    reason: format!("combined marginal {level} exceeds 1 near y = {mid}"),
                });
            }
            merged.push((u, level.min(1.0)));
            lo = u;
        }
        Indemnity::new(merged)
    }
}

/// An insurance contract: indemnity schedule plus premium.
#[derive(Debug, Clone, PartialEq)]
pub struct Contract {
    pub indemnity: Indemnity,
    pub premium: f64,
}

impl Contract {
    pub fn new(indemnity: Indemnity, premium: f64) -> Result<Self> {
        if !premium.is_finite() {
            return Err(Error::Construction {
                what: "contract",
                reason: format!("premium {premium} is not finite"),
            });
        }
        Ok(Contract { indemnity, premium })
    }
}

/// Shared layer quadrature: integrate f(y, S(y)) over [0, M], splitting at
/// the loss-space images y = quantile(1 - t) of the given t-space breakpoints
/// and at the given y-space breakpoints.
pub(crate) fn layer_integral<F: FnMut(f64, f64) -> f64>(
    m: &LossModel,
    t_breaks: &[f64],
    y_breaks: &[f64],
    mut f: F,
) -> f64 {
    let mut breaks: Vec<f64> = t_breaks
        .iter()
        .map(|&t| m.quantile_clamped(1.0 - t))
        .collect();
    breaks.extend_from_slice(y_breaks);
    // Dense tabulated inputs produce hundreds of smooth, narrow pieces;
    // shallow grading is enough there and keeps the cell count bounded.
    let levels = if breaks.len() > 256 {
        8
    } else {
        quad::GRADE_LEVELS
    };
    quad::integrate_with_breaks(
        &mut |y| f(y, m.survival_clamped(y)),
        0.0,
        m.bound(),
        &breaks,
        levels,
    )
}

fn check_bounds(ind: &Indemnity, m: &LossModel) -> Result<()> {
    if (ind.upper_bound() - m.bound()).abs() > 1e-9 * m.bound().max(1.0) {
        return Err(Error::BoundMismatch {
            indemnity_bound: ind.upper_bound(),
            model_bound: m.bound(),
        });
    }
    Ok(())
}

/// Distortion risk measure of the full loss: integral of T(S(y)) over [0, M].
pub fn drm_of_loss(m: &LossModel, d: &DistortionFunction) -> Result<f64> {
    Ok(layer_integral(m, &d.critical_ts(), &[], |_, s| d.eval01(s)))
}

/// Choquet integral of the indemnity I(X) under distortion d: the distortion
/// premium principle evaluates to integral of kappa(y) d(S(y)) dy.
pub fn choquet_of_indemnity(
    ind: &Indemnity,
    m: &LossModel,
    d: &DistortionFunction,
) -> Result<f64> {
    check_bounds(ind, m)?;
    Ok(layer_integral(
        m,
        &d.critical_ts(),
        &ind.interior_bounds(),
        |y, s| ind.marginal_at(y) * d.eval01(s),
    ))
}

/// Policyholder objective under preference distortion T and pricing
/// distortion g, with the premium set by the pricing principle:
/// rho(retention) + premium = integral of (1-kappa) T(S) + kappa g(S) dy.
pub fn policyholder_objective(
    ind: &Indemnity,
    m: &LossModel,
    t: &DistortionFunction,
    g: &DistortionFunction,
) -> Result<f64> {
    check_bounds(ind, m)?;
    let mut t_breaks = t.critical_ts();
    t_breaks.extend(g.critical_ts());
    Ok(layer_integral(
        m,
        &t_breaks,
        &ind.interior_bounds(),
        |y, s| {
            let k = ind.marginal_at(y);
            (1.0 - k) * t.eval01(s) + k * g.eval01(s)
        },
    ))
}

/// Insurer's expected profit: premium minus expected indemnity, i.e.
/// integral of kappa(y) (g(S(y)) - S(y)) dy.
pub fn insurer_profit(ind: &Indemnity, m: &LossModel, g: &DistortionFunction) -> Result<f64> {
    check_bounds(ind, m)?;
    Ok(layer_integral(
        m,
        &g.critical_ts(),
        &ind.interior_bounds(),
        |y, s| ind.marginal_at(y) * (g.eval01(s) - s),
    ))
}

/// Policyholder risk of a priced contract: rho(retention) + premium.
pub fn contract_policyholder_risk(
    c: &Contract,
    m: &LossModel,
    t: &DistortionFunction,
) -> Result<f64> {
    check_bounds(&c.indemnity, m)?;
    let retention_risk = layer_integral(
        m,
        &t.critical_ts(),
        &c.indemnity.interior_bounds(),
        |y, s| (1.0 - c.indemnity.marginal_at(y)) * t.eval01(s),
    );
    Ok(retention_risk + c.premium)
}
