//! Distortion functions and their algebra: evaluation, conjugation,
//! crossing-set computation, and risk-aversion classification.
//!
//! A distortion function is a non-decreasing map T: [0,1] -> [0,1] with
//! T(0) = 0 and T(1) = 1. The policyholder's risk measure and the insurer's
//! premium principle are both Choquet integrals under such maps, so the whole
//! model is driven by where a distortion sits relative to the identity (risk
//! aversion) and relative to another distortion (pricing vs. preference).

use crate::error::{Error, Result};

/// Sign of a scanned function on an open interval: above, on, or below zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionSign {
    Positive,
    Zero,
    Negative,
}

impl RegionSign {
    fn of(value: f64, zero_tol: f64) -> Self {
        if value.abs() <= zero_tol {
            RegionSign::Zero
        } else if value > 0.0 {
            RegionSign::Positive
        } else {
            RegionSign::Negative
        }
    }
}

/// Where T(t) - t changes sign on (0,1), and the sign on each open interval
/// between consecutive change points (including the two end intervals).
///
/// `sign_on_intervals.len() == points.len() + 1`. Adjacent interval signs
/// always differ; intervals where |T(t) - t| stays within 1e-10 are reported
/// with sign `Zero` (a distortion can ride the identity on a whole
/// sub-interval, e.g. piecewise-linear ones).
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingSet {
    pub points: Vec<f64>,
    pub sign_on_intervals: Vec<RegionSign>,
}

impl CrossingSet {
    /// Intervals of (0,1) with their signs: (lower, upper, sign).
    pub fn regions(&self) -> Vec<(f64, f64, RegionSign)> {
        let mut out = Vec::with_capacity(self.sign_on_intervals.len());
        let mut lo = 0.0;
        for (i, &sign) in self.sign_on_intervals.iter().enumerate() {
            let hi = if i < self.points.len() { self.points[i] } else { 1.0 };
            out.push((lo, hi, sign));
            lo = hi;
        }
        out
    }
}

/// Absolute tolerance below which a scanned value counts as exactly zero.
pub(crate) const SIGN_ZERO_TOL: f64 = 1e-10;
/// Bisection tolerance (in t) for refining regime boundaries.
pub(crate) const SIGN_POINT_TOL: f64 = 1e-10;
/// Zero-sign intervals narrower than this are collapsed: they are grid
/// artifacts of a transversal crossing, not genuine identity-riding segments.
const HAIRLINE_WIDTH: f64 = 1e-8;

/// Scan f on a uniform grid over [lo, hi], classify each interior node as
/// +/0/-, merge runs, and refine every run boundary by bisection. Returns the
/// refined boundary points together with the sign of each resulting interval.
///
/// Endpoint nodes are excluded from classification: T(t) - t and g(t) - T(t)
/// vanish at 0 and 1 for every distortion pair, and those endpoint zeros are
/// not regime information.
pub(crate) fn sign_regimes<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    resolution: usize,
) -> (Vec<f64>, Vec<RegionSign>) {
    let n = resolution.max(4);
    let step = (hi - lo) / n as f64;
    let node = |i: usize| lo + step * i as f64;
    let class = |t: f64| RegionSign::of(f(t), SIGN_ZERO_TOL);

    // Runs of equal classification over interior nodes 1..n-1.
    let mut runs: Vec<(RegionSign, usize, usize)> = Vec::new();
    for i in 1..n {
        let c = class(node(i));
        match runs.last_mut() {
            Some((rc, _, last)) if *rc == c => *last = i,
            _ => runs.push((c, i, i)),
        }
    }
    if runs.is_empty() {
        return (Vec::new(), vec![RegionSign::Zero]);
    }

    // Refine the boundary between each pair of adjacent runs.
    let mut points: Vec<f64> = Vec::new();
    for w in 0..runs.len() - 1 {
        let (left_class, _, left_last) = runs[w];
        let (right_class, right_first, _) = runs[w + 1];
        let mut a = node(left_last);
        let mut b = node(right_first);
        if left_class != RegionSign::Zero && right_class != RegionSign::Zero {
            // Transversal sign change: plain sign bisection.
            let positive_left = left_class == RegionSign::Positive;
            while b - a > SIGN_POINT_TOL {
                let m = 0.5 * (a + b);
                if (f(m) > 0.0) == positive_left {
                    a = m;
                } else {
                    b = m;
                }
            }
        } else {
            // Boundary of the |f| <= tol band: bisect on the classification.
            while b - a > SIGN_POINT_TOL {
                let m = 0.5 * (a + b);
                if class(m) == left_class {
                    a = m;
                } else {
                    b = m;
                }
            }
        }
        points.push(0.5 * (a + b));
    }

    // Collapse hairline zero runs (single nodes that landed inside the zero
    // band of a transversal crossing) and merge equal neighbors.
    let mut classes: Vec<RegionSign> = runs.iter().map(|&(c, _, _)| c).collect();
    let mut node_brackets: Vec<(usize, usize)> = runs.iter().map(|&(_, f_, l)| (f_, l)).collect();
    loop {
        let mut changed = false;
        let mut k = 0;
        while k < classes.len() {
            let width = {
                let left = if k == 0 { lo } else { points[k - 1] };
                let right = if k + 1 == classes.len() { hi } else { points[k] };
                right - left
            };
            let interior = k > 0 && k + 1 < classes.len();
            if classes[k] == RegionSign::Zero && interior && width < HAIRLINE_WIDTH {
                let (lc, rc) = (classes[k - 1], classes[k + 1]);
                if lc != RegionSign::Zero && rc != RegionSign::Zero && lc != rc {
                    // Replace the sliver with one transversal crossing point.
                    let mut a = node(node_brackets[k - 1].1);
                    let mut b = node(node_brackets[k + 1].0);
                    let positive_left = lc == RegionSign::Positive;
                    while b - a > SIGN_POINT_TOL {
                        let m = 0.5 * (a + b);
                        if (f(m) > 0.0) == positive_left {
                            a = m;
                        } else {
                            b = m;
                        }
                    }
                    let p = 0.5 * (a + b);
                    classes.remove(k);
                    node_brackets.remove(k);
                    points.remove(k);
                    points[k - 1] = p;
                } else {
                    // Tangency artifact: drop the sliver; the now-adjacent
                    // equal-sign runs merge on the next pass.
                    classes.remove(k);
                    node_brackets.remove(k);
                    points.remove(k - 1);
                }
                changed = true;
                continue;
            }
            if k > 0 && classes[k] == classes[k - 1] {
                classes.remove(k);
                node_brackets[k - 1].1 = node_brackets[k - 1].1.max(node_brackets[k].1);
                node_brackets.remove(k);
                points.remove(k - 1);
                changed = true;
                continue;
            }
            k += 1;
        }
        if !changed {
            break;
        }
    }

    (points, classes)
}

/// A distortion function, represented as one of the parametric families from
/// the model plus a lazy conjugate wrapper.
#[derive(Debug, Clone, PartialEq)]
pub enum DistortionFunction {
    /// T(t) = t; risk-neutral evaluation (expected value).
    Identity,
    /// T(t) = min(1, t / (1 - alpha)); concave, the tail-value-at-risk weight.
    TVaR { alpha: f64 },
    /// T(t) = 1 if t > 1 - alpha else 0; the value-at-risk indicator weight.
    /// The jump set is left-open: evaluation at exactly t = 1 - alpha gives 0.
    VaR { alpha: f64 },
    /// T(t) = t^theta / (t^theta + (1-t)^theta)^(1/theta); the inverse-S
    /// probability weighting function. theta = 1 reduces to the identity.
    TverskyKahneman { theta: f64 },
    /// Linear interpolation through knots (t_i, T(t_i)), first (0,0), last (1,1).
    PiecewiseLinear { knots: Vec<(f64, f64)> },
    /// Linear interpolation of values on a uniform t-grid; values[0] = 0,
    /// values[last] = 1, non-decreasing.
    Tabulated { values: Vec<f64> },
    /// Lazy conjugate of another distortion: evaluates 1 - inner(1 - t).
    Conjugate(Box<DistortionFunction>),
}

use DistortionFunction::*;

impl std::fmt::Display for DistortionFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Identity => write!(f, "identity"),
            TVaR { alpha } => write!(f, "tvar({alpha})"),
            VaR { alpha } => write!(f, "var({alpha})"),
            TverskyKahneman { theta } => write!(f, "tk({theta})"),
            PiecewiseLinear { knots } => write!(f, "piecewise({} knots)", knots.len()),
            Tabulated { values } => write!(f, "tabulated({} values)", values.len()),
            Conjugate(inner) => write!(f, "conjugate({inner})"),
        }
    }
}

/// Grid used to validate shape constraints at construction time.
const VALIDATION_GRID: usize = 4096;

impl DistortionFunction {
    pub fn identity() -> Self {
        Identity
    }

    pub fn tvar(alpha: f64) -> Result<Self> {
        check_unit_open("alpha", alpha)?;
        Ok(TVaR { alpha })
    }

    pub fn var(alpha: f64) -> Result<Self> {
        check_unit_open("alpha", alpha)?;
        Ok(VaR { alpha })
    }

    /// The Tversky–Kahneman weighting function. `theta` must lie in (0, 1];
    /// below roughly 0.28 the formula stops being monotone, which violates
    /// the distortion axioms, so such values are rejected by a grid check.
    pub fn tversky_kahneman(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(Error::Domain {
                name: "theta",
                value: theta,
                min: f64::MIN_POSITIVE,
                max: 1.0,
            });
        }
        let d = TverskyKahneman { theta };
        if !d.is_monotone_on_grid(VALIDATION_GRID) {
            return Err(Error::Construction {
                what: "TverskyKahneman distortion",
                reason: format!("theta = {theta} makes the weighting function non-monotone"),
            });
        }
        Ok(d)
    }

    /// Piecewise-linear distortion through the given knots. Knot abscissae
    /// must be strictly increasing from 0 to 1; ordinates non-decreasing from
    /// 0 to 1 (1e-12 slack, then snapped/clamped).
    pub fn piecewise_linear(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::Construction {
                what: "piecewise-linear distortion",
                reason: format!("need at least 2 knots, got {}", knots.len()),
            });
        }
        let mut cleaned = Vec::with_capacity(knots.len());
        for (i, &(t, v)) in knots.iter().enumerate() {
            let (t, v) = if i == 0 {
                if t.abs() > 1e-12 || v.abs() > 1e-12 {
                    return Err(Error::Construction {
                        what: "piecewise-linear distortion",
                        reason: format!("first knot must be (0,0), got ({t}, {v})"),
                    });
                }
                (0.0, 0.0)
            } else if i == knots.len() - 1 {
                if (t - 1.0).abs() > 1e-12 || (v - 1.0).abs() > 1e-12 {
                    return Err(Error::Construction {
                        what: "piecewise-linear distortion",
                        reason: format!("last knot must be (1,1), got ({t}, {v})"),
                    });
                }
                (1.0, 1.0)
            } else {
                (t, v.clamp(0.0, 1.0))
            };
            if let Some(&(pt, pv)) = cleaned.last() {
                if t <= pt {
                    return Err(Error::Construction {
                        what: "piecewise-linear distortion",
                        reason: format!("knot abscissae not strictly increasing at t = {t}"),
                    });
                }
                if v < pv - 1e-12 {
                    return Err(Error::Construction {
                        what: "piecewise-linear distortion",
                        reason: format!("knot values decrease at t = {t} ({pv} -> {v})"),
                    });
                }
                cleaned.push((t, v.max(pv)));
            } else {
                cleaned.push((t, v));
            }
        }
        Ok(PiecewiseLinear { knots: cleaned })
    }

    /// Tabulated distortion: values on the uniform grid t_i = i/(n-1),
    /// starting at 0, ending at 1, non-decreasing (1e-12 slack).
    pub fn tabulated(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Construction {
                what: "tabulated distortion",
                reason: format!("need at least 2 values, got {}", values.len()),
            });
        }
        let n = values.len();
        let mut cleaned = Vec::with_capacity(n);
        for (i, &v) in values.iter().enumerate() {
            let v = if i == 0 {
                if v.abs() > 1e-12 {
                    return Err(Error::Construction {
                        what: "tabulated distortion",
                        reason: format!("values[0] must be 0, got {v}"),
                    });
                }
                0.0
            } else if i == n - 1 {
                if (v - 1.0).abs() > 1e-12 {
                    return Err(Error::Construction {
                        what: "tabulated distortion",
                        reason: format!("values[last] must be 1, got {v}"),
                    });
                }
                1.0
            } else {
                v.clamp(0.0, 1.0)
            };
            if let Some(&prev) = cleaned.last() {
                if v < prev - 1e-12 {
                    return Err(Error::Construction {
                        what: "tabulated distortion",
                        reason: format!("values decrease at index {i} ({prev} -> {v})"),
                    });
                }
                cleaned.push(v.max(prev));
            } else {
                cleaned.push(v);
            }
        }
        Ok(Tabulated { values: cleaned })
    }

    /// Evaluate T(t). Errors if t falls outside [0,1] by more than 1e-12;
    /// values inside the slack are clamped.
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        if !(-1e-12..=1.0 + 1e-12).contains(&t) {
            return Err(Error::Domain {
                name: "t",
                value: t,
                min: 0.0,
                max: 1.0,
            });
        }
        Ok(self.eval01(t.clamp(0.0, 1.0)))
    }

    /// Evaluation on the already-clamped domain; the engine's hot path.
    pub(crate) fn eval01(&self, t: f64) -> f64 {
        match self {
            Identity => t,
            TVaR { alpha } => {
                if t <= 0.0 {
                    0.0
                } else {
                    (t / (1.0 - alpha)).min(1.0)
                }
            }
            VaR { alpha } => {
                if t > 1.0 - alpha {
                    1.0
                } else {
                    0.0
                }
            }
            TverskyKahneman { theta } => {
                if t <= 0.0 {
                    0.0
                } else if t >= 1.0 {
                    1.0
                } else {
                    let tp = t.powf(*theta);
                    let up = (1.0 - t).powf(*theta);
                    (tp / (tp + up).powf(1.0 / theta)).clamp(0.0, 1.0)
                }
            }
            PiecewiseLinear { knots } => {
                if t <= 0.0 {
                    return 0.0;
                }
                if t >= 1.0 {
                    return 1.0;
                }
                // Index of the first knot with abscissa >= t.
                let j = knots.partition_point(|&(kt, _)| kt < t);
                let (t1, v1) = knots[j];
                let (t0, v0) = knots[j - 1];
                let w = (t - t0) / (t1 - t0);
                (v0 + w * (v1 - v0)).clamp(0.0, 1.0)
            }
            Tabulated { values } => {
                if t <= 0.0 {
                    return 0.0;
                }
                if t >= 1.0 {
                    return 1.0;
                }
                let n = values.len();
                let pos = t * (n - 1) as f64;
                let i = (pos.floor() as usize).min(n - 2);
                let w = pos - i as f64;
                (values[i] + w * (values[i + 1] - values[i])).clamp(0.0, 1.0)
            }
            Conjugate(inner) => {
                if t <= 0.0 {
                    0.0
                } else if t >= 1.0 {
                    1.0
                } else {
                    (1.0 - inner.eval01(1.0 - t)).clamp(0.0, 1.0)
                }
            }
        }
    }

    /// The conjugate distortion, evaluating to 1 - T(1 - t). Families closed
    /// under conjugation map to themselves; the rest get a lazy wrapper, so
    /// conjugating twice always returns the original representation.
    pub fn conjugate(&self) -> DistortionFunction {
        match self {
            Identity => Identity,
            PiecewiseLinear { knots } => PiecewiseLinear {
                knots: knots
                    .iter()
                    .rev()
                    .map(|&(t, v)| (1.0 - t, 1.0 - v))
                    .collect(),
            },
            Tabulated { values } => Tabulated {
                values: values.iter().rev().map(|&v| 1.0 - v).collect(),
            },
            Conjugate(inner) => (**inner).clone(),
            other => Conjugate(Box::new(other.clone())),
        }
    }

    /// Interior t-values where this distortion has a jump or kink. These are
    /// the points a layer integral must split at (after mapping through
    /// y = quantile(1 - t)).
    pub(crate) fn critical_ts(&self) -> Vec<f64> {
        match self {
            Identity | TverskyKahneman { .. } => Vec::new(),
            TVaR { alpha } | VaR { alpha } => vec![1.0 - alpha],
            PiecewiseLinear { knots } => knots[1..knots.len() - 1].iter().map(|&(t, _)| t).collect(),
            Tabulated { values } => {
                let n = values.len();
                (1..n - 1).map(|i| i as f64 / (n - 1) as f64).collect()
            }
            Conjugate(inner) => {
                let mut ts: Vec<f64> = inner.critical_ts().iter().map(|&t| 1.0 - t).collect();
                ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
                ts
            }
        }
    }

    /// Sign structure of T(t) - t on (0,1): scan on a uniform grid of the
    /// given resolution, then bisect every regime boundary to 1e-10 in t.
    /// Intervals where |T(t) - t| <= 1e-10 throughout get sign Zero.
    pub fn crossing_set(&self, resolution: usize) -> Result<CrossingSet> {
        if resolution < 64 {
            return Err(Error::Resolution {
                got: resolution,
                min: 64,
            });
        }
        let f = |t: f64| self.eval01(t) - t;
        let (points, sign_on_intervals) = sign_regimes(&f, 0.0, 1.0, resolution);
        Ok(CrossingSet {
            points,
            sign_on_intervals,
        })
    }

    /// Weak risk aversion: T(t) >= t (within 1e-10) on the evaluation grid.
    pub fn is_weakly_risk_averse(&self, resolution: usize) -> bool {
        let n = resolution.max(2);
        (0..=n).all(|i| {
            let t = i as f64 / n as f64;
            self.eval01(t) >= t - 1e-10
        })
    }

    /// Strong risk aversion: T concave, checked by midpoint concavity on the
    /// evaluation grid (within 1e-10).
    pub fn is_strongly_risk_averse(&self, resolution: usize) -> bool {
        let n = resolution.max(4);
        (1..n).all(|i| {
            let t0 = (i - 1) as f64 / n as f64;
            let t1 = i as f64 / n as f64;
            let t2 = (i + 1) as f64 / n as f64;
            self.eval01(t1) >= 0.5 * (self.eval01(t0) + self.eval01(t2)) - 1e-10
        })
    }

    /// Pointwise dominance: self(t) >= other(t) - 1e-10 on the grid. A
    /// dominating distortion describes a more weakly risk averse agent.
    pub fn dominates(&self, other: &DistortionFunction, resolution: usize) -> bool {
        let n = resolution.max(2);
        (0..=n).all(|i| {
            let t = i as f64 / n as f64;
            self.eval01(t) >= other.eval01(t) - 1e-10
        })
    }

    fn is_monotone_on_grid(&self, resolution: usize) -> bool {
        let mut prev = 0.0;
        for i in 0..=resolution {
            let v = self.eval01(i as f64 / resolution as f64);
            if v < prev - 1e-12 {
                return false;
            }
            prev = v;
        }
        true
    }
}

fn check_unit_open(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            min: 0.0,
            max: 1.0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn families() -> Vec<DistortionFunction> {
        vec![
            DistortionFunction::identity(),
            DistortionFunction::tvar(0.9).unwrap(),
            DistortionFunction::tvar(0.8).unwrap(),
            DistortionFunction::var(0.9).unwrap(),
            DistortionFunction::var(0.8).unwrap(),
            DistortionFunction::tversky_kahneman(0.5).unwrap(),
            DistortionFunction::tversky_kahneman(0.35).unwrap(),
            DistortionFunction::tversky_kahneman(1.0).unwrap(),
            DistortionFunction::piecewise_linear(vec![
                (0.0, 0.0),
                (0.2, 0.5),
                (0.7, 0.6),
                (1.0, 1.0),
            ])
            .unwrap(),
            DistortionFunction::tabulated(
                (0..=64).map(|i| (i as f64 / 64.0).powf(0.7)).collect(),
            )
            .unwrap(),
        ]
    }

    #[test]
    fn evaluate_identity_and_tvar_spot_values() {
        let id = DistortionFunction::identity();
        assert_abs_diff_eq!(id.evaluate(0.37).unwrap(), 0.37, epsilon = 0.0);

        // min(1, t/(1-alpha)) at t = 0.05, alpha = 0.9 -> 0.5.
        let tvar = DistortionFunction::tvar(0.9).unwrap();
        assert_abs_diff_eq!(tvar.evaluate(0.05).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(tvar.evaluate(0.2).unwrap(), 1.0, epsilon = 0.0);
    }

    #[test]
    fn var_jump_is_left_open() {
        // alpha = 0.75 keeps the jump location 1 - alpha = 0.25 exactly representable,
        // so the open/closed side of the jump is tested rather than rounding of 1 - alpha.
        let var = DistortionFunction::var(0.75).unwrap();
        assert_eq!(var.evaluate(0.25).unwrap(), 0.0);
        assert_eq!(var.evaluate(0.25 + 1e-9).unwrap(), 1.0);
        assert_eq!(var.evaluate(0.0).unwrap(), 0.0);
        assert_eq!(var.evaluate(1.0).unwrap(), 1.0);

        // For alpha = 0.9 the jump sits at the f64 rounding of 1 - 0.9; the value at
        // the stored jump itself is still on the closed (zero) side.
        let var9 = DistortionFunction::var(0.9).unwrap();
        let jump = 1.0 - 0.9;
        assert_eq!(var9.evaluate(jump).unwrap(), 0.0);
        assert_eq!(var9.evaluate(jump + 1e-12).unwrap(), 1.0);
    }

    #[test]
    fn tk_theta_one_is_identity() {
        let tk = DistortionFunction::tversky_kahneman(1.0).unwrap();
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            assert_abs_diff_eq!(tk.eval01(t), t, epsilon = 1e-12);
        }
    }

    #[test]
    fn tk_rejects_non_monotone_shape() {
        // Far below the monotonicity threshold of the weighting function.
        assert!(DistortionFunction::tversky_kahneman(0.2).is_err());
        assert!(DistortionFunction::tversky_kahneman(0.0).is_err());
        assert!(DistortionFunction::tversky_kahneman(1.2).is_err());
        assert!(DistortionFunction::tversky_kahneman(0.3).is_ok());
    }

    #[test]
    fn evaluate_rejects_out_of_domain_arguments() {
        let d = DistortionFunction::tvar(0.9).unwrap();
        assert!(d.evaluate(-0.01).is_err());
        assert!(d.evaluate(1.01).is_err());
        // Inside the slack: clamped, not an error.
        assert_eq!(d.evaluate(1.0 + 5e-13).unwrap(), 1.0);
    }

    #[test]
    fn endpoints_are_exact_for_all_families() {
        for d in families() {
            assert_eq!(d.eval01(0.0), 0.0, "T(0) != 0 for {d:?}");
            assert_eq!(d.eval01(1.0), 1.0, "T(1) != 1 for {d:?}");
        }
    }

    #[test]
    fn all_families_are_monotone_on_a_dense_grid() {
        for d in families() {
            let mut prev = -1.0;
            for i in 0..=10_000 {
                let v = d.eval01(i as f64 / 10_000.0);
                assert!(
                    v >= prev - 1e-12,
                    "monotonicity violated for {d:?} near t = {}",
                    i as f64 / 10_000.0
                );
                prev = v;
            }
        }
    }

    #[test]
    fn conjugate_closed_forms() {
        // VaR conjugate is the closed indicator 1_{[alpha,1]}.
        let var = DistortionFunction::var(0.9).unwrap();
        let conj = var.conjugate();
        assert_eq!(conj.eval01(0.89), 0.0);
        assert_eq!(conj.eval01(0.9), 1.0); // closed at alpha
        assert_eq!(conj.eval01(0.95), 1.0);

        // TVaR(0.9) conjugate at 0.95: 1 - min(1, 0.05/0.1) = 0.5.
        let tvar = DistortionFunction::tvar(0.9).unwrap();
        assert_abs_diff_eq!(tvar.conjugate().eval01(0.95), 0.5, epsilon = 1e-15);

        assert_eq!(DistortionFunction::identity().conjugate(), Identity);
    }

    #[test]
    fn conjugation_is_an_involution_on_all_families() {
        for d in families() {
            let dd = d.conjugate().conjugate();
            for i in 0..=1000 {
                let t = i as f64 / 1000.0;
                assert_abs_diff_eq!(dd.eval01(t), d.eval01(t), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn crossing_set_tvar_is_all_positive() {
        let cs = DistortionFunction::tvar(0.9)
            .unwrap()
            .crossing_set(4096)
            .unwrap();
        assert!(cs.points.is_empty());
        assert_eq!(cs.sign_on_intervals, vec![RegionSign::Positive]);
    }

    #[test]
    fn crossing_set_var_flips_at_one_minus_alpha() {
        let cs = DistortionFunction::var(0.9)
            .unwrap()
            .crossing_set(4096)
            .unwrap();
        assert_eq!(cs.points.len(), 1);
        assert_abs_diff_eq!(cs.points[0], 0.1, epsilon = 1e-9);
        assert_eq!(
            cs.sign_on_intervals,
            vec![RegionSign::Negative, RegionSign::Positive]
        );
    }

    #[test]
    fn crossing_set_tk_has_single_interior_crossing() {
        let cs = DistortionFunction::tversky_kahneman(0.5)
            .unwrap()
            .crossing_set(4096)
            .unwrap();
        assert_eq!(cs.points.len(), 1);
        // Frozen from an independent bisection of t^0.5/(t^0.5+(1-t)^0.5)^2 = t.
        assert_abs_diff_eq!(cs.points[0], 0.278_132_099_237_213, epsilon = 1e-9);
        assert_eq!(
            cs.sign_on_intervals,
            vec![RegionSign::Positive, RegionSign::Negative]
        );
    }

    #[test]
    fn crossing_set_identity_is_one_zero_interval() {
        let cs = DistortionFunction::identity().crossing_set(256).unwrap();
        assert!(cs.points.is_empty());
        assert_eq!(cs.sign_on_intervals, vec![RegionSign::Zero]);
    }

    #[test]
    fn crossing_set_detects_identity_riding_segment() {
        // Equal to the identity on [0.3, 0.6], strictly above on (0, 0.3),
        // strictly below on (0.6, 1).
        let d = DistortionFunction::piecewise_linear(vec![
            (0.0, 0.0),
            (0.15, 0.25),
            (0.3, 0.3),
            (0.6, 0.6),
            (0.8, 0.7),
            (1.0, 1.0),
        ])
        .unwrap();
        let cs = d.crossing_set(4096).unwrap();
        assert_eq!(cs.points.len(), 2);
        assert_abs_diff_eq!(cs.points[0], 0.3, epsilon = 1e-8);
        assert_abs_diff_eq!(cs.points[1], 0.6, epsilon = 1e-8);
        assert_eq!(
            cs.sign_on_intervals,
            vec![RegionSign::Positive, RegionSign::Zero, RegionSign::Negative]
        );
    }

    #[test]
    fn crossing_set_matches_exact_linear_segment_intersection() {
        // Segments cross the identity where (v0 - t0) and (v1 - t1) straddle 0:
        // t* solves v0 + (t-t0)(v1-v0)/(t1-t0) = t.
        let knots = vec![(0.0, 0.0), (0.25, 0.4), (0.55, 0.45), (1.0, 1.0)];
        let d = DistortionFunction::piecewise_linear(knots.clone()).unwrap();
        let mut exact = Vec::new();
        for w in knots.windows(2) {
            let (t0, v0) = w[0];
            let (t1, v1) = w[1];
            let (d0, d1) = (v0 - t0, v1 - t1);
            if d0 * d1 < 0.0 {
                let slope = (v1 - v0) / (t1 - t0);
                exact.push((t0 * slope - v0) / (slope - 1.0));
            }
        }
        let cs = d.crossing_set(4096).unwrap();
        assert_eq!(cs.points.len(), exact.len());
        for (got, want) in cs.points.iter().zip(exact) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-9);
        }
    }

    #[test]
    fn crossing_set_enforces_minimum_resolution() {
        let d = DistortionFunction::identity();
        assert!(d.crossing_set(63).is_err());
        assert!(d.crossing_set(64).is_ok());
    }

    #[test]
    fn risk_aversion_classification() {
        assert!(DistortionFunction::tvar(0.5)
            .unwrap()
            .is_weakly_risk_averse(4096));
        assert!(DistortionFunction::identity().is_weakly_risk_averse(4096));
        assert!(!DistortionFunction::tversky_kahneman(0.5)
            .unwrap()
            .is_weakly_risk_averse(4096));

        assert!(DistortionFunction::tvar(0.9)
            .unwrap()
            .is_strongly_risk_averse(1024));
        assert!(!DistortionFunction::tversky_kahneman(0.5)
            .unwrap()
            .is_strongly_risk_averse(1024));
    }

    #[test]
    fn dominance_spot_checks() {
        let id = DistortionFunction::identity();
        let tvar9 = DistortionFunction::tvar(0.9).unwrap();
        let tvar95 = DistortionFunction::tvar(0.95).unwrap();
        let tk5 = DistortionFunction::tversky_kahneman(0.5).unwrap();

        assert!(tvar9.dominates(&id, 4096));
        assert!(tvar95.dominates(&tvar9, 4096));
        assert!(!tk5.dominates(&id, 4096));
        assert!(!id.dominates(&tvar9, 4096));
    }

    #[test]
    fn tk_crossing_point_increases_with_theta() {
        let mut prev = 0.0;
        for k in 0..=10 {
            let theta = 0.3 + 0.05 * k as f64;
            let cs = DistortionFunction::tversky_kahneman(theta)
                .unwrap()
                .crossing_set(4096)
                .unwrap();
            assert_eq!(cs.points.len(), 1, "theta = {theta}");
            assert!(
                cs.points[0] >= prev - 1e-9,
                "crossing point decreased at theta = {theta}"
            );
            prev = cs.points[0];
        }
    }

    #[test]
    fn conjugate_of_tvar_crosses_identity_from_below() {
        // T~(t) = max(0, (t - alpha)/(1 - alpha)) sits below the identity.
        let conj = DistortionFunction::tvar(0.9).unwrap().conjugate();
        let cs = conj.crossing_set(4096).unwrap();
        assert!(cs.points.is_empty());
        assert_eq!(cs.sign_on_intervals, vec![RegionSign::Negative]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn proptest_conjugation_is_an_involution(
            alpha in 0.05f64..0.95,
            theta in 0.35f64..=1.0,
            t in 0.0f64..=1.0,
        ) {
            let samples = [
                DistortionFunction::tvar(alpha).unwrap(),
                DistortionFunction::var(alpha).unwrap(),
                DistortionFunction::tversky_kahneman(theta).unwrap(),
            ];
            for d in samples {
                let twice = d.conjugate().conjugate();
                prop_assert!((twice.eval01(t) - d.eval01(t)).abs() <= 1e-12);
            }
        }

        #[test]
        fn proptest_evaluation_is_monotone_and_bounded(
            theta in 0.35f64..=1.0,
            a in 0.0f64..=1.0,
            b in 0.0f64..=1.0,
        ) {
            let d = DistortionFunction::tversky_kahneman(theta).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let (x, y) = (d.eval01(lo), d.eval01(hi));
            prop_assert!((0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y));
            prop_assert!(x <= y + 1e-12);
        }
    }
}
