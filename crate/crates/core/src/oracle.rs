//! Independent brute-force verification layer.
//!
//! Everything here recomputes quantities the analytic modules already
//! provide, on purpose by different routes: exhaustive per-cell minimization
//! on grids that deliberately do not align with the analytic partitions,
//! randomized falsification search over pricing distortions, and
//! quantile-space Stieltjes sums with exact quantile increments instead of
//! layer-space quadrature. Tests and the `verify` command compare the routes;
//! production code never calls into this module.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::choquet::{insurer_profit, Indemnity};
use crate::distortion::{sign_regimes, DistortionFunction, RegionSign};
use crate::equilibrium::{best_response, TiePolicy};
use crate::error::{Error, Result};
use crate::loss::LossModel;

/// Sign-scan resolution used by oracle searches.
const ORACLE_RESOLUTION: usize = 4096;

/// Uniform partition of [0, bound] into cells, with a finite set of cession
/// levels allowed per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteGrid {
    n: usize,
    bound: f64,
    levels: Vec<f64>,
}

impl DiscreteGrid {
    /// Grid with the default level set {0, 0.25, 0.5, 0.75, 1}.
    pub fn new(n: usize, bound: f64) -> Result<Self> {
        DiscreteGrid::with_levels(n, bound, vec![0.0, 0.25, 0.5, 0.75, 1.0])
    }

    /// Grid with a custom level set; levels must lie in [0,1].
    pub fn with_levels(n: usize, bound: f64, mut levels: Vec<f64>) -> Result<Self> {
        if n < 16 {
            return Err(Error::Resolution { got: n, min: 16 });
        }
        if !bound.is_finite() || bound <= 0.0 {
            return Err(Error::Domain {
                name: "bound",
                value: bound,
                min: 0.0,
                max: f64::INFINITY,
            });
        }
        if levels.is_empty() {
            return Err(Error::Construction {
                what: "discrete grid",
                reason: "level set is empty".to_string(),
            });
        }
        for &level in &levels {
            if !(0.0..=1.0).contains(&level) {
                return Err(Error::Construction {
                    what: "discrete grid",
                    reason: format!("level {level} outside [0,1]"),
                });
            }
        }
        levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
        levels.dedup();
        Ok(DiscreteGrid { n, bound, levels })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    fn cell(&self, i: usize) -> (f64, f64) {
        let a = self.bound * i as f64 / self.n as f64;
        let b = self.bound * (i + 1) as f64 / self.n as f64;
        (a, b)
    }
}

/// Composite Simpson rule with four panels; deliberately simpler than the
/// production quadrature (no breakpoint logic, no grading).
fn simpson<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let h = (b - a) / 8.0;
    let mut sum = f(a) + f(b);
    for k in 1..8 {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + h * k as f64);
    }
    sum * h / 3.0
}

fn check_grid_bound(grid: &DiscreteGrid, m: &LossModel) -> Result<()> {
    if (grid.bound - m.bound()).abs() > 1e-9 * m.bound().max(1.0) {
        return Err(Error::BoundMismatch {
            indemnity_bound: grid.bound,
            model_bound: m.bound(),
        });
    }
    Ok(())
}

/// Exhaustive per-cell minimization of the policyholder objective over the
/// grid's level set. The objective is separable across cells: a cell's
/// contribution is linear in its level with slope integral of
/// (g(S) - T(S)) over the cell, so the per-cell optimum is exact. Ties pick
/// the lowest level.
pub fn discrete_best_response(
    t: &DistortionFunction,
    g: &DistortionFunction,
    m: &LossModel,
    grid: &DiscreteGrid,
) -> Result<(Indemnity, f64)> {
    check_grid_bound(grid, m)?;
    let lowest = grid.levels[0];
    let highest = *grid.levels.last().unwrap();

    let mut objective = 0.0;
    let mut pieces: Vec<(f64, f64)> = Vec::with_capacity(grid.n);
    for i in 0..grid.n {
        let (a, b) = grid.cell(i);
        let base = simpson(|y| t.eval01(m.survival_clamped(y)), a, b);
        let diff = simpson(
            |y| {
                let s = m.survival_clamped(y);
                g.eval01(s) - t.eval01(s)
            },
            a,
            b,
        );
        let level = if diff < 0.0 { highest } else { lowest };
        objective += base + level * diff;
        match pieces.last_mut() {
            Some(last) if last.1 == level => last.0 = b,
            _ => pieces.push((b, level)),
        }
    }
    Ok((Indemnity::new(pieces)?, objective))
}

/// Exhaustive per-cell minimization of the welfare objective
/// integral of (1 - kappa) T(S) + kappa S over the grid's level set.
pub fn discrete_pareto_scan(
    m: &LossModel,
    t: &DistortionFunction,
    grid: &DiscreteGrid,
) -> Result<f64> {
    check_grid_bound(grid, m)?;
    let lowest = grid.levels[0];
    let highest = *grid.levels.last().unwrap();

    let mut objective = 0.0;
    for i in 0..grid.n {
        let (a, b) = grid.cell(i);
        let base = simpson(|y| t.eval01(m.survival_clamped(y)), a, b);
        let diff = simpson(
            |y| {
                let s = m.survival_clamped(y);
                s - t.eval01(s)
            },
            a,
            b,
        );
        let level = if diff < 0.0 { highest } else { lowest };
        objective += base + level * diff;
    }
    Ok(objective)
}

/// Build a piecewise-linear distortion from sorted interior values on the
/// uniform knot grid.
fn piecewise_from_sorted(knots: usize, values: &[f64]) -> Result<DistortionFunction> {
    let mut pts = Vec::with_capacity(knots);
    pts.push((0.0, 0.0));
    for (j, &v) in values.iter().enumerate() {
        pts.push(((j + 1) as f64 / (knots - 1) as f64, v));
    }
    pts.push((1.0, 1.0));
    DistortionFunction::piecewise_linear(pts)
}

/// Falsification search against the equilibrium profit: sample `trials`
/// random monotone piecewise-linear pricing distortions (sorted uniform knot
/// values on a fixed knot grid), compute the policyholder's best response
/// with insurer-optimistic tie-breaking, and return the largest profit found.
/// Deterministic for a fixed seed; trials are evaluated concurrently and
/// combined by max.
pub fn random_pricing_search(
    t: &DistortionFunction,
    m: &LossModel,
    trials: usize,
    knots: usize,
    seed: u64,
) -> Result<f64> {
    if trials < 1 {
        return Err(Error::Construction {
            what: "random pricing search",
            reason: format!("need at least 1 trial, got {trials}"),
        });
    }
    if knots < 4 {
        return Err(Error::Construction {
            what: "random pricing search",
            reason: format!("need at least 4 knots, got {knots}"),
        });
    }

    // Draw every trial's knot values up front so the result does not depend
    // on how trials are scheduled across threads.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<Vec<f64>> = (0..trials)
        .map(|_| {
            let mut values: Vec<f64> = (0..knots - 2).map(|_| rng.gen::<f64>()).collect();
            values.sort_by(|a, b| a.partial_cmp(b).unwrap());
            values
        })
        .collect();

    let threads = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(trials);
    let chunk_size = trials.div_ceil(threads);

    let best_per_chunk: Result<Vec<f64>> = std::thread::scope(|scope| {
        let handles: Vec<_> = samples
            .chunks(chunk_size)
            .map(|chunk| {
                scope.spawn(move || -> Result<f64> {
                    let mut best = f64::NEG_INFINITY;
                    for values in chunk {
                        let g = piecewise_from_sorted(knots, values)?;
                        let (response, _) =
                            best_response(t, &g, m, TiePolicy::InsurerOptimal, ORACLE_RESOLUTION)?;
                        best = best.max(insurer_profit(&response, m, &g)?);
                    }
                    Ok(best)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("search thread panicked"))
            .collect()
    });

    Ok(best_per_chunk?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Clustering map for Stieltjes meshes: smooth on (0,1) with vanishing
/// derivative at both ends, so mesh cells shrink quadratically toward the
/// piece boundaries where distortion derivatives can blow up.
fn smoothstep(s: f64) -> f64 {
    s * s * (3.0 - 2.0 * s)
}

/// Midpoint Stieltjes sum of w against the quantile function over [a, b]:
/// sum of w(t_mid) * (Q(t_hi) - Q(t_lo)) over a graded mesh. The quantile
/// increments are exact, so steep or vertical quantile tangents cost nothing.
fn stieltjes_piece<W: Fn(f64) -> f64>(m: &LossModel, a: f64, b: f64, n: usize, w: &W) -> f64 {
    let mut total = 0.0;
    let mut q_prev = m.quantile_clamped(a);
    for k in 1..=n {
        let s_hi = k as f64 / n as f64;
        let s_mid = (k as f64 - 0.5) / n as f64;
        let t_hi = a + (b - a) * smoothstep(s_hi);
        let t_mid = a + (b - a) * smoothstep(s_mid);
        let q_hi = m.quantile_clamped(t_hi);
        total += w(t_mid) * (q_hi - q_prev);
        q_prev = q_hi;
    }
    total
}

fn piece_cells(total_cells: usize, width: f64) -> usize {
    ((total_cells as f64 * width).ceil() as usize).clamp(256, total_cells.max(256))
}

/// Equilibrium profit evaluated directly in probability space: the integral
/// of (t - conj(T)(t)) against the quantile function over the set where it is
/// positive, by midpoint Stieltjes sums with `cells` mesh cells. This is the
/// cross-validation route for the layer-form profit.
pub fn quantile_route_profit(
    t: &DistortionFunction,
    m: &LossModel,
    cells: usize,
) -> Result<f64> {
    let conj = t.conjugate();
    let e = move |u: f64| u - conj.eval01(u);
    let (points, signs) = sign_regimes(&e, 0.0, 1.0, ORACLE_RESOLUTION);
    let mut bounds = Vec::with_capacity(points.len() + 2);
    bounds.push(0.0);
    bounds.extend_from_slice(&points);
    bounds.push(1.0);

    let mut total = 0.0;
    for (i, sign) in signs.iter().enumerate() {
        if *sign != RegionSign::Positive {
            continue;
        }
        let (a, b) = (bounds[i], bounds[i + 1]);
        total += stieltjes_piece(m, a, b, piece_cells(cells, b - a), &e);
    }
    Ok(total)
}

/// Policyholder objective evaluated directly in probability space:
/// integral of (1 - kappa(Q(t))) T(1-t) + kappa(Q(t)) g(1-t) against the
/// quantile function, split at the images of indemnity segment bounds and at
/// conjugate kink points. Cross-validation route for the layer-form
/// objective.
pub fn quantile_form_objective(
    ind: &Indemnity,
    m: &LossModel,
    t: &DistortionFunction,
    g: &DistortionFunction,
    cells: usize,
) -> Result<f64> {
    if (ind.upper_bound() - m.bound()).abs() > 1e-9 * m.bound().max(1.0) {
        return Err(Error::BoundMismatch {
            indemnity_bound: ind.upper_bound(),
            model_bound: m.bound(),
        });
    }

    let mut breaks: Vec<f64> = t
        .critical_ts()
        .iter()
        .chain(g.critical_ts().iter())
        .map(|&c| 1.0 - c)
        .collect();
    let mut segment_bounds: Vec<f64> = ind.segments().map(|(_, hi, _)| hi).collect();
    segment_bounds.pop();
    breaks.extend(segment_bounds.iter().map(|&y| m.cdf_clamped(y)));
    breaks.retain(|&u| u > 0.0 && u < 1.0);
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup();

    let w = |u: f64| {
        let k = ind.marginal_at(m.quantile_clamped(u));
        let s = 1.0 - u;
        (1.0 - k) * t.eval01(s) + k * g.eval01(s)
    };

    let mut total = 0.0;
    let mut lo = 0.0;
    for hi in breaks.into_iter().chain(std::iter::once(1.0)) {
        if hi > lo {
            total += stieltjes_piece(m, lo, hi, piece_cells(cells, hi - lo), &w);
            lo = hi;
        }
    }
    Ok(total)
}

/// The standard verification battery: four loss models crossed with five
/// preference distortions, with human-readable names.
pub fn battery() -> Vec<(String, DistortionFunction, LossModel)> {
    let losses = vec![
        ("uniform(10)", LossModel::uniform(10.0).unwrap()),
        (
            "truncexp(0.5,10)",
            LossModel::truncated_exponential(0.5, 10.0).unwrap(),
        ),
        (
            "truncexp(1,10)",
            LossModel::truncated_exponential(1.0, 10.0).unwrap(),
        ),
        (
            "kumaraswamy(1.5,0.5,10)",
            LossModel::kumaraswamy(1.5, 0.5, 10.0).unwrap(),
        ),
    ];
    let inverse_s_pl = DistortionFunction::piecewise_linear(vec![
        (0.0, 0.0),
        (0.05, 0.25),
        (0.3, 0.45),
        (0.7, 0.75),
        (1.0, 1.0),
    ])
    .unwrap();
    let distortions = vec![
        ("tvar(0.9)", DistortionFunction::tvar(0.9).unwrap()),
        ("var(0.9)", DistortionFunction::var(0.9).unwrap()),
        ("tk(0.5)", DistortionFunction::tversky_kahneman(0.5).unwrap()),
        ("tk(0.7)", DistortionFunction::tversky_kahneman(0.7).unwrap()),
        ("pl-inverse-s", inverse_s_pl),
    ];

    let mut out = Vec::with_capacity(losses.len() * distortions.len());
    for (dname, d) in &distortions {
        for (lname, l) in &losses {
            out.push((format!("{dname} + {lname}"), d.clone(), l.clone()));
        }
    }
    out
}

/// Random ordered distortion pair from the tail-value-at-risk family:
/// the second dominates the first pointwise.
pub fn random_dominated_tvar<R: Rng>(rng: &mut R) -> (DistortionFunction, DistortionFunction) {
    let a_lo = rng.gen_range(0.5..0.9);
    let a_hi = rng.gen_range(a_lo..0.98);
    (
        DistortionFunction::tvar(a_lo).unwrap(),
        DistortionFunction::tvar(a_hi).unwrap(),
    )
}

/// Random ordered pair from the value-at-risk family.
pub fn random_dominated_var<R: Rng>(rng: &mut R) -> (DistortionFunction, DistortionFunction) {
    let a_lo = rng.gen_range(0.5..0.9);
    let a_hi = rng.gen_range(a_lo..0.98);
    (
        DistortionFunction::var(a_lo).unwrap(),
        DistortionFunction::var(a_hi).unwrap(),
    )
}

/// Random ordered piecewise-linear pair: the dominating one scales every
/// value toward 1 by a common factor, preserving monotonicity.
pub fn random_dominated_piecewise<R: Rng>(
    rng: &mut R,
) -> (DistortionFunction, DistortionFunction) {
    const KNOTS: usize = 8;
    let mut v1: Vec<f64> = (0..KNOTS - 2).map(|_| rng.gen::<f64>()).collect();
    v1.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let s = rng.gen_range(0.2..1.0);
    let v2: Vec<f64> = v1.iter().map(|&v| 1.0 - (1.0 - v) * s).collect();
    (
        piecewise_from_sorted(KNOTS, &v1).unwrap(),
        piecewise_from_sorted(KNOTS, &v2).unwrap(),
    )
}

/// Random ordered tabulated pair, same scaling construction on a uniform
/// value grid.
pub fn random_dominated_tabulated<R: Rng>(
    rng: &mut R,
) -> (DistortionFunction, DistortionFunction) {
    const N: usize = 33;
    let mut interior: Vec<f64> = (0..N - 2).map(|_| rng.gen::<f64>()).collect();
    interior.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let s = rng.gen_range(0.2..1.0);

    let mut v1 = Vec::with_capacity(N);
    let mut v2 = Vec::with_capacity(N);
    v1.push(0.0);
    v2.push(0.0);
    for &v in &interior {
        v1.push(v);
        v2.push(1.0 - (1.0 - v) * s);
    }
    v1.push(1.0);
    v2.push(1.0);
    (
        DistortionFunction::tabulated(v1).unwrap(),
        DistortionFunction::tabulated(v2).unwrap(),
    )
}
