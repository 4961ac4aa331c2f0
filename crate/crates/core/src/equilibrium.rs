//! Policyholder best response, the canonical leader-follower equilibrium, and
//! comparative statics.
//!
//! Everything here reduces to sign analysis of a difference of distortions in
//! probability space. For the best response against a pricing distortion g,
//! the relevant sign is g(t) - T(t): ceding a layer at survival level t costs
//! g(t) and saves T(t), so the layer is ceded where g < T and retained where
//! g > T. At equilibrium the insurer prices with g* = T, every layer is a tie
//! for the policyholder, and the insurer's profit on a ceded layer at level t
//! is T(t) - t; the equilibrium indemnity cedes exactly the layers where
//! T(S(y)) > S(y).
//!
//! Sign regimes are detected by dense scanning plus bisection in t-space and
//! mapped to loss space through y = quantile(1 - t), which reverses order.

use crate::choquet::{
    self, choquet_of_indemnity, contract_policyholder_risk, insurer_profit, Contract, Indemnity,
};
use crate::distortion::{sign_regimes, CrossingSet, DistortionFunction, RegionSign};
use crate::error::{Error, Result};
use crate::loss::LossModel;

/// Minimum sign-scan resolution accepted by the solvers.
pub(crate) const MIN_RESOLUTION: usize = 64;
/// Both equilibrium-profit routes must agree this closely.
const PROFIT_ROUTE_TOL: f64 = 1e-7;

/// How a tie segment (where the policyholder is exactly indifferent) is
/// resolved into a cession level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TiePolicy {
    /// Retain tied layers (cession level 0).
    #[default]
    Retain,
    /// Cede tied layers (cession level 1).
    Cede,
    /// Cede exactly the tied layers that are profitable for the insurer:
    /// level 1 where g(t) > t, else 0.
    InsurerOptimal,
}

/// Label of a sign region: cede fully, retain fully, or indifferent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionLabel {
    Full,
    None,
    Tie,
}

impl std::fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RegionLabel::Full => "FULL",
            RegionLabel::None => "NONE",
            RegionLabel::Tie => "TIE",
        })
    }
}

/// One labeled segment of the loss support, with the probability-space
/// interval that generated it (y = quantile(1 - t), so t order is reversed).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub t_lo: f64,
    pub t_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
    pub label: RegionLabel,
}

/// Ordered partition of [0, M] into FULL / NONE / TIE segments, together with
/// the t-space crossing set that generated it.
#[derive(Debug, Clone, PartialEq)]
pub struct SignRegionPartition {
    /// Segments in increasing y order; contiguous and covering [0, M].
    pub regions: Vec<Region>,
    /// Sign-change points and interval signs of the scanned difference.
    pub crossing_set: CrossingSet,
}

impl SignRegionPartition {
    /// Label at a loss level y (regions are right-closed).
    pub fn label_at(&self, y: f64) -> RegionLabel {
        let i = self
            .regions
            .partition_point(|r| r.y_hi < y)
            .min(self.regions.len() - 1);
        self.regions[i].label
    }
}

/// Canonical equilibrium output.
#[derive(Debug, Clone)]
pub struct EquilibriumResult {
    /// The insurer's optimal pricing distortion (the canonical selection
    /// prices at the policyholder's own distortion).
    pub pricing: DistortionFunction,
    /// The induced cession schedule.
    pub indemnity: Indemnity,
    /// Premium charged: Choquet value of the indemnity under the pricing
    /// distortion.
    pub premium: f64,
    /// Insurer's expected profit via the layer route, the integral of
    /// (T(S(y)) - S(y))^+ over the support.
    pub profit: f64,
    /// The same profit via premium minus expected indemnity cost; must agree
    /// with `profit` within 1e-7.
    pub profit_insurer_route: f64,
    /// Policyholder's risk under the contract: distorted retention risk plus
    /// premium. Equals the uninsured risk (indifference).
    pub policyholder_risk: f64,
    /// FULL/NONE/TIE segmentation of the loss support by sign of T(S) - S.
    pub partition: SignRegionPartition,
    /// Crossing set of the preference distortion against the identity.
    pub crossing_set: CrossingSet,
}

fn check_resolution(resolution: usize) -> Result<()> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::Resolution {
            got: resolution,
            min: MIN_RESOLUTION,
        });
    }
    Ok(())
}

/// Scan the sign of `f` over t in (0,1), map regimes to loss space, and label
/// them through `to_label`.
fn build_partition<F: Fn(f64) -> f64>(
    f: &F,
    m: &LossModel,
    resolution: usize,
    to_label: fn(RegionSign) -> RegionLabel,
) -> SignRegionPartition {
    let (points, signs) = sign_regimes(f, 0.0, 1.0, resolution);
    let crossing_set = CrossingSet {
        points: points.clone(),
        sign_on_intervals: signs.clone(),
    };
    let mut t_bounds = Vec::with_capacity(points.len() + 2);
    t_bounds.push(0.0);
    t_bounds.extend_from_slice(&points);
    t_bounds.push(1.0);
    let ys: Vec<f64> = t_bounds
        .iter()
        .map(|&t| m.quantile_clamped(1.0 - t))
        .collect();

    let mut regions = Vec::with_capacity(signs.len());
    for i in (0..signs.len()).rev() {
        regions.push(Region {
            t_lo: t_bounds[i],
            t_hi: t_bounds[i + 1],
            y_lo: ys[i + 1],
            y_hi: ys[i],
            label: to_label(signs[i]),
        });
    }
    SignRegionPartition {
        regions,
        crossing_set,
    }
}

/// Assemble the piecewise-constant cession schedule from a labeled partition,
/// resolving ties with the given policy (for InsurerOptimal, by the sign of
/// g(t) - t inside each tie segment).
fn indemnity_from_partition(
    partition: &SignRegionPartition,
    tie: TiePolicy,
    g: &DistortionFunction,
    m: &LossModel,
    resolution: usize,
) -> Result<Indemnity> {
    // Pieces as (y upper bound, level), ascending in y.
    let mut pieces: Vec<(f64, f64)> = Vec::new();
    for region in &partition.regions {
        match region.label {
            RegionLabel::Full => pieces.push((region.y_hi, 1.0)),
            RegionLabel::None => pieces.push((region.y_hi, 0.0)),
            RegionLabel::Tie => match tie {
                TiePolicy::Retain => pieces.push((region.y_hi, 0.0)),
                TiePolicy::Cede => pieces.push((region.y_hi, 1.0)),
                TiePolicy::InsurerOptimal => {
                    let e = |u: f64| g.eval01(u) - u;
                    let (pts, signs) = sign_regimes(&e, region.t_lo, region.t_hi, resolution);
                    let mut bounds = Vec::with_capacity(pts.len() + 2);
                    bounds.push(region.t_lo);
                    bounds.extend_from_slice(&pts);
                    bounds.push(region.t_hi);
                    // Sub-intervals ascend in t; walk them in reverse for
                    // ascending y.
                    for i in (0..signs.len()).rev() {
                        let level = if signs[i] == RegionSign::Positive {
                            1.0
                        } else {
                            0.0
                        };
                        let y_hi = if i == 0 {
                            region.y_hi
                        } else {
                            m.quantile_clamped(1.0 - bounds[i])
                        };
                        pieces.push((y_hi, level));
                    }
                }
            },
        }
    }

    // Merge equal adjacent levels, drop zero-width slivers, pin the final
    // bound to the support bound exactly.
    let bound = m.bound();
    let mut segments: Vec<(f64, f64)> = Vec::new();
    for (upper, level) in pieces {
        let upper = upper.min(bound);
        match segments.last_mut() {
            None if upper <= 0.0 => {}
            Some(last) if upper <= last.0 => {}
            Some(last) if last.1 == level => last.0 = upper,
            _ => segments.push((upper, level)),
        }
    }
    segments
        .last_mut()
        .expect("a sign partition always yields at least one segment")
        .0 = bound;
    Indemnity::new(segments)
}

fn response_label(sign: RegionSign) -> RegionLabel {
    // Scanned difference is g - T: cede where pricing is below preference.
    match sign {
        RegionSign::Negative => RegionLabel::Full,
        RegionSign::Positive => RegionLabel::None,
        RegionSign::Zero => RegionLabel::Tie,
    }
}

fn equilibrium_label(sign: RegionSign) -> RegionLabel {
    // Scanned difference is T - id: cede where the distortion sits above the
    // identity.
    match sign {
        RegionSign::Positive => RegionLabel::Full,
        RegionSign::Negative => RegionLabel::None,
        RegionSign::Zero => RegionLabel::Tie,
    }
}

/// Partition of the loss support by the sign of T(S(y)) - S(y), as used by
/// the equilibrium construction (shared with the Pareto converse).
pub(crate) fn equilibrium_partition(
    t: &DistortionFunction,
    m: &LossModel,
    resolution: usize,
) -> Result<SignRegionPartition> {
    check_resolution(resolution)?;
    let f = |u: f64| t.eval01(u) - u;
    Ok(build_partition(&f, m, resolution, equilibrium_label))
}

/// The policyholder's optimal cession against pricing distortion g: cede
/// layers where g(S(y)) < T(S(y)), retain where g > T, apply the tie policy
/// where they agree. Returns the schedule and the generating partition.
pub fn best_response(
    t: &DistortionFunction,
    g: &DistortionFunction,
    m: &LossModel,
    tie: TiePolicy,
    resolution: usize,
) -> Result<(Indemnity, SignRegionPartition)> {
    check_resolution(resolution)?;
    let f = |u: f64| g.eval01(u) - t.eval01(u);
    let partition = build_partition(&f, m, resolution, response_label);
    let indemnity = indemnity_from_partition(&partition, tie, g, m, resolution)?;
    Ok((indemnity, partition))
}

/// Layer-route equilibrium profit: integral of (T(S(y)) - S(y))^+ over the
/// support, split at the crossing images so the positive-part kinks land on
/// quadrature cell boundaries.
fn profit_layer_route(t: &DistortionFunction, m: &LossModel, crossing_points: &[f64]) -> f64 {
    let mut t_breaks = t.critical_ts();
    t_breaks.extend_from_slice(crossing_points);
    choquet::layer_integral(m, &t_breaks, &[], |_, s| (t.eval01(s) - s).max(0.0))
}

/// Canonical Stackelberg equilibrium for preference distortion T: the insurer
/// prices with g* = T, the policyholder cedes exactly the layers where
/// T(S(y)) > S(y), the premium is the Choquet value of the cession under T,
/// and the policyholder ends up indifferent to being uninsured.
///
/// The profit is computed by two independent routes (layer integral of
/// (T(S) - S)^+, and premium minus expected indemnity cost); disagreement
/// beyond 1e-7 is reported as an error rather than silently averaged.
pub fn solve(
    t: &DistortionFunction,
    m: &LossModel,
    tie: TiePolicy,
    resolution: usize,
) -> Result<EquilibriumResult> {
    check_resolution(resolution)?;
    let f = |u: f64| t.eval01(u) - u;
    let partition = build_partition(&f, m, resolution, equilibrium_label);
    let indemnity = indemnity_from_partition(&partition, tie, t, m, resolution)?;

    let premium = choquet_of_indemnity(&indemnity, m, t)?;
    let profit = profit_layer_route(t, m, &partition.crossing_set.points);
    let profit_insurer_route = insurer_profit(&indemnity, m, t)?;
    let gap = (profit - profit_insurer_route).abs();
    if gap > PROFIT_ROUTE_TOL {
        return Err(Error::ProfitRouteDisagreement {
            layer: profit,
            marginal: profit_insurer_route,
            gap,
        });
    }

    let contract = Contract::new(indemnity.clone(), premium)?;
    let policyholder_risk = contract_policyholder_risk(&contract, m, t)?;
    let crossing_set = partition.crossing_set.clone();

    Ok(EquilibriumResult {
        pricing: t.clone(),
        indemnity,
        premium,
        profit,
        profit_insurer_route,
        policyholder_risk,
        partition,
        crossing_set,
    })
}

/// Equilibrium profit from the quantile-space formula, evaluated after the
/// change of variables that turns it into the layer integral of
/// (T(S(y)) - S(y))^+. Standalone route: runs its own crossing scan and no
/// best-response construction. A direct t-space evaluation with numerical
/// quantile increments lives in the oracle module for cross-validation.
pub fn equilibrium_profit_quantile_form(
    t: &DistortionFunction,
    m: &LossModel,
    resolution: usize,
) -> Result<f64> {
    let crossing_set = t.crossing_set(resolution)?;
    Ok(profit_layer_route(t, m, &crossing_set.points))
}

/// Equilibria under two comparable preference distortions, with the pointwise
/// coverage and profit comparisons that stronger risk aversion implies.
#[derive(Debug, Clone)]
pub struct ComparisonReport {
    /// Equilibrium under the dominated (less risk-averse) distortion.
    pub low: EquilibriumResult,
    /// Equilibrium under the dominating distortion.
    pub high: EquilibriumResult,
    /// max over the grid of I_low(x) - I_high(x); coverage dominance means
    /// this is at most 1e-8.
    pub max_indemnity_excess: f64,
    /// Whether I_low <= I_high + 1e-8 held everywhere on the grid.
    pub indemnity_dominated: bool,
    /// profit_low - profit_high; profit dominance means this is at most 1e-8.
    pub profit_excess: f64,
    /// Whether profit_low <= profit_high + 1e-8.
    pub profit_dominated: bool,
}

const COMPARISON_TOL: f64 = 1e-8;

/// Compare equilibria under T1 and a pointwise-dominating T2: coverage and
/// profit both increase with the distortion. Errors if T2 does not dominate
/// T1 (checked on a dense grid, reporting the worst violation).
pub fn compare(
    t1: &DistortionFunction,
    t2: &DistortionFunction,
    m: &LossModel,
    resolution: usize,
) -> Result<ComparisonReport> {
    check_resolution(resolution)?;

    let mut max_gap = 0.0_f64;
    let mut at = 0.0_f64;
    for i in 0..=resolution {
        let u = i as f64 / resolution as f64;
        let gap = t1.eval01(u) - t2.eval01(u);
        if gap > max_gap {
            max_gap = gap;
            at = u;
        }
    }
    if max_gap > 1e-10 {
        return Err(Error::DominanceViolated { max_gap, at });
    }

    let low = solve(t1, m, TiePolicy::Retain, resolution)?;
    let high = solve(t2, m, TiePolicy::Retain, resolution)?;

    let mut max_indemnity_excess = f64::NEG_INFINITY;
    for i in 0..=resolution {
        let x = m.bound() * i as f64 / resolution as f64;
        let excess = low.indemnity.indemnity_at(x) - high.indemnity.indemnity_at(x);
        max_indemnity_excess = max_indemnity_excess.max(excess);
    }
    let profit_excess = low.profit - high.profit;

    Ok(ComparisonReport {
        low,
        high,
        max_indemnity_excess,
        indemnity_dominated: max_indemnity_excess <= COMPARISON_TOL,
        profit_excess,
        profit_dominated: profit_excess <= COMPARISON_TOL,
    })
}
