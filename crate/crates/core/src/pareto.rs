//! Pareto optimality, individual rationality, and the converse construction
//! of an equilibrium from a Pareto-optimal contract.
//!
//! The welfare objective (policyholder risk minus insurer profit) is
//! premium-invariant: a transfer shifts both sides equally. In layer form it
//! reads integral of (1 - kappa) T(S) + kappa S dy, which is linear in kappa
//! pointwise, so its exact minimizer is bang-bang: cede where T(S) > S,
//! retain where T(S) < S, anything on ties. A contract is Pareto optimal iff
//! its objective matches that analytic minimum.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::choquet::{
    self, choquet_of_indemnity, contract_policyholder_risk, drm_of_loss, insurer_profit,
    policyholder_objective, Contract, Indemnity,
};
use crate::distortion::DistortionFunction;
use crate::equilibrium::{equilibrium_partition, EquilibriumResult};
use crate::error::{Error, Result};
use crate::loss::LossModel;

/// A contract is accepted as Pareto optimal when its welfare objective is
/// within this much of the analytic minimum.
const PARETO_TOL: f64 = 1e-7;
/// Tolerance for the zero-surplus (indifference) precondition.
const INDIFFERENCE_TOL: f64 = 1e-7;
/// Slack for the individual-rationality booleans.
const IR_TOL: f64 = 1e-9;

/// Welfare summary of a priced contract.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelfareReport {
    /// Policyholder risk minus insurer profit; premium-invariant.
    pub pareto_objective: f64,
    /// (policyholder, insurer): whether each side is no worse off than
    /// without the contract.
    pub is_individually_rational: (bool, bool),
    /// Policyholder risk under the contract minus the uninsured risk;
    /// zero means the premium extracts the full surplus.
    pub indifference_gap: f64,
}

/// Outcome of a Pareto-optimality check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParetoCertificate {
    pub is_optimal: bool,
    /// Welfare objective of the checked contract.
    pub objective: f64,
    /// Analytic minimum over all feasible indemnities (bang-bang in layers).
    pub minimal_objective: f64,
    /// objective - minimal_objective; optimal iff at most 1e-7.
    pub gap: f64,
    /// Smallest objective seen among randomly sampled feasible indemnities,
    /// if sampling was requested; a cross-check that can only confirm, never
    /// beat, the analytic minimum (up to quadrature noise).
    pub sampled_minimum: Option<f64>,
}

/// Welfare objective of a contract: distorted retention risk plus expected
/// indemnity cost. The premium cancels between the two sides and does not
/// enter.
pub fn pareto_objective(c: &Contract, m: &LossModel, t: &DistortionFunction) -> Result<f64> {
    policyholder_objective(&c.indemnity, m, t, &DistortionFunction::identity())
}

/// The analytic minimum of the welfare objective: integral of min(T(S), S).
fn minimal_objective(t: &DistortionFunction, m: &LossModel, resolution: usize) -> Result<f64> {
    let crossing_set = t.crossing_set(resolution)?;
    let mut t_breaks = t.critical_ts();
    t_breaks.extend_from_slice(&crossing_set.points);
    Ok(choquet::layer_integral(m, &t_breaks, &[], |_, s| {
        t.eval01(s).min(s)
    }))
}

/// Random feasible indemnity on [0, M] with the given number of segments.
fn random_indemnity<R: Rng>(rng: &mut R, bound: f64, segments: usize) -> Indemnity {
    let mut uppers: Vec<f64> = (0..segments - 1)
        .map(|_| rng.gen_range(0.0..bound))
        .collect();
    uppers.sort_by(|a, b| a.partial_cmp(b).unwrap());
    uppers.dedup();
    uppers.retain(|&u| u > 0.0);
    uppers.push(bound);
    let pairs: Vec<(f64, f64)> = uppers
        .into_iter()
        .map(|u| (u, rng.gen_range(0.0..=1.0)))
        .collect();
    Indemnity::new(pairs).expect("sorted positive bounds form a valid partition")
}

/// Check whether a contract is Pareto optimal: its welfare objective must
/// reach the analytic bang-bang minimum within 1e-7. If `samples` > 0, that
/// many random feasible indemnities are also evaluated (fixed internal seed)
/// and their best objective is reported in the certificate as an independent
/// sanity check of the minimum.
pub fn is_pareto_optimal(
    c: &Contract,
    m: &LossModel,
    t: &DistortionFunction,
    resolution: usize,
    samples: usize,
) -> Result<ParetoCertificate> {
    let objective = pareto_objective(c, m, t)?;
    let minimal = minimal_objective(t, m, resolution)?;
    let gap = objective - minimal;

    let sampled_minimum = if samples > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x7061_7265_746f);
        let mut best = f64::INFINITY;
        for _ in 0..samples {
            let ind = random_indemnity(&mut rng, m.bound(), 16);
            let sample = Contract::new(ind, 0.0)?;
            best = best.min(pareto_objective(&sample, m, t)?);
        }
        Some(best)
    } else {
        None
    };

    Ok(ParetoCertificate {
        is_optimal: gap <= PARETO_TOL,
        objective,
        minimal_objective: minimal,
        gap,
        sampled_minimum,
    })
}

/// Welfare summary: objective, individual rationality of both sides, and the
/// policyholder's surplus gap.
pub fn welfare_report(c: &Contract, m: &LossModel, t: &DistortionFunction) -> Result<WelfareReport> {
    let objective = pareto_objective(c, m, t)?;
    let uninsured = drm_of_loss(m, t)?;
    let risk = contract_policyholder_risk(c, m, t)?;
    let expected_indemnity =
        choquet_of_indemnity(&c.indemnity, m, &DistortionFunction::identity())?;
    let profit = c.premium - expected_indemnity;
    Ok(WelfareReport {
        pareto_objective: objective,
        is_individually_rational: (risk <= uninsured + IR_TOL, profit >= -IR_TOL),
        indifference_gap: risk - uninsured,
    })
}

/// Rebuild the Stackelberg equilibrium supported by a Pareto-optimal,
/// zero-surplus contract: the insurer prices at the policyholder's own
/// distortion and the given indemnity is a best response with the given
/// premium.
///
/// Preconditions (each reported with its gap on failure): the contract must
/// be Pareto optimal (objective within 1e-7 of the minimum) and the premium
/// must leave the policyholder indifferent to no insurance (within 1e-7).
pub fn equilibrium_from_pareto(
    c: &Contract,
    m: &LossModel,
    t: &DistortionFunction,
    resolution: usize,
) -> Result<EquilibriumResult> {
    let certificate = is_pareto_optimal(c, m, t, resolution, 0)?;
    if !certificate.is_optimal {
        return Err(Error::NotParetoOptimal {
            gap: certificate.gap,
        });
    }
    let indifference_gap = contract_policyholder_risk(c, m, t)? - drm_of_loss(m, t)?;
    if indifference_gap.abs() > INDIFFERENCE_TOL {
        return Err(Error::NotIndifferent {
            gap: indifference_gap,
        });
    }

    let partition = equilibrium_partition(t, m, resolution)?;
    let premium = choquet_of_indemnity(&c.indemnity, m, t)?;
    let mut t_breaks = t.critical_ts();
    t_breaks.extend_from_slice(&partition.crossing_set.points);
    let profit = choquet::layer_integral(m, &t_breaks, &[], |_, s| (t.eval01(s) - s).max(0.0));
    let profit_insurer_route = insurer_profit(&c.indemnity, m, t)?;
    let repriced = Contract::new(c.indemnity.clone(), premium)?;
    let policyholder_risk = contract_policyholder_risk(&repriced, m, t)?;
    let crossing_set = partition.crossing_set.clone();

    Ok(EquilibriumResult {
        pricing: t.clone(),
        indemnity: c.indemnity.clone(),
        premium,
        profit,
        profit_insurer_route,
        policyholder_risk,
        partition,
        crossing_set,
    })
}
