//! Crate-wide error type.
//!
//! Errors split into three broad classes that callers treat differently:
//! construction/domain errors (bad inputs, rejected up front), precondition
//! errors (a required mathematical property does not hold for the given
//! inputs), and verification errors (two routes that must agree do not).

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument fell outside its mathematical domain.
    #[error("{name} = {value} outside [{min}, {max}]")]
    Domain {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    /// A value failed validation while building a domain object.
    #[error("invalid {what}: {reason}")]
    Construction { what: &'static str, reason: String },

    /// Scan resolution below the enforced minimum.
    #[error("resolution {got} below minimum {min}")]
    Resolution { got: usize, min: usize },

    /// An indemnity partition does not span the same interval as the loss model.
    #[error("indemnity spans [0, {indemnity_bound}] but loss model spans [0, {model_bound}]")]
    BoundMismatch {
        indemnity_bound: f64,
        model_bound: f64,
    },

    /// The two independent equilibrium-profit computations disagree beyond
    /// tolerance; signals a quadrature or partition failure.
    #[error("profit routes disagree: layer {layer} vs marginal {marginal} (gap {gap:e})")]
    ProfitRouteDisagreement { layer: f64, marginal: f64, gap: f64 },

    /// `compare` requires the second pricing distortion to dominate the first.
    #[error("dominance precondition failed: T2(t) < T1(t) by {max_gap:e} at t = {at}")]
    DominanceViolated { max_gap: f64, at: f64 },

    /// A contract handed to `equilibrium_from_pareto` is not Pareto optimal.
    #[error("contract is not Pareto optimal: objective exceeds the minimum by {gap:e}")]
    NotParetoOptimal { gap: f64 },

    /// A contract's premium does not leave the policyholder indifferent to no
    /// insurance; the gap is premium minus the indemnity's Choquet value.
    #[error("premium does not leave the policyholder indifferent: gap {gap:e}")]
    NotIndifferent { gap: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
