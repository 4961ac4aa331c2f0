//! Stackelberg equilibria in a monopolistic insurance market where the
//! policyholder evaluates risk through a distortion risk measure and the
//! insurer prices through a distortion premium principle.
//!
//! The insurer (leader) commits to a pricing distortion g; the policyholder
//! (follower) best-responds with an indemnity schedule chosen among
//! 1-Lipschitz no-sabotage contracts. Everything is computed in the layer
//! representation I(X) = integral of kappa(y) 1{X > y} dy, which turns each
//! functional into a one-dimensional integral of a piecewise-smooth function
//! over the loss support [0, M]:
//!
//! - `distortion`: distortion functions, conjugation, crossing sets,
//!   risk-aversion classification.
//! - `loss`: bounded loss models (uniform, truncated exponential,
//!   Kumaraswamy, tabulated) with strictly increasing CDFs.
//! - `choquet`: indemnities, contracts, and the four core functionals (risk
//!   measure, premium, policyholder objective, insurer profit).
//! - `equilibrium`: policyholder best response, the canonical Stackelberg
//!   equilibrium, two independent profit routes, comparative statics.
//! - `pareto`: Pareto-optimality certificates, individual rationality, and
//!   the construction of an equilibrium from a Pareto-optimal contract.
//! - `oracle`: independent brute-force verification (discrete best response,
//!   random pricing search, discrete Pareto scan, quantile-space routes).
//! - `config`: typed run configuration shared with the command-line driver.

pub mod choquet;
pub mod config;
pub mod distortion;
pub mod equilibrium;
pub mod error;
pub mod loss;
pub mod oracle;
pub mod pareto;
mod quad;

pub use choquet::{
    choquet_of_indemnity, contract_policyholder_risk, drm_of_loss, insurer_profit,
    policyholder_objective, Contract, Indemnity,
};
pub use config::RunConfig;
pub use distortion::{CrossingSet, DistortionFunction, RegionSign};
pub use equilibrium::{
    best_response, compare, equilibrium_profit_quantile_form, solve, ComparisonReport,
    EquilibriumResult, Region, RegionLabel, SignRegionPartition, TiePolicy,
};
pub use error::{Error, Result};
pub use loss::LossModel;
pub use pareto::{
    equilibrium_from_pareto, is_pareto_optimal, pareto_objective, welfare_report,
    ParetoCertificate, WelfareReport,
};
