//! Privacy auditing for marginals-based synthetic tabular data.
//!
//! The crate has three layers:
//!
//! * **Generators** ([`gen`]): three differentially private synthesizers that
//!   share a select-measure-sample skeleton. A tree-structured model fit with
//!   a private spanning tree over pairwise mutual information ([`gen::mst`]),
//!   a Bayesian network with an epsilon-dependent parent cap
//!   ([`gen::privbayes`]), and an evolutionary fit against noisy one-hot
//!   marginal targets ([`gen::gsd`]).
//! * **Attacks** ([`attack`]): a shadow-modelling membership-inference attack
//!   that learns which focal points (marginal and conditional tables) a
//!   generator measures, then scores targets by weighted density ratios
//!   between synthetic and auxiliary data, plus a density-ratio baseline that
//!   needs no shadow runs.
//! * **Evaluation** ([`eval`], [`cli`]): trial/experiment orchestration over
//!   an epsilon grid with AUC, membership-advantage and ROC reporting, and
//!   distribution-distance quality checks.
//!
//! Everything is deterministic given a master seed: each component draws from
//! a named sub-stream (see [`rng`]) so results do not depend on thread count
//! or scheduling.

pub mod attack;
pub mod cli;
pub mod data;
pub mod dp;
pub mod error;
pub mod eval;
pub mod gen;
pub mod rng;
pub mod stats;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
