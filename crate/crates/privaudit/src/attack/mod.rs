//! Membership-inference attacks against marginals-based synthetic data.
//!
//! The main pipeline treats the generator as a known algorithm and shadow-
//! models which focal points it measures ([`shadow_profile`]), estimates a
//! per-target density ratio between the synthetic and auxiliary data over
//! those focal points ([`zeta`]), and maps scores to membership
//! probabilities ([`activate`]). A generic density-ratio baseline that
//! ignores the generator ([`domias_score`]) is included for comparison.

mod activate;
mod profile;
mod score;

pub use activate::{activate, activate_unknown, set_mi};
pub use profile::{random_profile, shadow_profile, FPProfile};
pub use score::{domias_score, zeta, zeta_log, zeta_log_with, zeta_with, TargetScore};
