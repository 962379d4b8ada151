//! Non-private statistical estimation: marginal and conditional probability
//! tables over focal points, mutual information, and 1-D Wasserstein
//! distance. Generators select focal points by these statistics (then noise
//! the measurements); attacks compare the same statistics across datasets.

mod focal;
mod mi;
mod onehot;
mod table;
mod wasserstein;

pub use focal::FocalPoint;
pub use mi::{entropy, mutual_information, mutual_information_joint};
pub use onehot::OneHotMap;
pub use table::{estimate_conditional, estimate_focal, estimate_marginal, estimate_onehot_marginal, ProbabilityTable};
pub use wasserstein::{dataset_distance, wasserstein_1d};
