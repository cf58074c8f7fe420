//! Entropy inequalities for invariant processes on regular graphs: binary
//! entropy, the `kappa` counting identities, the finite sparse and dense
//! chains, their solved bounds, and empirical star-entropy checks.

mod bounds;
mod dist;
mod kappa;
mod star;

pub use bounds::{
    dense_bound, dense_feasible, expander_density_bound, sit_bound, sit_domain_upper, sit_feasible,
    BoundCurve, BoundPoint, BoundStatus, Chain, FeasibilityResult, SignChange, SCAN_POINTS,
};
pub use dist::{
    binary_entropy, conditional_entropy, entropy, Distribution, Given, JointDistribution,
};
pub use kappa::{
    dense_bookkeeping_residual, kappa_dense, kappa_sparse, sparse_bookkeeping_residual,
};
pub use star::{
    beta_weight, leaf_entropy_check, star_entropy_check, BetaEstimate, LeafEntropyCheck,
    StarEntropyReport, StarSample,
};
