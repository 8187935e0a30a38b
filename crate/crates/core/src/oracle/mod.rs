//! Independent randomized and brute-force machinery for cross-checking the deciders.

mod catalyst;
mod sampler;
mod simplex;

pub use catalyst::{catalyst_search, Catalyst, CatalystGrid};
pub use sampler::{sample_bistochastic, sample_gibbs_stochastic, SeededSampler};
pub use simplex::{feasibility_lp, LpOutcome, LP_TOLERANCE};
