//! Rényi divergences, generalized free energies and the catalytic second laws.

mod laws;
mod renyi;
mod smoothing;

pub use laws::{
    check_cto_transition, check_cto_with_ancilla, free_energy, free_energy_alpha, AlphaGrid,
    GeneralizedFreeEnergy, CTO_TOLERANCE, DEFAULT_ALPHA_GRID, REFINEMENT_WIDTH,
};
pub(crate) use laws::gap;
pub use renyi::{
    gibbs_divergence, renyi_divergence, state_divergence, DivergenceProfile, ProfilePoint,
    RenyiAlpha,
};
pub use smoothing::{
    iid_extend, smooth_free_energy, smooth_max_divergence, smooth_support_divergence,
    smoothed_max_state,
};
