//! Resource-theoretic thermodynamics of energy-incoherent states.

pub mod divergence;
pub mod engine;
pub mod error;
mod numeric;
pub mod oracle;
pub mod order;
mod serde_ext;
pub mod states;
pub mod thermo_curve;
pub mod verdict;
pub mod work;

pub use error::{Error, Result};
pub use states::{Hamiltonian, IncoherentState, InverseTemperature};
pub use verdict::{Certificate, TransitionVerdict};
