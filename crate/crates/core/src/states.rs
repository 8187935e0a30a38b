//! Energy-incoherent states, Hamiltonians and Gibbs states.
//!
//! A state is stored as a list of atoms `(probability, energy, multiplicity)`.
//! The probability of an atom is per copy, so an atom with multiplicity `m`
//! carries total mass `m * probability`. This keeps i.i.d. extensions
//! polynomial in size: every type class becomes a single atom.
//!
//! All logarithms are natural.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Atoms with per-copy probability at or below this value are outside the support.
pub const SUPPORT_THRESHOLD: f64 = 1e-15;

/// Allowed deviation of the total mass from one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

#[inline]
pub(crate) fn in_support(p: f64) -> bool {
    p > SUPPORT_THRESHOLD
}

/// Inverse temperature `β > 0`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct InverseTemperature(f64);

impl InverseTemperature {
    pub fn new(beta: f64) -> Result<Self> {
        if beta.is_finite() && beta > 0.0 {
            Ok(Self(beta))
        } else {
            Err(Error::InvalidBeta(beta))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// `1/β`, the temperature in energy units.
    #[inline]
    pub fn temperature(self) -> f64 {
        1.0 / self.0
    }
}

impl TryFrom<f64> for InverseTemperature {
    type Error = Error;

    fn try_from(beta: f64) -> Result<Self> {
        Self::new(beta)
    }
}

impl From<InverseTemperature> for f64 {
    fn from(beta: InverseTemperature) -> f64 {
        beta.0
    }
}

/// One energy eigenvalue together with its degeneracy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Level {
    pub energy: f64,
    pub multiplicity: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    levels: Vec<Level>,
}

impl Hamiltonian {
    /// Non-degenerate levels, one per energy.
    pub fn new(energies: &[f64]) -> Result<Self> {
        Self::from_levels(
            energies
                .iter()
                .map(|&energy| Level {
                    energy,
                    multiplicity: 1,
                })
                .collect(),
        )
    }

    pub fn with_multiplicities(energies: &[f64], multiplicities: &[u64]) -> Result<Self> {
        if energies.len() != multiplicities.len() {
            return Err(Error::InvalidHamiltonian(format!(
                "{} energies but {} multiplicities",
                energies.len(),
                multiplicities.len()
            )));
        }
        Self::from_levels(
            energies
                .iter()
                .zip(multiplicities)
                .map(|(&energy, &multiplicity)| Level {
                    energy,
                    multiplicity,
                })
                .collect(),
        )
    }

    pub fn from_levels(levels: Vec<Level>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidHamiltonian("no levels".into()));
        }
        for (i, level) in levels.iter().enumerate() {
            if !level.energy.is_finite() {
                return Err(Error::InvalidHamiltonian(format!(
                    "energy {i} is not finite ({})",
                    level.energy
                )));
            }
            if level.multiplicity == 0 {
                return Err(Error::InvalidHamiltonian(format!(
                    "level {i} has multiplicity 0"
                )));
            }
        }
        Ok(Self { levels })
    }

    /// `d` levels all at energy zero.
    pub fn degenerate(d: usize) -> Result<Self> {
        Self::new(&vec![0.0; d])
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// Number of distinct atoms (levels), not counting multiplicity.
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Hilbert-space dimension, `Σ m_i`.
    pub fn dimension(&self) -> u64 {
        self.levels.iter().map(|l| l.multiplicity).sum()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    pub fn multiplicities(&self) -> Vec<u64> {
        self.levels.iter().map(|l| l.multiplicity).collect()
    }

    /// True when every level has the same energy (noisy-operation regime).
    pub fn is_degenerate(&self) -> bool {
        let e0 = self.levels[0].energy;
        self.levels.iter().all(|l| l.energy == e0)
    }

    /// Non-interacting composite: energies add, multiplicities multiply.
    pub fn tensor(&self, other: &Hamiltonian) -> Result<Hamiltonian> {
        let mut levels = Vec::with_capacity(self.len() * other.len());
        for a in &self.levels {
            for b in &other.levels {
                let multiplicity = a
                    .multiplicity
                    .checked_mul(b.multiplicity)
                    .ok_or_else(|| Error::Overflow("tensor product".into()))?;
                levels.push(Level {
                    energy: a.energy + b.energy,
                    multiplicity,
                });
            }
        }
        Ok(Hamiltonian { levels })
    }

    fn min_energy(&self) -> f64 {
        self.levels
            .iter()
            .map(|l| l.energy)
            .fold(f64::INFINITY, f64::min)
    }
}

/// One block of a diagonal state: `multiplicity` eigenvectors at `energy`,
/// each with eigenvalue `probability`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub probability: f64,
    pub energy: f64,
    pub multiplicity: u64,
}

impl Atom {
    /// Total probability carried by the block.
    #[inline]
    pub fn mass(&self) -> f64 {
        self.multiplicity as f64 * self.probability
    }
}

/// A state diagonal in the energy eigenbasis.
#[derive(Clone, Debug, PartialEq)]
pub struct IncoherentState {
    atoms: Vec<Atom>,
}

impl IncoherentState {
    /// Builds a state with per-copy `probabilities` on the levels of `hamiltonian`.
    pub fn new(hamiltonian: &Hamiltonian, probabilities: &[f64]) -> Result<Self> {
        if hamiltonian.len() != probabilities.len() {
            return Err(Error::InvalidState(format!(
                "{} probabilities for {} levels",
                probabilities.len(),
                hamiltonian.len()
            )));
        }
        let atoms = hamiltonian
            .levels
            .iter()
            .zip(probabilities)
            .map(|(level, &probability)| Atom {
                probability,
                energy: level.energy,
                multiplicity: level.multiplicity,
            })
            .collect();
        Self::from_atoms(atoms)
    }

    pub fn from_atoms(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidState("no atoms".into()));
        }
        let mut mass = 0.0;
        for (i, atom) in atoms.iter().enumerate() {
            if !(atom.probability.is_finite() && atom.probability >= 0.0 && atom.probability <= 1.0)
            {
                return Err(Error::InvalidState(format!(
                    "probability {i} is outside [0, 1] ({})",
                    atom.probability
                )));
            }
            if !atom.energy.is_finite() {
                return Err(Error::InvalidState(format!("energy {i} is not finite")));
            }
            if atom.multiplicity == 0 {
                return Err(Error::InvalidState(format!("atom {i} has multiplicity 0")));
            }
            mass += atom.mass();
        }
        if (mass - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidState(format!(
                "total mass {mass} differs from 1 by more than {NORMALIZATION_TOLERANCE:e}"
            )));
        }
        Ok(Self { atoms })
    }

    /// Like [`IncoherentState::new`] but rescales the probabilities to unit mass first.
    pub fn normalized(hamiltonian: &Hamiltonian, weights: &[f64]) -> Result<Self> {
        let mass: f64 = weights
            .iter()
            .zip(hamiltonian.levels())
            .map(|(w, l)| w * l.multiplicity as f64)
            .sum();
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidState(format!("cannot normalize mass {mass}")));
        }
        let probabilities: Vec<f64> = weights.iter().map(|w| w / mass).collect();
        Self::new(hamiltonian, &probabilities)
    }

    /// The eigenstate of level `index`, normalized over its multiplicity.
    pub fn pure(hamiltonian: &Hamiltonian, index: usize) -> Result<Self> {
        let level = hamiltonian.levels.get(index).ok_or_else(|| {
            Error::InvalidState(format!("level {index} out of range"))
        })?;
        let mut probabilities = vec![0.0; hamiltonian.len()];
        probabilities[index] = 1.0 / level.multiplicity as f64;
        Self::new(hamiltonian, &probabilities)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn hamiltonian(&self) -> Hamiltonian {
        Hamiltonian {
            levels: self
                .atoms
                .iter()
                .map(|a| Level {
                    energy: a.energy,
                    multiplicity: a.multiplicity,
                })
                .collect(),
        }
    }

    /// Per-copy probabilities, one per atom.
    pub fn probabilities(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.probability).collect()
    }

    pub fn multiplicities(&self) -> Vec<u64> {
        self.atoms.iter().map(|a| a.multiplicity).collect()
    }

    /// Eigenvalue list with every atom repeated `multiplicity` times.
    pub fn expanded_probabilities(&self) -> Vec<f64> {
        self.atoms
            .iter()
            .flat_map(|a| std::iter::repeat_n(a.probability, a.multiplicity as usize))
            .collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(Atom::mass).sum()
    }

    /// True when both states live on the same level list.
    pub fn same_hamiltonian(&self, other: &IncoherentState) -> bool {
        self.atoms.len() == other.atoms.len()
            && self
                .atoms
                .iter()
                .zip(&other.atoms)
                .all(|(a, b)| a.energy == b.energy && a.multiplicity == b.multiplicity)
    }

    /// Product state on the non-interacting composite Hamiltonian.
    pub fn tensor(&self, other: &IncoherentState) -> Result<IncoherentState> {
        let mut atoms = Vec::with_capacity(self.len() * other.len());
        for a in &self.atoms {
            for b in &other.atoms {
                let multiplicity = a
                    .multiplicity
                    .checked_mul(b.multiplicity)
                    .ok_or_else(|| Error::Overflow("tensor product".into()))?;
                atoms.push(Atom {
                    probability: a.probability * b.probability,
                    energy: a.energy + b.energy,
                    multiplicity,
                });
            }
        }
        Ok(IncoherentState { atoms })
    }
}

/// Total-variation (half L1) distance between two states on the same levels.
pub fn total_variation(a: &IncoherentState, b: &IncoherentState) -> Result<f64> {
    if !a.same_hamiltonian(b) {
        return Err(Error::HamiltonianMismatch);
    }
    Ok(0.5
        * a.atoms
            .iter()
            .zip(&b.atoms)
            .map(|(x, y)| x.multiplicity as f64 * (x.probability - y.probability).abs())
            .sum::<f64>())
}

/// `Z = Σ m_i e^{-β E_i}`.
pub fn partition_function(hamiltonian: &Hamiltonian, beta: InverseTemperature) -> f64 {
    let b = beta.value();
    hamiltonian
        .levels
        .iter()
        .map(|l| l.multiplicity as f64 * (-b * l.energy).exp())
        .sum()
}

/// `ln Z`, evaluated with the ground energy factored out.
pub fn log_partition_function(hamiltonian: &Hamiltonian, beta: InverseTemperature) -> f64 {
    let b = beta.value();
    let e0 = hamiltonian.min_energy();
    let shifted: f64 = hamiltonian
        .levels
        .iter()
        .map(|l| l.multiplicity as f64 * (-b * (l.energy - e0)).exp())
        .sum();
    -b * e0 + shifted.ln()
}

/// Gibbs state `e^{-βH}/Z`.
pub fn gibbs(hamiltonian: &Hamiltonian, beta: InverseTemperature) -> IncoherentState {
    let b = beta.value();
    let e0 = hamiltonian.min_energy();
    let weights: Vec<f64> = hamiltonian
        .levels
        .iter()
        .map(|l| (-b * (l.energy - e0)).exp())
        .collect();
    let z: f64 = weights
        .iter()
        .zip(&hamiltonian.levels)
        .map(|(w, l)| w * l.multiplicity as f64)
        .sum();
    IncoherentState {
        atoms: hamiltonian
            .levels
            .iter()
            .zip(&weights)
            .map(|(l, w)| Atom {
                probability: w / z,
                energy: l.energy,
                multiplicity: l.multiplicity,
            })
            .collect(),
    }
}

/// `tr(ρH)`.
pub fn mean_energy(state: &IncoherentState) -> f64 {
    state.atoms.iter().map(|a| a.mass() * a.energy).sum()
}

/// Shannon entropy `-Σ m p ln p` in nats, with `0 ln 0 = 0`.
pub fn shannon_entropy(state: &IncoherentState) -> f64 {
    state
        .atoms
        .iter()
        .filter(|a| in_support(a.probability))
        .map(|a| -a.mass() * a.probability.ln())
        .sum()
}

/// Rényi entropy `sgn(α)/(1-α) ln Σ p^α`, in nats.
///
/// `α = 1` is Shannon entropy, `α = 0` the log of the support size and
/// `α = ∞` the min-entropy `-ln max p`. For `α < 0` the sign convention makes
/// the value negative; a state with an unoccupied atom then has `Σ p^α = ∞`
/// and the entropy is `-∞`. `α = -∞` gives `ln min p`.
pub fn renyi_entropy(state: &IncoherentState, alpha: f64) -> f64 {
    let support = || state.atoms.iter().filter(|a| in_support(a.probability));
    let has_gap = state.atoms.iter().any(|a| !in_support(a.probability));
    if alpha.is_nan() {
        return f64::NAN;
    }
    if alpha < 0.0 && has_gap {
        return f64::NEG_INFINITY;
    }
    if alpha == f64::INFINITY {
        return -support().map(|a| a.probability).fold(0.0, f64::max).ln();
    }
    if alpha == f64::NEG_INFINITY {
        return support().map(|a| a.probability).fold(1.0, f64::min).ln();
    }
    if alpha == 0.0 {
        return (support().map(|a| a.multiplicity as f64).sum::<f64>()).ln();
    }
    if (alpha - 1.0).abs() < 1e-9 {
        return shannon_entropy(state);
    }
    // ln Σ m p^α via log-sum-exp
    let logs: Vec<f64> = support()
        .map(|a| (a.multiplicity as f64).ln() + alpha * a.probability.ln())
        .collect();
    let lse = log_sum_exp(&logs);
    let sign = if alpha >= 0.0 { 1.0 } else { -1.0 };
    sign * lse / (1.0 - alpha)
}

pub(crate) fn log_sum_exp(logs: &[f64]) -> f64 {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max.is_infinite() {
        return max;
    }
    max + logs.iter().map(|l| (l - max).exp()).sum::<f64>().ln()
}

/// On-disk representation of a state.
///
/// ```json
/// {"beta": 1.0, "energies": [0.0, 0.693], "multiplicities": [1, 1], "probabilities": [0.4, 0.6]}
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub beta: f64,
    pub energies: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicities: Option<Vec<u64>>,
    pub probabilities: Vec<f64>,
}

impl StateFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("state file serializes")
    }

    pub fn from_state(state: &IncoherentState, beta: InverseTemperature) -> Self {
        let multiplicities = state.multiplicities();
        let all_one = multiplicities.iter().all(|&m| m == 1);
        StateFile {
            beta: beta.value(),
            energies: state.atoms().iter().map(|a| a.energy).collect(),
            multiplicities: (!all_one).then_some(multiplicities),
            probabilities: state.probabilities(),
        }
    }

    pub fn hamiltonian(&self) -> Result<Hamiltonian> {
        match &self.multiplicities {
            Some(m) => Hamiltonian::with_multiplicities(&self.energies, m),
            None => Hamiltonian::new(&self.energies),
        }
    }

    pub fn state(&self) -> Result<IncoherentState> {
        IncoherentState::new(&self.hamiltonian()?, &self.probabilities)
    }

    pub fn beta(&self) -> Result<InverseTemperature> {
        InverseTemperature::new(self.beta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn beta(b: f64) -> InverseTemperature {
        InverseTemperature::new(b).unwrap()
    }

    #[test]
    fn partition_function_examples() {
        let h = Hamiltonian::with_multiplicities(&[0.0], &[2]).unwrap();
        assert_eq!(partition_function(&h, beta(3.7)), 2.0);
        let h = Hamiltonian::new(&[0.0, LN_2]).unwrap();
        assert!((partition_function(&h, beta(1.0)) - 1.5).abs() < 1e-15);
        let h = Hamiltonian::new(&[2.5]).unwrap();
        assert!((partition_function(&h, beta(0.3)) - (-0.75f64).exp()).abs() < 1e-15);
        assert!((log_partition_function(&h, beta(0.3)) + 0.75).abs() < 1e-15);
    }

    #[test]
    fn gibbs_examples() {
        let g = gibbs(&Hamiltonian::degenerate(2).unwrap(), beta(1.0));
        assert_eq!(g.probabilities(), vec![0.5, 0.5]);
        let g = gibbs(&Hamiltonian::new(&[0.0, LN_2]).unwrap(), beta(1.0));
        assert!((g.probabilities()[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((g.probabilities()[1] - 1.0 / 3.0).abs() < 1e-15);
        let g = gibbs(&Hamiltonian::new(&[0.0, 1.0]).unwrap(), beta(20.0));
        assert!((g.probabilities()[0] - 1.0 / (1.0 + (-20f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn gibbs_reconstruction_identity() {
        let h = Hamiltonian::with_multiplicities(&[-0.3, 0.0, 1.2, 4.0], &[1, 3, 2, 1]).unwrap();
        let b = beta(0.8);
        let z = partition_function(&h, b);
        let g = gibbs(&h, b);
        for a in g.atoms() {
            let boltzmann = (-b.value() * a.energy).exp();
            assert!((z * a.probability - boltzmann).abs() < 1e-12);
        }
    }

    #[test]
    fn mean_energy_examples() {
        let h = Hamiltonian::new(&[0.0, 1.0]).unwrap();
        assert_eq!(mean_energy(&IncoherentState::pure(&h, 0).unwrap()), 0.0);
        let half = IncoherentState::new(&h, &[0.5, 0.5]).unwrap();
        assert_eq!(mean_energy(&half), 0.5);
        let g = gibbs(&Hamiltonian::new(&[0.0, LN_2]).unwrap(), beta(1.0));
        assert!((mean_energy(&g) - LN_2 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn renyi_entropy_examples() {
        let h = Hamiltonian::degenerate(5).unwrap();
        let u = IncoherentState::new(&h, &[0.2; 5]).unwrap();
        for a in [0.0, 0.3, 1.0, 2.0, 7.5, f64::INFINITY] {
            assert!((renyi_entropy(&u, a) - 5f64.ln()).abs() < 1e-12, "alpha {a}");
        }
        let h2 = Hamiltonian::degenerate(2).unwrap();
        let det = IncoherentState::new(&h2, &[1.0, 0.0]).unwrap();
        assert_eq!(renyi_entropy(&det, 2.0), 0.0);
        let p = IncoherentState::new(&h2, &[0.75, 0.25]).unwrap();
        assert!((renyi_entropy(&p, 2.0) + 0.625f64.ln()).abs() < 1e-15);
        assert!((renyi_entropy(&p, 2.0) - 0.46999).abs() < 1e-4);
    }

    #[test]
    fn renyi_entropy_negative_alpha_conventions() {
        let h = Hamiltonian::degenerate(4).unwrap();
        let u = IncoherentState::new(&h, &[0.25; 4]).unwrap();
        assert!((renyi_entropy(&u, -2.0) + 4f64.ln()).abs() < 1e-12);
        let gap = IncoherentState::new(&h, &[0.5, 0.5, 0.0, 0.0]).unwrap();
        assert_eq!(renyi_entropy(&gap, -0.5), f64::NEG_INFINITY);
        assert_eq!(renyi_entropy(&gap, f64::NEG_INFINITY), f64::NEG_INFINITY);
        let p = IncoherentState::new(&h, &[0.4, 0.3, 0.2, 0.1]).unwrap();
        assert!((renyi_entropy(&p, f64::NEG_INFINITY) - 0.1f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn multiplicity_counts_in_support_size_and_entropy() {
        let h = Hamiltonian::with_multiplicities(&[0.0, 1.0], &[3, 1]).unwrap();
        let s = IncoherentState::new(&h, &[0.25, 0.25]).unwrap();
        assert!((renyi_entropy(&s, 0.0) - 4f64.ln()).abs() < 1e-15);
        assert!((shannon_entropy(&s) - 4f64.ln()).abs() < 1e-15);
        assert_eq!(s.expanded_probabilities(), vec![0.25; 4]);
    }

    #[test]
    fn rejects_invalid_inputs() {
        assert!(InverseTemperature::new(0.0).is_err());
        assert!(InverseTemperature::new(f64::NAN).is_err());
        assert!(Hamiltonian::new(&[]).is_err());
        assert!(Hamiltonian::new(&[f64::INFINITY]).is_err());
        assert!(Hamiltonian::with_multiplicities(&[0.0], &[0]).is_err());
        let h = Hamiltonian::degenerate(2).unwrap();
        assert!(IncoherentState::new(&h, &[0.5, 0.6]).is_err());
        assert!(IncoherentState::new(&h, &[1.1, -0.1]).is_err());
        assert!(IncoherentState::new(&h, &[1.0]).is_err());
    }

    #[test]
    fn zero_atoms_are_kept() {
        let h = Hamiltonian::new(&[0.0, 1.0, 2.0]).unwrap();
        let s = IncoherentState::new(&h, &[0.5, 0.5, 0.0]).unwrap();
        assert_eq!(s.len(), 3);
        assert!((renyi_entropy(&s, 0.0) - LN_2).abs() < 1e-15);
    }

    #[test]
    fn state_file_round_trip() {
        let text = r#"{"beta": 2.0, "energies": [0.0, 1.0], "multiplicities": [1, 2], "probabilities": [0.5, 0.25]}"#;
        let file = StateFile::from_json(text).unwrap();
        let state = file.state().unwrap();
        assert_eq!(state.multiplicities(), vec![1, 2]);
        let back = StateFile::from_state(&state, file.beta().unwrap());
        assert_eq!(back, file);
        assert!(StateFile::from_json("{\"beta\": 1,").is_err());
    }
}
