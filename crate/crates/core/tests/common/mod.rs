#![allow(dead_code)]

use thermoflow::oracle::{sample_bistochastic, sample_gibbs_stochastic, SeededSampler};
use thermoflow::states::gibbs;
use thermoflow::{Hamiltonian, IncoherentState, InverseTemperature};

pub fn beta(b: f64) -> InverseTemperature {
    InverseTemperature::new(b).unwrap()
}

pub fn energies(s: &mut SeededSampler, d: usize, max_energy: f64) -> Vec<f64> {
    (0..d).map(|_| s.range(0.0, max_energy)).collect()
}

pub fn hamiltonian(s: &mut SeededSampler, d: usize, max_energy: f64) -> Hamiltonian {
    Hamiltonian::new(&energies(s, d, max_energy)).unwrap()
}

pub fn with_multiplicities(s: &mut SeededSampler, d: usize, max_energy: f64) -> Hamiltonian {
    let m: Vec<u64> = (0..d).map(|_| 1 + s.index(3) as u64).collect();
    Hamiltonian::with_multiplicities(&energies(s, d, max_energy), &m).unwrap()
}

pub fn state(s: &mut SeededSampler, h: &Hamiltonian) -> IncoherentState {
    IncoherentState::normalized(h, &s.simplex(h.len())).unwrap()
}

/// A state whose support misses each level with probability 0.3 (never all of them).
pub fn sparse_state(s: &mut SeededSampler, h: &Hamiltonian) -> IncoherentState {
    let d = h.len();
    let mut w = s.simplex(d);
    for x in w.iter_mut() {
        if s.uniform() < 0.3 {
            *x = 0.0;
        }
    }
    if w.iter().all(|&x| x == 0.0) {
        w[s.index(d)] = 1.0;
    }
    IncoherentState::normalized(h, &w).unwrap()
}

/// Image of `p` under a random Gibbs-stochastic map (multiplicity-one levels).
pub fn gibbs_image(s: &mut SeededSampler, p: &IncoherentState, b: InverseTemperature) -> IncoherentState {
    let h = p.hamiltonian();
    let q = gibbs(&h, b).probabilities();
    let steps = 1 + s.index(20);
    let g = sample_gibbs_stochastic(&q, s, steps).unwrap();
    IncoherentState::normalized(&h, &g.apply(&p.probabilities())).unwrap()
}

/// Image of `p` under a random bistochastic matrix.
pub fn bistochastic_image(s: &mut SeededSampler, p: &[f64]) -> Vec<f64> {
    sample_bistochastic(p.len(), s).unwrap().apply(p)
}
