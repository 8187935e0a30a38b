mod common;

use common::*;
use proptest::prelude::*;
use thermoflow::oracle::SeededSampler;
use thermoflow::states::{gibbs, partition_function, renyi_entropy, shannon_entropy};
use thermoflow::{Hamiltonian, IncoherentState};

const ORDERS: [f64; 10] = [0.0, 0.1, 0.25, 0.5, 0.75, 1.0, 2.0, 5.0, 20.0, f64::INFINITY];

fn weights() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.001f64..1.0, 1..10)
}

proptest! {
    #[test]
    fn gibbs_weights_reconstruct_boltzmann_factors(
        e in prop::collection::vec(0.0f64..4.0, 1..12),
        b in 0.1f64..8.0,
    ) {
        let h = Hamiltonian::new(&e).unwrap();
        let b = beta(b);
        let z = partition_function(&h, b);
        for (atom, &energy) in gibbs(&h, b).atoms().iter().zip(&e) {
            prop_assert!((z * atom.probability - (-b.value() * energy).exp()).abs() <= 1e-12);
        }
    }

    #[test]
    fn renyi_entropy_decreases_with_order(w in weights()) {
        let h = Hamiltonian::degenerate(w.len()).unwrap();
        let s = IncoherentState::normalized(&h, &w).unwrap();
        let values: Vec<f64> = ORDERS.iter().map(|&a| renyi_entropy(&s, a)).collect();
        for pair in values.windows(2) {
            prop_assert!(pair[1] <= pair[0] + 1e-12, "{:?}", values);
        }
        let direct: f64 = s.probabilities().iter().map(|p| -p * p.ln()).sum();
        prop_assert!((renyi_entropy(&s, 1.0) - direct).abs() <= 1e-9);
        prop_assert!((shannon_entropy(&s) - direct).abs() <= 1e-9);
    }
}

#[test]
fn noisy_images_gain_entropy() {
    let mut s = SeededSampler::new(21, 0);
    for _ in 0..1000 {
        let d = 1 + s.index(8);
        let h = Hamiltonian::degenerate(d).unwrap();
        let p = IncoherentState::normalized(&h, &s.simplex(d)).unwrap();
        let q = IncoherentState::normalized(&h, &bistochastic_image(&mut s, &p.probabilities())).unwrap();
        for a in ORDERS {
            assert!(renyi_entropy(&q, a) >= renyi_entropy(&p, a) - 1e-12, "alpha {a}");
        }
    }
}

#[test]
fn multiplicity_matches_expanded_levels() {
    let mut s = SeededSampler::new(22, 0);
    for _ in 0..200 {
        let d = 1 + s.index(5);
        let h = with_multiplicities(&mut s, d, 2.0);
        let rho = state(&mut s, &h);
        let flat_h = Hamiltonian::new(
            &h.levels()
                .iter()
                .flat_map(|l| std::iter::repeat_n(l.energy, l.multiplicity as usize))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let flat = IncoherentState::new(&flat_h, &rho.expanded_probabilities()).unwrap();
        for a in ORDERS {
            assert!((renyi_entropy(&rho, a) - renyi_entropy(&flat, a)).abs() < 1e-12);
        }
        let b = beta(s.range(0.1, 3.0));
        assert!((partition_function(&h, b) - partition_function(&flat_h, b)).abs() < 1e-12);
    }
}
