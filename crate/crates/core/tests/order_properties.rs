mod common;

use common::*;
use proptest::prelude::*;
use thermoflow::oracle::{feasibility_lp, SeededSampler};
use thermoflow::order::{construct_bistochastic, majorizes};
use thermoflow::states::renyi_entropy;
use thermoflow::{Hamiltonian, IncoherentState};

fn normalize(w: Vec<f64>) -> Vec<f64> {
    let t: f64 = w.iter().sum();
    w.into_iter().map(|x| x / t).collect()
}

proptest! {
    #[test]
    fn majorization_is_reflexive(w in prop::collection::vec(0.001f64..1.0, 1..9)) {
        let p = normalize(w);
        prop_assert!(majorizes(&p, &p).verdict);
    }

    #[test]
    fn constructed_matrix_is_bistochastic(seed in 0u64..10_000, d in 1usize..9) {
        let mut s = SeededSampler::new(seed, 0);
        let p = s.simplex(d);
        let q = bistochastic_image(&mut s, &p);
        let a = construct_bistochastic(&p, &q).unwrap();
        prop_assert!(a.is_bistochastic(1e-12));
        let err = a.apply(&p).iter().zip(&q).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-9);
    }
}

#[test]
fn majorization_is_transitive() {
    let mut s = SeededSampler::new(31, 0);
    let mut chains = 0;
    for _ in 0..1000 {
        let d = 1 + s.index(8);
        let p = s.simplex(d);
        let q = if s.uniform() < 0.5 { bistochastic_image(&mut s, &p) } else { s.simplex(d) };
        let r = if s.uniform() < 0.5 { bistochastic_image(&mut s, &q) } else { s.simplex(d) };
        if majorizes(&p, &q).verdict && majorizes(&q, &r).verdict {
            chains += 1;
            assert!(majorizes(&p, &r).verdict);
        }
    }
    assert!(chains > 200);
}

#[test]
fn failed_majorization_has_no_bistochastic_witness() {
    let mut s = SeededSampler::new(32, 0);
    let mut checked = 0;
    while checked < 1000 {
        let d = 2 + s.index(6);
        let p = s.simplex(d);
        let q = s.simplex(d);
        if majorizes(&p, &q).verdict {
            continue;
        }
        checked += 1;
        let uniform = vec![1.0 / d as f64; d];
        assert!(!feasibility_lp(&p, &uniform, &q).unwrap().feasible);
    }
}

#[test]
fn entropies_are_schur_concave() {
    let mut s = SeededSampler::new(33, 0);
    for _ in 0..1000 {
        let d = 1 + s.index(8);
        let h = Hamiltonian::degenerate(d).unwrap();
        let p = s.simplex(d);
        let q = bistochastic_image(&mut s, &p);
        assert!(majorizes(&p, &q).verdict);
        let (sp, sq) = (
            IncoherentState::normalized(&h, &p).unwrap(),
            IncoherentState::normalized(&h, &q).unwrap(),
        );
        for a in [0.0, 0.5, 1.0, 2.0, f64::INFINITY] {
            assert!(renyi_entropy(&sp, a) <= renyi_entropy(&sq, a) + 1e-12);
        }
    }
}
