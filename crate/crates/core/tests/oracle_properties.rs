mod common;

use common::*;
use thermoflow::divergence::{renyi_divergence, RenyiAlpha};
use thermoflow::oracle::{feasibility_lp, sample_bistochastic, sample_gibbs_stochastic, SeededSampler};
use thermoflow::order::majorizes;
use thermoflow::states::gibbs;

#[test]
fn samplers_are_deterministic() {
    for seed in 0..50 {
        let mut a = SeededSampler::new(seed, 3);
        let mut b = SeededSampler::new(seed, 3);
        assert_eq!(sample_bistochastic(5, &mut a).unwrap(), sample_bistochastic(5, &mut b).unwrap());
        let q = a.simplex(4);
        assert_eq!(q, b.simplex(4));
        assert_eq!(
            sample_gibbs_stochastic(&q, &mut a, 10).unwrap(),
            sample_gibbs_stochastic(&q, &mut b, 10).unwrap()
        );
    }
    let mut a = SeededSampler::new(7, 0);
    let mut b = SeededSampler::new(7, 1);
    assert_ne!(a.simplex(6), b.simplex(6));
}

#[test]
fn sampled_maps_fix_gibbs_and_contract_divergence() {
    let mut s = SeededSampler::new(71, 0);
    let alphas = [0.0, 0.5, 1.0, 2.0, 7.0].map(RenyiAlpha::new).into_iter().chain([RenyiAlpha::Infinity]);
    let alphas: Vec<RenyiAlpha> = alphas.collect();
    for _ in 0..1000 {
        let d = 1 + s.index(7);
        let h = hamiltonian(&mut s, d, 3.0);
        let q = gibbs(&h, beta(s.range(0.1, 4.0))).probabilities();
        let steps = 1 + s.index(30);
        let g = sample_gibbs_stochastic(&q, &mut s, steps).unwrap();
        assert!((0..d).all(|j| (g.column_sum(j) - 1.0).abs() < 1e-12));
        assert!(g.apply(&q).iter().zip(&q).all(|(a, b)| (a - b).abs() < 1e-12));
        let p = s.simplex(d);
        let gp = g.apply(&p);
        for &a in &alphas {
            let before = renyi_divergence(&p, &q, a);
            assert!(renyi_divergence(&gp, &q, a) <= before + 1e-10 * before.max(1.0));
        }
    }
}

#[test]
fn lp_with_uniform_fixed_point_is_majorization() {
    let mut s = SeededSampler::new(72, 0);
    let mut agree_feasible = 0;
    for _ in 0..500 {
        let d = 2 + s.index(5);
        let p = s.simplex(d);
        let target = if s.uniform() < 0.5 { bistochastic_image(&mut s, &p) } else { s.simplex(d) };
        let u = vec![1.0 / d as f64; d];
        let lp = feasibility_lp(&p, &u, &target).unwrap();
        assert_eq!(lp.feasible, majorizes(&p, &target).verdict);
        if let Some(g) = lp.witness {
            agree_feasible += 1;
            let err = g.apply(&p).iter().zip(&target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-7);
        }
    }
    assert!(agree_feasible > 200);
}
