//! Quasi-static estimator for a single-qubit cold bath.
//!
//! One cycle maps `τ_cold(β_c) ⊗ |0⟩⟨0|_W` to `τ_cold(β') ⊗ ((ε', 1-ε') on {0, W})`
//! and must not increase any `F_α` measured against the hot bath. For each
//! `β'` the largest feasible `W` is found by bisection, and the battery
//! failure `ε' ∈ (0, ε]` is chosen to maximize the free-energy efficiency
//!
//! ```text
//! η = [(1-ε')W - h(ε')/β_h] / [(1-ε')W + ΔE_cold]
//! ```
//!
//! i.e. the battery's free-energy gain per unit of heat drawn from the hot bath.

use serde::{Deserialize, Serialize};

use super::EngineSpec;
use crate::divergence::{gap, gibbs_divergence, AlphaGrid, RenyiAlpha};
use crate::error::{Error, Result};
use crate::numeric::{bisect_boundary, golden_min};
use crate::states::{gibbs, Hamiltonian, IncoherentState, InverseTemperature};

/// Which second laws bind the cycle.
#[derive(Clone, Debug, PartialEq)]
pub enum Constraints {
    /// All `α ≥ 0` of the grid together with `0`, `1` and `∞`.
    Full(AlphaGrid),
    /// Only the ordinary free energy, `α = 1`.
    FreeEnergyOnly,
}

impl Constraints {
    fn orders(&self) -> Vec<RenyiAlpha> {
        match self {
            Self::FreeEnergyOnly => vec![RenyiAlpha::One],
            Self::Full(grid) => {
                let mut out: Vec<RenyiAlpha> = grid
                    .nonnegative()
                    .alphas()
                    .iter()
                    .map(|&a| RenyiAlpha::new(a))
                    .collect();
                for limit in [RenyiAlpha::Zero, RenyiAlpha::One, RenyiAlpha::Infinity] {
                    if !out.contains(&limit) {
                        out.push(limit);
                    }
                }
                out
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorPoint {
    pub beta_prime: f64,
    /// Battery gap `W_ext`.
    pub work: f64,
    /// Heat drawn from the hot bath, `(1-ε')W + ΔE_cold`.
    pub heat: f64,
    pub efficiency: f64,
    /// Battery failure probability at the optimum.
    pub failure: f64,
}

const LOG_FAILURE_SPAN: f64 = 80.0;
const LOG_FAILURE_STEPS: usize = 80;

struct Cycle {
    beta_hot: InverseTemperature,
    initial_cold: IncoherentState,
    final_cold: IncoherentState,
    orders: Vec<RenyiAlpha>,
    cold_heat: f64,
}

fn binary_entropy(e: f64) -> f64 {
    if e <= 0.0 || e >= 1.0 {
        return 0.0;
    }
    -e * e.ln() - (1.0 - e) * (1.0 - e).ln()
}

impl Cycle {
    fn feasible(&self, work: f64, failure: f64) -> bool {
        let battery = Hamiltonian::new(&[0.0, work]).expect("finite work");
        let start = IncoherentState::pure(&battery, 0).expect("two levels");
        let end = IncoherentState::new(&battery, &[failure, 1.0 - failure]).expect("valid failure");
        let (Ok(init), Ok(fin)) = (self.initial_cold.tensor(&start), self.final_cold.tensor(&end)) else {
            return false;
        };
        self.orders.iter().all(|&a| {
            gap(
                gibbs_divergence(&init, self.beta_hot, a),
                gibbs_divergence(&fin, self.beta_hot, a),
            ) >= 0.0
        })
    }

    fn max_work(&self, failure: f64) -> Option<f64> {
        if !self.feasible(0.0, failure) {
            return None;
        }
        let mut hi = 1.0 / self.beta_hot.value();
        while self.feasible(hi, failure) {
            hi *= 2.0;
            if hi > 1e6 {
                return None;
            }
        }
        Some(bisect_boundary(
            |w| self.feasible(w, failure),
            0.0,
            hi,
            hi * 1e-15,
            200,
        ))
    }

    fn efficiency(&self, failure: f64) -> Option<(f64, f64)> {
        let w = self.max_work(failure)?;
        let delivered = (1.0 - failure) * w;
        let heat = delivered + self.cold_heat;
        let gain = delivered - binary_entropy(failure) / self.beta_hot.value();
        (heat > 0.0).then(|| (gain / heat, w))
    }

    fn best(&self, epsilon: f64) -> Option<(f64, f64, f64)> {
        if epsilon == 0.0 {
            return self.efficiency(0.0).map(|(eta, w)| (eta, w, 0.0));
        }
        let top = epsilon.ln();
        let score = |l: f64| self.efficiency(l.exp()).map_or(f64::NEG_INFINITY, |(eta, _)| eta);
        let logs: Vec<f64> = (0..=LOG_FAILURE_STEPS)
            .map(|k| top - LOG_FAILURE_SPAN * k as f64 / LOG_FAILURE_STEPS as f64)
            .collect();
        let scores: Vec<f64> = logs.iter().map(|&l| score(l)).collect();
        let k = (0..logs.len())
            .max_by(|&i, &j| scores[i].total_cmp(&scores[j]))
            .expect("nonempty scan");
        let mut best_log = logs[k];
        if scores[k].is_finite() {
            let lo = logs[(k + 1).min(logs.len() - 1)];
            let hi = logs[k.saturating_sub(1)];
            let (l, v) = golden_min(|l| -score(l), lo, hi, 1e-6);
            if -v > scores[k] {
                best_log = l;
            }
        }
        let failure = best_log.exp();
        self.efficiency(failure).map(|(eta, w)| (eta, w, failure))
    }
}

/// Runs the estimator at each final cold inverse temperature in `beta_primes`.
///
/// Points with `β' ≥ β_cold`, or where no positive efficiency is reachable,
/// are reported with zero work and zero efficiency.
pub fn quasi_static_estimate(
    spec: &EngineSpec,
    beta_primes: &[f64],
    constraints: &Constraints,
) -> Result<Vec<EstimatorPoint>> {
    let [gap] = spec.gaps() else {
        return Err(Error::InvalidParameter(
            "the estimator needs a single cold-bath qubit".into(),
        ));
    };
    let cold = Hamiltonian::new(&[0.0, *gap])?;
    let initial_cold = gibbs(&cold, spec.beta_cold());
    let orders = constraints.orders();
    beta_primes
        .iter()
        .map(|&bp| {
            let beta_prime = InverseTemperature::new(bp)?;
            let final_cold = gibbs(&cold, beta_prime);
            let cold_heat = gap * (final_cold.atoms()[1].probability - initial_cold.atoms()[1].probability);
            let idle = EstimatorPoint {
                beta_prime: bp,
                work: 0.0,
                heat: cold_heat.max(0.0),
                efficiency: 0.0,
                failure: spec.epsilon(),
            };
            if bp >= spec.beta_cold().value() {
                return Ok(idle);
            }
            let cycle = Cycle {
                beta_hot: spec.beta_hot(),
                initial_cold: initial_cold.clone(),
                final_cold,
                orders: orders.clone(),
                cold_heat,
            };
            Ok(match cycle.best(spec.epsilon()) {
                Some((eta, work, failure)) if eta > 0.0 => EstimatorPoint {
                    beta_prime: bp,
                    work,
                    heat: (1.0 - failure) * work + cold_heat,
                    efficiency: eta,
                    failure,
                },
                _ => idle,
            })
        })
        .collect()
}
