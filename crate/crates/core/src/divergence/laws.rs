//! Generalized free energies and the catalytic second laws.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::renyi::{divergence_terms, pair_terms, RenyiAlpha, Term};
use crate::error::{Error, Result};
use crate::numeric::{bisect_boundary, golden_min};
use crate::states::{
    gibbs, log_partition_function, mean_energy, shannon_entropy, IncoherentState,
    InverseTemperature,
};
use crate::verdict::{Certificate, TransitionVerdict};

pub const DEFAULT_ALPHA_GRID: [f64; 20] = [
    -50.0, -20.0, -10.0, -5.0, -2.0, -1.0, -0.5, -0.1, 0.0, 0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0,
    5.0, 10.0, 20.0, 50.0,
];

/// A second law counts as satisfied when the divergence drops by at least `-CTO_TOLERANCE`.
pub const CTO_TOLERANCE: f64 = 1e-10;

/// Width to which sign changes of the divergence gap are bracketed.
pub const REFINEMENT_WIDTH: f64 = 1e-6;

/// Finite orders at which the second laws are sampled.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaGrid {
    alphas: Vec<f64>,
}

impl Default for AlphaGrid {
    fn default() -> Self {
        Self {
            alphas: DEFAULT_ALPHA_GRID.to_vec(),
        }
    }
}

impl AlphaGrid {
    pub fn new(mut alphas: Vec<f64>) -> Result<Self> {
        if let Some(bad) = alphas.iter().find(|a| !a.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid orders must be finite, got {bad}"
            )));
        }
        alphas.sort_by(f64::total_cmp);
        alphas.dedup();
        Ok(Self { alphas })
    }

    /// Comma- or whitespace-separated list of finite orders.
    pub fn parse(text: &str) -> Result<Self> {
        let alphas = text
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("bad grid entry {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if alphas.is_empty() {
            return Err(Error::InvalidParameter("empty grid".into()));
        }
        Self::new(alphas)
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn nonnegative(&self) -> Self {
        Self {
            alphas: self.alphas.iter().copied().filter(|&a| a >= 0.0).collect(),
        }
    }
}

/// `F_α` together with its order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedFreeEnergy {
    #[serde(with = "crate::serde_ext::extended")]
    pub value: f64,
    pub alpha: RenyiAlpha,
}

/// Non-equilibrium free energy `⟨E⟩ - S/β`.
pub fn free_energy(state: &IncoherentState, beta: InverseTemperature) -> f64 {
    mean_energy(state) - shannon_entropy(state) / beta.value()
}

/// `F_α = β⁻¹ [D_α(ρ‖τ_β) - ln Z_β]`.
pub fn free_energy_alpha(
    state: &IncoherentState,
    beta: InverseTemperature,
    alpha: RenyiAlpha,
) -> GeneralizedFreeEnergy {
    let d = super::renyi::gibbs_divergence(state, beta, alpha);
    let ln_z = log_partition_function(&state.hamiltonian(), beta);
    GeneralizedFreeEnergy {
        value: (d - ln_z) / beta.value(),
        alpha,
    }
}

/// `D_α(source‖τ) - D_α(target‖τ)` with `∞ - ∞ = 0`.
pub(crate) fn gap(source: f64, target: f64) -> f64 {
    match (source == f64::INFINITY, target == f64::INFINITY) {
        (true, true) => 0.0,
        (false, true) => f64::NEG_INFINITY,
        (true, false) => f64::INFINITY,
        (false, false) => source - target,
    }
}

struct LawCheck {
    source: Vec<Term>,
    target: Vec<Term>,
}

impl LawCheck {
    fn divergences(&self, alpha: RenyiAlpha) -> (f64, f64) {
        (
            divergence_terms(&self.source, alpha),
            divergence_terms(&self.target, alpha),
        )
    }

    fn gap(&self, alpha: RenyiAlpha) -> f64 {
        let (s, t) = self.divergences(alpha);
        gap(s, t)
    }

    /// Orders visited on one side of zero: the grid, then refinements.
    fn scan_side(&self, grid: &[f64], out: &mut Vec<(RenyiAlpha, f64)>) {
        let vals: Vec<f64> = grid.iter().map(|&a| self.gap(RenyiAlpha::new(a))).collect();
        let ok = |v: f64| v >= -CTO_TOLERANCE;
        for (&a, &v) in grid.iter().zip(&vals) {
            out.push((RenyiAlpha::new(a), v));
        }
        for k in 0..grid.len().saturating_sub(1) {
            let (a0, a1) = (grid[k], grid[k + 1]);
            if ok(vals[k]) != ok(vals[k + 1]) {
                let (good, bad) = if ok(vals[k]) { (a0, a1) } else { (a1, a0) };
                let edge = bisect_boundary(
                    |a| ok(self.gap(RenyiAlpha::new(a))),
                    good,
                    bad,
                    REFINEMENT_WIDTH,
                    200,
                );
                let past = if bad > good {
                    edge + REFINEMENT_WIDTH
                } else {
                    edge - REFINEMENT_WIDTH
                };
                let alpha = RenyiAlpha::new(past);
                out.push((alpha, self.gap(alpha)));
            }
        }
        // Dips between grid points: search around every local minimum.
        for k in 0..grid.len() {
            let lo = if k > 0 { grid[k - 1] } else { grid[k] };
            let hi = if k + 1 < grid.len() { grid[k + 1] } else { grid[k] };
            if hi <= lo || !vals[k].is_finite() {
                continue;
            }
            let left_ok = k == 0 || vals[k] <= vals[k - 1];
            let right_ok = k + 1 == grid.len() || vals[k] <= vals[k + 1];
            if left_ok && right_ok {
                let (a, _) = golden_min(|a| self.gap(RenyiAlpha::new(a)), lo, hi, REFINEMENT_WIDTH);
                let alpha = RenyiAlpha::new(a);
                out.push((alpha, self.gap(alpha)));
            }
        }
    }

    fn decide(&self, grid: &AlphaGrid, negative: bool) -> TransitionVerdict {
        let mut visited = Vec::new();
        let mut limits: Vec<RenyiAlpha> = RenyiAlpha::limits().to_vec();
        if negative {
            let neg: Vec<f64> = grid.alphas().iter().copied().filter(|&a| a < 0.0).collect();
            self.scan_side(&neg, &mut visited);
        } else {
            limits.retain(|a| !a.is_negative());
        }
        let pos: Vec<f64> = grid.alphas().iter().copied().filter(|&a| a >= 0.0).collect();
        self.scan_side(&pos, &mut visited);
        for alpha in limits {
            visited.push((alpha, self.gap(alpha)));
        }

        let worst = visited
            .into_iter()
            .filter(|&(_, v)| v < -CTO_TOLERANCE)
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal));
        match worst {
            None => TransitionVerdict::feasible(),
            Some((alpha, _)) => {
                let (source, target) = self.divergences(alpha);
                TransitionVerdict::infeasible(Certificate::Alpha {
                    alpha,
                    source,
                    target,
                })
            }
        }
    }
}

fn law_check(
    source: &IncoherentState,
    target: &IncoherentState,
    beta: InverseTemperature,
) -> Result<LawCheck> {
    if !source.same_hamiltonian(target) {
        return Err(Error::HamiltonianMismatch);
    }
    let tau = gibbs(&source.hamiltonian(), beta);
    Ok(LawCheck {
        source: pair_terms(source, &tau),
        target: pair_terms(target, &tau),
    })
}

/// Catalytic feasibility from the full family of second laws, `α ∈ [-∞, ∞]`.
pub fn check_cto_transition(
    source: &IncoherentState,
    target: &IncoherentState,
    beta: InverseTemperature,
    grid: &AlphaGrid,
) -> Result<TransitionVerdict> {
    Ok(law_check(source, target, beta)?.decide(grid, true))
}

/// Catalytic feasibility when a pure ancilla may be consumed: only `α ≥ 0` constrains.
pub fn check_cto_with_ancilla(
    source: &IncoherentState,
    target: &IncoherentState,
    beta: InverseTemperature,
    grid: &AlphaGrid,
) -> Result<TransitionVerdict> {
    Ok(law_check(source, target, beta)?.decide(grid, false))
}
