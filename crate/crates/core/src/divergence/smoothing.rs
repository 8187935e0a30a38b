//! Smoothed single-shot free energies and i.i.d. type-class states.

use std::cmp::Ordering;

use super::renyi::RenyiAlpha;
use crate::error::{Error, Result};
use crate::numeric::bisect_boundary;
use crate::states::{
    gibbs, in_support, log_partition_function, Atom, IncoherentState, InverseTemperature,
};

fn check_epsilon(epsilon: f64) -> Result<()> {
    if (0.0..1.0).contains(&epsilon) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "smoothing radius must lie in [0, 1), got {epsilon}"
        )))
    }
}

/// Largest `D_0(ρ̃‖τ)` over states `ρ̃` within total variation `epsilon` of `ρ`.
///
/// Copies are dropped greedily in order of decreasing `q/p`; a group that no
/// longer fits the remaining budget is skipped and the scan continues.
pub fn smooth_support_divergence(
    state: &IncoherentState,
    beta: InverseTemperature,
    epsilon: f64,
) -> Result<f64> {
    check_epsilon(epsilon)?;
    let tau = gibbs(&state.hamiltonian(), beta);
    let mut groups: Vec<(f64, f64, u64)> = state
        .atoms()
        .iter()
        .zip(tau.atoms())
        .filter(|(a, _)| in_support(a.probability))
        .map(|(a, t)| (a.probability, t.probability, a.multiplicity))
        .collect();
    groups.sort_by(|x, y| (y.1 / y.0).partial_cmp(&(x.1 / x.0)).unwrap_or(Ordering::Equal));

    let kept: f64 = groups.iter().map(|&(_, q, m)| m as f64 * q).sum();
    let mut budget = epsilon;
    let mut dropped = 0.0;
    for &(p, q, m) in &groups {
        // slack absorbs rounding in `budget / p` for exact fits
        let fits = ((budget / p) * (1.0 + 1e-12)).floor();
        let k = (m as f64).min(fits.max(0.0));
        if k >= 1.0 {
            budget -= k * p;
            dropped += k * q;
        }
    }
    Ok(-(kept - dropped).ln())
}

/// Water level `λ*` of the capped state `min(p, λq)` after smoothing by `epsilon`.
fn max_divergence_level(p: &[(f64, f64, f64)], epsilon: f64) -> f64 {
    let excess = |lambda: f64| -> f64 { p.iter().map(|&(p, q, m)| m * (p - lambda * q).max(0.0)).sum() };
    let top = p
        .iter()
        .filter(|t| in_support(t.0))
        .map(|&(p, q, _)| p / q)
        .fold(1.0, f64::max);
    if excess(1.0) <= epsilon {
        return 1.0;
    }
    bisect_boundary(|l| excess(l) <= epsilon, top, 1.0, 0.0, 200)
}

fn weighted(state: &IncoherentState, beta: InverseTemperature) -> Vec<(f64, f64, f64)> {
    let tau = gibbs(&state.hamiltonian(), beta);
    state
        .atoms()
        .iter()
        .zip(tau.atoms())
        .map(|(a, t)| (a.probability, t.probability, a.multiplicity as f64))
        .collect()
}

/// Smallest `D_∞(ρ̃‖τ)` over the total-variation ball of radius `epsilon`.
pub fn smooth_max_divergence(
    state: &IncoherentState,
    beta: InverseTemperature,
    epsilon: f64,
) -> Result<f64> {
    check_epsilon(epsilon)?;
    if epsilon == 0.0 {
        return Ok(super::renyi::gibbs_divergence(state, beta, RenyiAlpha::Infinity));
    }
    Ok(max_divergence_level(&weighted(state, beta), epsilon).ln())
}

/// The minimizer behind [`smooth_max_divergence`]: every ratio `p/q` above
/// `λ*` is capped, and the removed mass fills the remaining room `λ*q - p`
/// proportionally, so no ratio exceeds `λ*`.
pub fn smoothed_max_state(
    state: &IncoherentState,
    beta: InverseTemperature,
    epsilon: f64,
) -> Result<IncoherentState> {
    check_epsilon(epsilon)?;
    let w = weighted(state, beta);
    let lambda = max_divergence_level(&w, epsilon);
    let capped: Vec<f64> = w.iter().map(|&(p, q, _)| p.min(lambda * q)).collect();
    let removed: f64 = w.iter().zip(&capped).map(|(&(p, _, m), c)| m * (p - c)).sum();
    let room: Vec<f64> = w
        .iter()
        .zip(&capped)
        .map(|(&(_, q, _), c)| (lambda * q - c).max(0.0))
        .collect();
    let total_room: f64 = w.iter().zip(&room).map(|(&(_, _, m), r)| m * r).sum();
    let atoms = state
        .atoms()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let fill = if total_room > 0.0 {
                removed * room[i] / total_room
            } else {
                0.0
            };
            Atom {
                probability: (capped[i] + fill).min(1.0),
                ..*a
            }
        })
        .collect();
    IncoherentState::from_atoms(atoms)
}

/// `F_α^ε` for `α ∈ {0, ∞}`.
pub fn smooth_free_energy(
    state: &IncoherentState,
    beta: InverseTemperature,
    alpha: RenyiAlpha,
    epsilon: f64,
) -> Result<f64> {
    let d = match alpha {
        RenyiAlpha::Zero => smooth_support_divergence(state, beta, epsilon)?,
        RenyiAlpha::Infinity => smooth_max_divergence(state, beta, epsilon)?,
        other => {
            return Err(Error::InvalidParameter(format!(
                "smoothing is defined for orders 0 and inf, not {other}"
            )))
        }
    };
    let ln_z = log_partition_function(&state.hamiltonian(), beta);
    Ok((d - ln_z) / beta.value())
}

/// `ρ^{⊗n}` grouped into type classes: one atom per composition of `n`,
/// carrying the multinomial count times the product of level multiplicities.
pub fn iid_extend(state: &IncoherentState, n: usize) -> Result<IncoherentState> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let atoms = state.atoms();
    let d = atoms.len();
    let p: Vec<f64> = atoms
        .iter()
        .map(|a| a.probability)
        .collect();
    let mut out = Vec::new();
    let mut counts = vec![0usize; d];
    counts[d - 1] = n;
    loop {
        let mut multiplicity = multinomial(n, &counts)?;
        let mut probability = 1.0;
        let mut energy = 0.0;
        for (i, &k) in counts.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let pow = atoms[i]
                .multiplicity
                .checked_pow(k as u32)
                .ok_or_else(|| Error::Overflow(format!("level multiplicity to power {k}")))?;
            multiplicity = multiplicity
                .checked_mul(pow)
                .ok_or_else(|| Error::Overflow("type-class multiplicity".into()))?;
            probability *= p[i].powi(k as i32);
            energy += k as f64 * atoms[i].energy;
        }
        out.push(Atom {
            probability,
            energy,
            multiplicity,
        });
        if !next_composition(&mut counts) {
            break;
        }
    }
    // lexicographic by counts, so n = 1 keeps the original atom order
    out.reverse();
    let mass: f64 = out.iter().map(Atom::mass).sum();
    for a in &mut out {
        a.probability /= mass;
    }
    IncoherentState::from_atoms(out)
}

/// Steps through compositions of a fixed total in reverse-lexicographic order.
fn next_composition(c: &mut [usize]) -> bool {
    let d = c.len();
    // rightmost nonzero entry that can shift one unit to the left
    let Some(j) = (1..d).rev().find(|&j| c[j] > 0) else {
        return false;
    };
    let moved = c[j];
    c[j] = 0;
    c[j - 1] += 1;
    c[d - 1] = moved - 1;
    true
}

fn multinomial(n: usize, counts: &[usize]) -> Result<u64> {
    let mut result: u64 = 1;
    let mut placed = 0u64;
    for &k in counts {
        for i in 1..=k as u64 {
            placed += 1;
            // result * placed / i stays integral at every step
            result = result
                .checked_mul(placed)
                .map(|r| r / i)
                .ok_or_else(|| Error::Overflow(format!("multinomial coefficient of {n}")))?;
        }
    }
    Ok(result)
}
