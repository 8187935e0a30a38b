//! Single-shot work quantifiers and transitions with an explicit two-level battery.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::divergence::{
    check_cto_transition, gap, gibbs_divergence, AlphaGrid, RenyiAlpha, REFINEMENT_WIDTH,
};
use crate::error::{Error, Result};
use crate::numeric::{bisect_boundary, golden_min};
use crate::states::{
    mean_energy, total_variation, Hamiltonian, IncoherentState, InverseTemperature,
};
use crate::thermo_curve::check_thermal_transition;
use crate::verdict::TransitionVerdict;

/// Resolution of the battery-gap bisections.
pub const THRESHOLD_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BatteryLevel {
    Ground,
    Excited,
}

/// Two-level battery `H_W = W |1⟩⟨1|` moving between pure levels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatterySpec {
    pub gap: f64,
    pub initial: BatteryLevel,
    pub target: BatteryLevel,
}

impl BatterySpec {
    pub fn new(gap: f64, initial: BatteryLevel, target: BatteryLevel) -> Result<Self> {
        if !(gap.is_finite() && gap >= 0.0) {
            return Err(Error::InvalidParameter(format!("battery gap must be finite and >= 0, got {gap}")));
        }
        Ok(Self { gap, initial, target })
    }

    /// Battery charged by `gap` during the transition.
    pub fn charging(gap: f64) -> Result<Self> {
        Self::new(gap, BatteryLevel::Ground, BatteryLevel::Excited)
    }

    /// Battery discharged by `gap` during the transition.
    pub fn discharging(gap: f64) -> Result<Self> {
        Self::new(gap, BatteryLevel::Excited, BatteryLevel::Ground)
    }

    pub fn hamiltonian(&self) -> Hamiltonian {
        Hamiltonian::new(&[0.0, self.gap]).expect("finite gap")
    }

    pub fn state(&self, level: BatteryLevel) -> IncoherentState {
        let index = match level {
            BatteryLevel::Ground => 0,
            BatteryLevel::Excited => 1,
        };
        IncoherentState::pure(&self.hamiltonian(), index).expect("two levels")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WorkKind {
    Distillable,
    Formation,
    FixedOutput,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorkValue {
    pub kind: WorkKind,
    #[serde(with = "crate::serde_ext::extended")]
    pub value: f64,
    pub minimizing_alpha: Option<RenyiAlpha>,
}

/// Which transition checker decides a battery-assisted transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitionModel {
    Thermal,
    Catalytic,
}

/// `β⁻¹ D_0(ρ‖τ)`, the work extractable deterministically from `ρ`.
pub fn distillable_work(state: &IncoherentState, beta: InverseTemperature) -> WorkValue {
    WorkValue {
        kind: WorkKind::Distillable,
        value: gibbs_divergence(state, beta, RenyiAlpha::Zero) / beta.value(),
        minimizing_alpha: Some(RenyiAlpha::Zero),
    }
}

/// `β⁻¹ D_∞(ρ‖τ)`, the work needed to prepare `ρ` from the Gibbs state.
///
/// Finite for every state: the Gibbs state has full support at finite `β` and energies.
pub fn work_of_formation(state: &IncoherentState, beta: InverseTemperature) -> WorkValue {
    WorkValue {
        kind: WorkKind::Formation,
        value: gibbs_divergence(state, beta, RenyiAlpha::Infinity) / beta.value(),
        minimizing_alpha: Some(RenyiAlpha::Infinity),
    }
}

/// `inf_{α≥0} [F_α(ρ) - F_α(ρ')]`. A negative value is work that must be supplied.
pub fn work_fixed_output(
    source: &IncoherentState,
    target: &IncoherentState,
    beta: InverseTemperature,
    grid: &AlphaGrid,
) -> Result<WorkValue> {
    if !source.same_hamiltonian(target) {
        return Err(Error::HamiltonianMismatch);
    }
    let diff = |alpha: RenyiAlpha| {
        gap(
            gibbs_divergence(source, beta, alpha),
            gibbs_divergence(target, beta, alpha),
        )
    };
    let finite = grid.nonnegative();
    let xs = finite.alphas();
    let vals: Vec<f64> = xs.iter().map(|&a| diff(RenyiAlpha::new(a))).collect();

    let mut candidates: Vec<(RenyiAlpha, f64)> = xs
        .iter()
        .zip(&vals)
        .map(|(&a, &v)| (RenyiAlpha::new(a), v))
        .collect();
    for alpha in [RenyiAlpha::Zero, RenyiAlpha::One, RenyiAlpha::Infinity] {
        candidates.push((alpha, diff(alpha)));
    }
    // refine around the best grid point
    if let Some(k) = (0..xs.len()).min_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap_or(Ordering::Equal)) {
        let lo = xs[k.saturating_sub(1)];
        let hi = xs[(k + 1).min(xs.len() - 1)];
        if hi > lo && vals[k].is_finite() {
            let (a, v) = golden_min(|a| diff(RenyiAlpha::new(a)), lo, hi, REFINEMENT_WIDTH);
            candidates.push((RenyiAlpha::new(a), v));
        }
    }
    let (alpha, value) = candidates
        .into_iter()
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal))
        .expect("limits are always present");
    Ok(WorkValue {
        kind: WorkKind::FixedOutput,
        value: value / beta.value(),
        minimizing_alpha: Some(alpha),
    })
}

/// Decides `ρ ⊗ b → ρ' ⊗ b'` on the joint system with additive energies.
pub fn battery_transition_check(
    source: &IncoherentState,
    target: &IncoherentState,
    battery: &BatterySpec,
    beta: InverseTemperature,
    model: TransitionModel,
    grid: &AlphaGrid,
) -> Result<TransitionVerdict> {
    if !source.same_hamiltonian(target) {
        return Err(Error::HamiltonianMismatch);
    }
    let joint_source = source.tensor(&battery.state(battery.initial))?;
    let joint_target = target.tensor(&battery.state(battery.target))?;
    match model {
        TransitionModel::Thermal => Ok(check_thermal_transition(&joint_source, &joint_target, beta)),
        TransitionModel::Catalytic => check_cto_transition(&joint_source, &joint_target, beta, grid),
    }
}

fn feasible_with(
    source: &IncoherentState,
    target: &IncoherentState,
    battery: BatterySpec,
    beta: InverseTemperature,
    model: TransitionModel,
    grid: &AlphaGrid,
) -> bool {
    battery_transition_check(source, target, &battery, beta, model, grid)
        .map(|v| v.feasible)
        .unwrap_or(false)
}

/// Largest battery charge `W` for which `ρ ⊗ |0⟩ → ρ' ⊗ |W⟩` is feasible.
///
/// `None` when the transition fails even with an idle battery.
pub fn extraction_threshold(
    source: &IncoherentState,
    target: &IncoherentState,
    beta: InverseTemperature,
    model: TransitionModel,
    grid: &AlphaGrid,
) -> Result<Option<f64>> {
    if !source.same_hamiltonian(target) {
        return Err(Error::HamiltonianMismatch);
    }
    let ok = |w: f64| feasible_with(source, target, BatterySpec::charging(w).expect("w >= 0"), beta, model, grid);
    if !ok(0.0) {
        return Ok(None);
    }
    let mut hi = 1.0 / beta.value();
    while ok(hi) {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Degenerate("extractable work does not saturate".into()));
        }
    }
    Ok(Some(bisect_boundary(ok, 0.0, hi, THRESHOLD_TOLERANCE, 200)))
}

/// Smallest battery discharge `W` for which `ρ ⊗ |W⟩ → ρ' ⊗ |0⟩` is feasible.
pub fn cost_threshold(
    source: &IncoherentState,
    target: &IncoherentState,
    beta: InverseTemperature,
    model: TransitionModel,
    grid: &AlphaGrid,
) -> Result<f64> {
    if !source.same_hamiltonian(target) {
        return Err(Error::HamiltonianMismatch);
    }
    let ok = |w: f64| feasible_with(source, target, BatterySpec::discharging(w).expect("w >= 0"), beta, model, grid);
    if ok(0.0) {
        return Ok(0.0);
    }
    let mut hi = 1.0 / beta.value();
    while !ok(hi) {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Degenerate("no finite battery enables the transition".into()));
        }
    }
    Ok(bisect_boundary(ok, hi, 0.0, THRESHOLD_TOLERANCE, 200))
}

/// Whether a catalyst returned as `omega_prime` stays within `constant · ε / ln d_C`
/// of its initial state `omega`, which rules out embezzling.
pub fn embezzlement_guard_with(
    omega: &IncoherentState,
    omega_prime: &IncoherentState,
    epsilon: f64,
    catalyst_dimension: f64,
    constant: f64,
) -> Result<bool> {
    if !(catalyst_dimension >= 2.0) {
        return Err(Error::InvalidParameter(format!(
            "catalyst dimension must be at least 2, got {catalyst_dimension}"
        )));
    }
    if !(epsilon >= 0.0 && constant > 0.0) {
        return Err(Error::InvalidParameter("epsilon and constant must be nonnegative".into()));
    }
    let distance = total_variation(omega, omega_prime)?;
    Ok(distance <= constant * epsilon / catalyst_dimension.ln())
}

pub fn embezzlement_guard(
    omega: &IncoherentState,
    omega_prime: &IncoherentState,
    epsilon: f64,
    catalyst_dimension: f64,
) -> Result<bool> {
    embezzlement_guard_with(omega, omega_prime, epsilon, catalyst_dimension, 1.0)
}

/// `tr(H_W ρ'_W) - tr(H_W ρ_W)`.
pub fn average_work(battery: &IncoherentState, battery_final: &IncoherentState) -> Result<f64> {
    if !battery.same_hamiltonian(battery_final) {
        return Err(Error::HamiltonianMismatch);
    }
    Ok(mean_energy(battery_final) - mean_energy(battery))
}
