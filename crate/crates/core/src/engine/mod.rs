//! Heat engines with a finite cold bath: Carnot bound, the Ω criterion and
//! the nanoscale efficiency, plus a numerical quasi-static estimator.

mod estimator;

use serde::{Deserialize, Serialize};

pub use estimator::{quasi_static_estimate, Constraints, EstimatorPoint};

use crate::error::{Error, Result};
use crate::states::{shannon_entropy, IncoherentState, InverseTemperature};

/// Two baths, a cold bath of qubits with the given gaps, and a battery failure budget.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineSpec {
    beta_hot: InverseTemperature,
    beta_cold: InverseTemperature,
    gaps: Vec<f64>,
    epsilon: f64,
}

impl EngineSpec {
    pub fn new(
        beta_hot: InverseTemperature,
        beta_cold: InverseTemperature,
        gaps: Vec<f64>,
        epsilon: f64,
    ) -> Result<Self> {
        if beta_cold.value() <= beta_hot.value() {
            return Err(Error::InvalidParameter(format!(
                "cold bath must be colder: beta_cold {} <= beta_hot {}",
                beta_cold.value(),
                beta_hot.value()
            )));
        }
        if gaps.is_empty() {
            return Err(Error::InvalidParameter("at least one cold-bath gap is required".into()));
        }
        if let Some(g) = gaps.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
            return Err(Error::InvalidParameter(format!("gaps must be positive, got {g}")));
        }
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::InvalidParameter(format!(
                "battery failure must lie in [0, 1), got {epsilon}"
            )));
        }
        Ok(Self {
            beta_hot,
            beta_cold,
            gaps,
            epsilon,
        })
    }

    pub fn beta_hot(&self) -> InverseTemperature {
        self.beta_hot
    }

    pub fn beta_cold(&self) -> InverseTemperature {
        self.beta_cold
    }

    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// `1 - β_hot / β_cold`.
pub fn carnot(beta_hot: InverseTemperature, beta_cold: InverseTemperature) -> Result<f64> {
    if beta_cold.value() <= beta_hot.value() {
        return Err(Error::InvalidParameter(
            "Carnot efficiency needs beta_cold > beta_hot".into(),
        ));
    }
    Ok(1.0 - beta_hot.value() / beta_cold.value())
}

/// How the per-gap term of Ω is weighted.
///
/// With `x = β_c ΔE` and `Z = 1 + e^{-x}`, the per-gap term is
/// `(β_c - β_h) ΔE` multiplied by
///
/// * `Verbatim`: `1 / (Z e^{x})`
/// * `Alt`: `e^{x} / Z`
/// * `GroundWeighted`: `1 / Z`, the cold ground-state population.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OmegaConvention {
    #[default]
    Verbatim,
    Alt,
    GroundWeighted,
}

impl std::str::FromStr for OmegaConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "verbatim" => Ok(Self::Verbatim),
            "alt" => Ok(Self::Alt),
            "ground-weighted" => Ok(Self::GroundWeighted),
            other => Err(Error::InvalidParameter(format!("unknown omega convention {other:?}"))),
        }
    }
}

impl std::fmt::Display for OmegaConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Verbatim => "verbatim",
            Self::Alt => "alt",
            Self::GroundWeighted => "ground-weighted",
        })
    }
}

/// Ω with the qubit partition functions taken at the cold temperature.
pub fn omega(spec: &EngineSpec, convention: OmegaConvention) -> f64 {
    omega_at(spec, convention, spec.beta_cold)
}

/// Ω with the qubit partition functions `Z_i` taken at `z_beta`.
pub fn omega_at(spec: &EngineSpec, convention: OmegaConvention, z_beta: InverseTemperature) -> f64 {
    let (bh, bc, bz) = (spec.beta_hot.value(), spec.beta_cold.value(), z_beta.value());
    spec.gaps
        .iter()
        .map(|&g| {
            let prefactor = (bc - bh) * g;
            let z = 1.0 + (-bz * g).exp();
            let x = bc * g;
            match convention {
                OmegaConvention::Verbatim => prefactor / (z * x.exp()),
                OmegaConvention::Alt => prefactor * x.exp() / z,
                OmegaConvention::GroundWeighted => prefactor / z,
            }
        })
        .fold(f64::INFINITY, f64::min)
}

/// Nanoscale efficiency: Carnot when `Ω ≤ 1`, otherwise `(1 + β_h Ω / (β_c - β_h))⁻¹`.
pub fn eta_nano(omega: f64, beta_hot: InverseTemperature, beta_cold: InverseTemperature) -> Result<f64> {
    let eta_c = carnot(beta_hot, beta_cold)?;
    if !(omega >= 0.0) {
        return Err(Error::InvalidParameter(format!("omega must be >= 0, got {omega}")));
    }
    if omega <= 1.0 {
        return Ok(eta_c);
    }
    let (bh, bc) = (beta_hot.value(), beta_cold.value());
    Ok(1.0 / (1.0 + bh * omega / (bc - bh)))
}

/// Battery entropy produced per unit of extracted work.
pub fn near_perfect_ratio(
    battery_initial: &IncoherentState,
    battery_final: &IncoherentState,
    work: f64,
) -> Result<f64> {
    if !(work > 0.0) {
        return Err(Error::InvalidParameter(format!("extracted work must be positive, got {work}")));
    }
    Ok((shannon_entropy(battery_final) - shannon_entropy(battery_initial)) / work)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    pub carnot: f64,
    pub omega: f64,
    pub convention: OmegaConvention,
    pub eta_nano: f64,
    pub estimator: Option<Vec<EstimatorPoint>>,
}

impl EfficiencyReport {
    pub fn new(spec: &EngineSpec, convention: OmegaConvention) -> Result<Self> {
        let omega = omega(spec, convention);
        Ok(Self {
            carnot: carnot(spec.beta_hot, spec.beta_cold)?,
            omega,
            convention,
            eta_nano: eta_nano(omega, spec.beta_hot, spec.beta_cold)?,
            estimator: None,
        })
    }
}
