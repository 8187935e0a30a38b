use serde::{Deserialize, Serialize};

use crate::divergence::RenyiAlpha;

/// Outcome of a state-transition check.
///
/// An infeasible verdict always carries a certificate that can be replayed
/// with the public evaluation functions of the deciding module.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionVerdict {
    pub feasible: bool,
    pub certificate: Option<Certificate>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// Sorted prefix sums of length `k` where the source falls short.
    Prefix {
        k: usize,
        source_sum: f64,
        target_sum: f64,
    },
    /// A breakpoint where the candidate curve lies below the target curve.
    CurveCrossing { x: f64, candidate: f64, target: f64 },
    /// An order at which the divergence from the Gibbs state increases.
    Alpha {
        alpha: RenyiAlpha,
        #[serde(with = "crate::serde_ext::extended")]
        source: f64,
        #[serde(with = "crate::serde_ext::extended")]
        target: f64,
    },
}

impl TransitionVerdict {
    pub fn feasible() -> Self {
        Self {
            feasible: true,
            certificate: None,
        }
    }

    pub fn infeasible(certificate: Certificate) -> Self {
        Self {
            feasible: false,
            certificate: Some(certificate),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("verdict serializes")
    }
}
