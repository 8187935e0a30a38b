//! Brute-force search for a qubit catalyst enabling a thermal transition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::{Hamiltonian, IncoherentState, InverseTemperature};
use crate::thermo_curve::check_thermal_transition;

/// Search grid: `r = k / resolution` for `0 < k < resolution`, and gaps
/// `g = j · max_gap / resolution` for `0 ≤ j ≤ resolution`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalystGrid {
    pub resolution: usize,
    pub max_gap: f64,
}

impl Default for CatalystGrid {
    fn default() -> Self {
        Self {
            resolution: 20,
            max_gap: 4.0,
        }
    }
}

/// Qubit catalyst `(r, 1 - r)` on levels `{0, g}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Catalyst {
    pub probability: f64,
    pub gap: f64,
}

impl Catalyst {
    pub fn hamiltonian(&self) -> Hamiltonian {
        Hamiltonian::new(&[0.0, self.gap]).expect("finite gap")
    }

    pub fn state(&self) -> IncoherentState {
        IncoherentState::new(&self.hamiltonian(), &[self.probability, 1.0 - self.probability])
            .expect("probability in [0, 1]")
    }
}

fn enables(
    source: &IncoherentState,
    target: &IncoherentState,
    beta: InverseTemperature,
    catalyst: &Catalyst,
) -> Result<bool> {
    let w = catalyst.state();
    Ok(check_thermal_transition(&source.tensor(&w)?, &target.tensor(&w)?, beta).feasible)
}

/// First catalyst on the grid for which `ρ ⊗ ω → ρ' ⊗ ω` passes the curve test.
///
/// The trivial catalyst `(1, 0)` on a degenerate qubit is tried before the grid.
pub fn catalyst_search(
    source: &IncoherentState,
    target: &IncoherentState,
    beta: InverseTemperature,
    grid: CatalystGrid,
) -> Result<Option<Catalyst>> {
    if !source.same_hamiltonian(target) {
        return Err(Error::HamiltonianMismatch);
    }
    if grid.resolution < 2 || !(grid.max_gap.is_finite() && grid.max_gap >= 0.0) {
        return Err(Error::InvalidParameter("catalyst grid needs resolution >= 2 and a finite gap".into()));
    }
    let trivial = Catalyst {
        probability: 1.0,
        gap: 0.0,
    };
    if enables(source, target, beta, &trivial)? {
        return Ok(Some(trivial));
    }
    let res = grid.resolution as f64;
    for k in 1..grid.resolution {
        for j in 0..=grid.resolution {
            let catalyst = Catalyst {
                probability: k as f64 / res,
                gap: j as f64 * grid.max_gap / res,
            };
            if enables(source, target, beta, &catalyst)? {
                return Ok(Some(catalyst));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergence::{check_cto_transition, AlphaGrid};
    use crate::states::gibbs;

    #[test]
    fn thermal_pairs_need_no_catalyst() {
        let b = InverseTemperature::new(1.0).unwrap();
        let h = Hamiltonian::new(&[0.0, 0.5, 1.0]).unwrap();
        let s = IncoherentState::new(&h, &[0.7, 0.2, 0.1]).unwrap();
        let found = catalyst_search(&s, &gibbs(&h, b), b, CatalystGrid::default()).unwrap();
        assert_eq!(found, Some(Catalyst { probability: 1.0, gap: 0.0 }));
    }

    #[test]
    fn catalysis_fixture() {
        let b = InverseTemperature::new(1.0).unwrap();
        let h = Hamiltonian::degenerate(4).unwrap();
        let s = IncoherentState::new(&h, &[0.5, 0.25, 0.25, 0.0]).unwrap();
        let t = IncoherentState::new(&h, &[0.4, 0.4, 0.1, 0.1]).unwrap();
        assert!(!check_thermal_transition(&s, &t, b).feasible);
        assert!(check_cto_transition(&s, &t, b, &AlphaGrid::default()).unwrap().feasible);
        let c = catalyst_search(&s, &t, b, CatalystGrid::default()).unwrap().unwrap();
        assert!(c.probability < 1.0);
        let w = c.state();
        assert!(check_thermal_transition(&s.tensor(&w).unwrap(), &t.tensor(&w).unwrap(), b).feasible);
    }

    #[test]
    fn violated_second_law_defeats_every_catalyst() {
        let b = InverseTemperature::new(1.0).unwrap();
        let h = Hamiltonian::new(&[0.0, 0.5, 1.0]).unwrap();
        let s = IncoherentState::new(&h, &[0.7, 0.2, 0.1]).unwrap();
        let g = gibbs(&h, b);
        assert!(!check_cto_transition(&g, &s, b, &AlphaGrid::default()).unwrap().feasible);
        let grid = CatalystGrid { resolution: 10, max_gap: 3.0 };
        assert_eq!(catalyst_search(&g, &s, b, grid).unwrap(), None);
    }
}
