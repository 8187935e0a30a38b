//! β-ordering, thermo-majorization curves and the thermal-operation test.
//!
//! The curve of `(ρ, H)` joins `(0, 0)` with the cumulative points
//! `(Σ_{k≤j} e^{-βE_k}, Σ_{k≤j} p_k)` taken in β-order. With multiplicity,
//! an atom contributes width `m e^{-βE}` and height `m p` in one segment.

use serde::{Deserialize, Serialize};

use crate::states::{in_support, IncoherentState, InverseTemperature};
use crate::verdict::{Certificate, TransitionVerdict};

/// Curve comparisons accept a deficit up to this size.
pub const DOMINANCE_TOLERANCE: f64 = 1e-12;

/// Relative slack under which two β-scores count as tied.
const SCORE_TIE: f64 = 1e-12;

/// Permutation of atom indices sorting `p_i e^{βE_i}` into non-increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BetaOrder(pub Vec<usize>);

impl BetaOrder {
    pub fn indices(&self) -> &[usize] {
        &self.0
    }
}

/// `ln(p e^{βE})`, `-∞` outside the support.
fn log_score(p: f64, energy: f64, beta: f64) -> f64 {
    if in_support(p) {
        p.ln() + beta * energy
    } else {
        f64::NEG_INFINITY
    }
}

/// β-order with a canonical tie-break: near-equal scores are ordered by
/// energy ascending, then by index. Unoccupied atoms come last.
pub fn beta_order(state: &IncoherentState, beta: InverseTemperature) -> BetaOrder {
    let atoms = state.atoms();
    let scores: Vec<f64> = atoms
        .iter()
        .map(|a| log_score(a.probability, a.energy, beta.value()))
        .collect();
    let mut idx: Vec<usize> = (0..atoms.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));

    // Regroup runs of tied scores. Scores are logarithms, so an absolute
    // difference is a relative tolerance on p e^{βE}.
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() {
            let (s0, s1) = (scores[idx[end - 1]], scores[idx[end]]);
            let tied = (s0 == s1) || (s0 - s1).abs() <= SCORE_TIE;
            if !tied {
                break;
            }
            end += 1;
        }
        idx[start..end].sort_by(|&a, &b| {
            atoms[a]
                .energy
                .total_cmp(&atoms[b].energy)
                .then(a.cmp(&b))
        });
        start = end;
    }
    BetaOrder(idx)
}

/// Concave piecewise-linear curve, stored by its vertices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermoCurve {
    vertices: Vec<(f64, f64)>,
}

impl ThermoCurve {
    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    /// Right endpoint abscissa, the partition function of the Hamiltonian.
    pub fn width(&self) -> f64 {
        self.vertices.last().map_or(0.0, |v| v.0)
    }

    /// Value at `x ≥ 0`; constant beyond the last vertex.
    pub fn eval(&self, x: f64) -> f64 {
        curve_eval(self, x)
    }

    /// Builds a curve from raw segments `(width, height)` in the given order,
    /// merging consecutive segments of equal slope.
    fn from_segments(segments: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut vertices = vec![(0.0, 0.0)];
        let mut slope_of_last: Option<f64> = None;
        let (mut x, mut y) = (0.0f64, 0.0f64);
        for (w, h) in segments {
            if w <= 0.0 {
                continue;
            }
            x += w;
            y += h;
            let slope = h / w;
            let same = slope_of_last.is_some_and(|s| {
                (s - slope).abs() <= SCORE_TIE * s.abs().max(slope.abs())
            });
            if same {
                *vertices.last_mut().expect("nonempty") = (x, y);
            } else {
                vertices.push((x, y));
                slope_of_last = Some(slope);
            }
        }
        ThermoCurve { vertices }
    }
}

/// Thermo-majorization curve of a state against the Gibbs state at `beta`.
pub fn curve(state: &IncoherentState, beta: InverseTemperature) -> ThermoCurve {
    let order = beta_order(state, beta);
    let atoms = state.atoms();
    ThermoCurve::from_segments(order.0.iter().map(|&i| {
        let a = &atoms[i];
        let m = a.multiplicity as f64;
        (m * (-beta.value() * a.energy).exp(), m * a.probability)
    }))
}

/// Piecewise-linear interpolation; saturates at the last vertex height.
pub fn curve_eval(c: &ThermoCurve, x: f64) -> f64 {
    let v = &c.vertices;
    if x <= 0.0 {
        return 0.0;
    }
    let last = *v.last().expect("curves have vertices");
    if x >= last.0 {
        return last.1;
    }
    // first vertex with abscissa >= x
    let k = v.partition_point(|p| p.0 < x);
    let (x0, y0) = v[k - 1];
    let (x1, y1) = v[k];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Decides whether `a` lies on or above `b` everywhere.
///
/// Both curves are concave and piecewise linear, so their difference is
/// linear between consecutive breakpoints of the union and it suffices to
/// check there. The certificate reports the largest deficit.
pub fn dominates(a: &ThermoCurve, b: &ThermoCurve) -> TransitionVerdict {
    let mut worst: Option<(f64, f64, f64)> = None;
    let xs = a.vertices.iter().chain(&b.vertices).map(|v| v.0);
    for x in xs {
        let (ya, yb) = (curve_eval(a, x), curve_eval(b, x));
        let deficit = yb - ya;
        if deficit > DOMINANCE_TOLERANCE && worst.is_none_or(|(_, wa, wb)| deficit > wb - wa) {
            worst = Some((x, ya, yb));
        }
    }
    match worst {
        None => TransitionVerdict::feasible(),
        Some((x, candidate, target)) => TransitionVerdict::infeasible(Certificate::CurveCrossing {
            x,
            candidate,
            target,
        }),
    }
}

/// Thermal-operation feasibility of `(ρ, H) → (ρ', H')` at inverse temperature `beta`.
pub fn check_thermal_transition(
    source: &IncoherentState,
    target: &IncoherentState,
    beta: InverseTemperature,
) -> TransitionVerdict {
    dominates(&curve(source, beta), &curve(target, beta))
}
