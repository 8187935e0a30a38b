//! Classical Rényi divergences on the extended order line.
//!
//! For `α ≥ 0`, `D_α(p‖q) = ln(Σ p^α q^{1-α}) / (α-1)`; for `α < 0` the
//! prefactor becomes `1/(1-α)`. Conventions:
//!
//! * `0 ln 0 = 0`, and atoms with `p = 0` contribute nothing for `α > 0`.
//! * For `α < 0`, an atom with `p = 0 < q` forces `D_α = +∞`.
//! * For `α ≥ 1`, an atom with `p > 0 = q` forces `D_α = +∞`.
//!
//! `p` is renormalized to unit mass before evaluation so the normalization
//! slack of a state cannot leak into orders near one.

use std::cmp::Ordering;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::states::{gibbs, in_support, IncoherentState, InverseTemperature};

/// Order of a Rényi quantity, including the limit points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RenyiAlpha {
    NegInfinity,
    /// Limit from below at zero.
    ZeroMinus,
    /// Limit from above at zero, the support (min-relative) quantity.
    Zero,
    /// Continuity point, the Kullback–Leibler divergence.
    One,
    /// Any finite order other than 0 and 1.
    Finite(f64),
    Infinity,
}

impl RenyiAlpha {
    /// Tags `0`, `1` and the infinities; everything else is `Finite`.
    pub fn new(alpha: f64) -> Self {
        if alpha == 0.0 {
            Self::Zero
        } else if alpha == 1.0 {
            Self::One
        } else if alpha == f64::INFINITY {
            Self::Infinity
        } else if alpha == f64::NEG_INFINITY {
            Self::NegInfinity
        } else {
            Self::Finite(alpha)
        }
    }

    /// Numeric position on the α line; `ZeroMinus` maps to `-0.0`.
    pub fn value(self) -> f64 {
        match self {
            Self::NegInfinity => f64::NEG_INFINITY,
            Self::ZeroMinus => -0.0,
            Self::Zero => 0.0,
            Self::One => 1.0,
            Self::Finite(a) => a,
            Self::Infinity => f64::INFINITY,
        }
    }

    pub fn is_negative(self) -> bool {
        matches!(self, Self::NegInfinity | Self::ZeroMinus) || matches!(self, Self::Finite(a) if a < 0.0)
    }

    /// The five analytic limit points.
    pub fn limits() -> [RenyiAlpha; 5] {
        [
            Self::NegInfinity,
            Self::ZeroMinus,
            Self::Zero,
            Self::One,
            Self::Infinity,
        ]
    }

    fn sort_key(self) -> (f64, u8) {
        match self {
            Self::ZeroMinus => (0.0, 0),
            Self::Zero => (0.0, 1),
            other => (other.value(), 1),
        }
    }
}

impl PartialOrd for RenyiAlpha {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.sort_key().partial_cmp(&other.sort_key())
    }
}

impl fmt::Display for RenyiAlpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NegInfinity => f.write_str("-inf"),
            Self::ZeroMinus => f.write_str("0-"),
            Self::Infinity => f.write_str("inf"),
            other => write!(f, "{}", other.value()),
        }
    }
}

impl std::str::FromStr for RenyiAlpha {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "+inf" | "infinity" => Ok(Self::Infinity),
            "-inf" | "-infinity" => Ok(Self::NegInfinity),
            "0-" => Ok(Self::ZeroMinus),
            t => t
                .parse::<f64>()
                .ok()
                .filter(|a| !a.is_nan())
                .map(Self::new)
                .ok_or_else(|| Error::InvalidParameter(format!("not an order: {t:?}"))),
        }
    }
}

impl Serialize for RenyiAlpha {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::NegInfinity | Self::ZeroMinus | Self::Infinity => s.serialize_str(&self.to_string()),
            other => s.serialize_f64(other.value()),
        }
    }
}

impl<'de> Deserialize<'de> for RenyiAlpha {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct AlphaVisitor;
        impl Visitor<'_> for AlphaVisitor {
            type Value = RenyiAlpha;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or one of \"inf\", \"-inf\", \"0-\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<RenyiAlpha, E> {
                Ok(RenyiAlpha::new(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<RenyiAlpha, E> {
                Ok(RenyiAlpha::new(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<RenyiAlpha, E> {
                Ok(RenyiAlpha::new(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<RenyiAlpha, E> {
                v.parse().map_err(|e: Error| E::custom(e.to_string()))
            }
        }
        d.deserialize_any(AlphaVisitor)
    }
}

/// One coordinate of a weighted pair of distributions.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Term {
    pub weight: f64,
    pub p: f64,
    pub q: f64,
}

/// Divergence of weighted terms; `p` is renormalized by its total mass.
pub(crate) fn divergence_terms(terms: &[Term], alpha: RenyiAlpha) -> f64 {
    let mass: f64 = terms
        .iter()
        .filter(|t| in_support(t.p))
        .map(|t| t.weight * t.p)
        .sum();
    if !(mass > 0.0) {
        return f64::NAN;
    }
    let supp = || terms.iter().filter(|t| in_support(t.p));
    let gap_under_q = terms.iter().any(|t| !in_support(t.p) && t.q > 0.0);
    let outside_q = supp().any(|t| t.q <= 0.0);

    match alpha {
        RenyiAlpha::Zero => -supp().map(|t| t.weight * t.q).sum::<f64>().ln(),
        RenyiAlpha::ZeroMinus => {
            if gap_under_q {
                f64::INFINITY
            } else {
                supp().filter(|t| t.q > 0.0).map(|t| t.weight * t.q).sum::<f64>().ln()
            }
        }
        RenyiAlpha::One => {
            if outside_q {
                return f64::INFINITY;
            }
            supp()
                .map(|t| {
                    let p = t.p / mass;
                    t.weight * p * (p.ln() - t.q.ln())
                })
                .sum()
        }
        RenyiAlpha::Infinity => {
            if outside_q {
                return f64::INFINITY;
            }
            supp()
                .map(|t| (t.p / mass).ln() - t.q.ln())
                .fold(f64::NEG_INFINITY, f64::max)
        }
        RenyiAlpha::NegInfinity => {
            if gap_under_q {
                return f64::INFINITY;
            }
            supp()
                .filter(|t| t.q > 0.0)
                .map(|t| t.q.ln() - (t.p / mass).ln())
                .fold(f64::NEG_INFINITY, f64::max)
        }
        RenyiAlpha::Finite(a) => {
            if (a - 1.0).abs() < 1e-12 {
                return divergence_terms(terms, RenyiAlpha::One);
            }
            if a < 0.0 && gap_under_q {
                return f64::INFINITY;
            }
            if a > 1.0 && outside_q {
                return f64::INFINITY;
            }
            let log_s = log_moment(terms, mass, a);
            if a > 0.0 {
                log_s / (a - 1.0)
            } else {
                log_s / (1.0 - a)
            }
        }
    }
}

/// `ln Σ w p̂^α q^{1-α}` over the support of `p`.
fn log_moment(terms: &[Term], mass: f64, alpha: f64) -> f64 {
    let expo = 1.0 - alpha;
    // r = ln(q/p̂); the moment is E_p̂[e^{(1-α) r}].
    let rs: Vec<(f64, f64)> = terms
        .iter()
        .filter(|t| in_support(t.p))
        .map(|t| {
            let p = t.p / mass;
            (t.weight * p, t.q.ln() - p.ln())
        })
        .collect();
    let spread = rs
        .iter()
        .filter(|(_, r)| r.is_finite())
        .map(|(_, r)| (expo * r).abs())
        .fold(0.0, f64::max);
    if spread <= 1.0 {
        // Close to α = 1 the moment is 1 + O(1-α); keep the small part exact.
        let excess: f64 = rs.iter().map(|(w, r)| w * (expo * r).exp_m1()).sum();
        excess.ln_1p()
    } else {
        let logs: Vec<f64> = rs.iter().map(|(w, r)| w.ln() + expo * r).collect();
        crate::states::log_sum_exp(&logs)
    }
}

/// `D_α(p‖q)` for plain probability vectors of equal length.
pub fn renyi_divergence(p: &[f64], q: &[f64], alpha: RenyiAlpha) -> f64 {
    assert_eq!(p.len(), q.len(), "dimension mismatch");
    let terms: Vec<Term> = p
        .iter()
        .zip(q)
        .map(|(&p, &q)| Term { weight: 1.0, p, q })
        .collect();
    divergence_terms(&terms, alpha)
}

/// `D_α(ρ‖σ)` for two states on the same levels.
pub fn state_divergence(rho: &IncoherentState, sigma: &IncoherentState, alpha: RenyiAlpha) -> Result<f64> {
    if !rho.same_hamiltonian(sigma) {
        return Err(Error::HamiltonianMismatch);
    }
    Ok(divergence_terms(&pair_terms(rho, sigma), alpha))
}

pub(crate) fn pair_terms(rho: &IncoherentState, sigma: &IncoherentState) -> Vec<Term> {
    rho.atoms()
        .iter()
        .zip(sigma.atoms())
        .map(|(a, b)| Term {
            weight: a.multiplicity as f64,
            p: a.probability,
            q: b.probability,
        })
        .collect()
}

/// `D_α(ρ‖τ_β)` against the Gibbs state of the state's own Hamiltonian.
pub fn gibbs_divergence(rho: &IncoherentState, beta: InverseTemperature, alpha: RenyiAlpha) -> f64 {
    let tau = gibbs(&rho.hamiltonian(), beta);
    divergence_terms(&pair_terms(rho, &tau), alpha)
}

/// `α ↦ D_α(p‖q)` on a grid plus the analytic limits, sorted by α.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceProfile {
    pub points: Vec<ProfilePoint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub alpha: RenyiAlpha,
    #[serde(with = "crate::serde_ext::extended")]
    pub value: f64,
}

impl DivergenceProfile {
    pub fn compute(p: &[f64], q: &[f64], grid: &[f64]) -> Self {
        let terms: Vec<Term> = p
            .iter()
            .zip(q)
            .map(|(&p, &q)| Term { weight: 1.0, p, q })
            .collect();
        Self::from_terms(&terms, grid)
    }

    pub fn of_state(rho: &IncoherentState, beta: InverseTemperature, grid: &[f64]) -> Self {
        let tau = gibbs(&rho.hamiltonian(), beta);
        Self::from_terms(&pair_terms(rho, &tau), grid)
    }

    fn from_terms(terms: &[Term], grid: &[f64]) -> Self {
        let mut alphas: Vec<RenyiAlpha> = grid.iter().map(|&a| RenyiAlpha::new(a)).collect();
        alphas.extend(RenyiAlpha::limits());
        alphas.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        alphas.dedup();
        let points = alphas
            .into_iter()
            .map(|alpha| ProfilePoint {
                alpha,
                value: divergence_terms(terms, alpha),
            })
            .collect();
        Self { points }
    }

    pub fn get(&self, alpha: RenyiAlpha) -> Option<f64> {
        self.points.iter().find(|p| p.alpha == alpha).map(|p| p.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::Hamiltonian;
    use std::f64::consts::LN_2;

    const ALL: [f64; 9] = [-7.0, -1.0, -0.2, 0.3, 0.999_999_9, 1.000_000_1, 2.0, 9.0, 40.0];

    #[test]
    fn self_divergence_is_zero() {
        let p = [0.1, 0.2, 0.3, 0.4];
        for a in ALL.iter().map(|&a| RenyiAlpha::new(a)).chain(RenyiAlpha::limits()) {
            assert!(renyi_divergence(&p, &p, a).abs() < 1e-12, "alpha {a}");
        }
    }

    #[test]
    fn kullback_leibler_example() {
        let d = renyi_divergence(&[0.75, 0.25], &[0.5, 0.5], RenyiAlpha::One);
        let expected = 0.75 * 1.5f64.ln() + 0.25 * 0.5f64.ln();
        assert!((d - expected).abs() < 1e-15);
        assert!((d - 0.13081).abs() < 1e-5);
    }

    #[test]
    fn support_divergence_example_and_right_limit() {
        let p = [1.0, 0.0];
        let q = [2.0 / 3.0, 1.0 / 3.0];
        let d0 = renyi_divergence(&p, &q, RenyiAlpha::Zero);
        assert!((d0 + (2.0f64 / 3.0).ln()).abs() < 1e-15);
        assert!((d0 - 0.40546).abs() < 1e-5);
        // pure p: every positive order gives -ln q_0
        let near = renyi_divergence(&p, &q, RenyiAlpha::new(1e-6));
        assert!((near - d0).abs() < 1e-9);
    }

    #[test]
    fn zero_limit_from_below_is_full_rank_indicator() {
        let q = [0.5, 0.25, 0.25];
        assert_eq!(renyi_divergence(&[0.5, 0.5, 0.0], &q, RenyiAlpha::ZeroMinus), f64::INFINITY);
        assert!(renyi_divergence(&[0.2, 0.3, 0.5], &q, RenyiAlpha::ZeroMinus).abs() < 1e-15);
        let d = renyi_divergence(&[0.2, 0.3, 0.5], &q, RenyiAlpha::new(-1e-7));
        assert!(d.abs() < 1e-6);
    }

    #[test]
    fn extended_limits_match_large_orders() {
        let p = [0.6, 0.3, 0.1];
        let q = [0.2, 0.5, 0.3];
        let inf = renyi_divergence(&p, &q, RenyiAlpha::Infinity);
        assert!((inf - 3f64.ln()).abs() < 1e-15);
        let big = renyi_divergence(&p, &q, RenyiAlpha::new(5000.0));
        assert!((big - inf).abs() < 1e-3);
        let neg_inf = renyi_divergence(&p, &q, RenyiAlpha::NegInfinity);
        assert!((neg_inf - 3f64.ln()).abs() < 1e-15);
        let very_neg = renyi_divergence(&p, &q, RenyiAlpha::new(-5000.0));
        assert!((very_neg - neg_inf).abs() < 1e-3);
    }

    #[test]
    fn unsupported_mass_conventions() {
        let q = [0.5, 0.5, 0.0];
        let p = [0.5, 0.25, 0.25];
        assert_eq!(renyi_divergence(&p, &q, RenyiAlpha::new(2.0)), f64::INFINITY);
        assert_eq!(renyi_divergence(&p, &q, RenyiAlpha::One), f64::INFINITY);
        assert_eq!(renyi_divergence(&p, &q, RenyiAlpha::Infinity), f64::INFINITY);
        assert!(renyi_divergence(&p, &q, RenyiAlpha::new(0.5)).is_finite());
        let gap = [1.0, 0.0, 0.0];
        let full = [0.5, 0.3, 0.2];
        assert_eq!(renyi_divergence(&gap, &full, RenyiAlpha::new(-0.5)), f64::INFINITY);
        assert_eq!(renyi_divergence(&gap, &full, RenyiAlpha::NegInfinity), f64::INFINITY);
        // atoms outside both supports are ignored for negative orders
        let q2 = [0.6, 0.4, 0.0];
        let p2 = [0.5, 0.5, 0.0];
        assert!(renyi_divergence(&p2, &q2, RenyiAlpha::new(-2.0)).is_finite());
    }

    #[test]
    fn continuity_at_one() {
        let p = [0.7, 0.2, 0.1];
        let q = [0.3, 0.3, 0.4];
        let kl = renyi_divergence(&p, &q, RenyiAlpha::One);
        for eps in [1e-3, 1e-6, 1e-9] {
            let lo = renyi_divergence(&p, &q, RenyiAlpha::new(1.0 - eps));
            let hi = renyi_divergence(&p, &q, RenyiAlpha::new(1.0 + eps));
            assert!(lo <= kl + 1e-12 && kl <= hi + 1e-12);
            assert!((hi - lo).abs() < 10.0 * eps, "eps {eps}");
        }
    }

    #[test]
    fn multiplicity_weights_agree_with_expansion() {
        let h = Hamiltonian::with_multiplicities(&[0.0, LN_2], &[1, 3]).unwrap();
        let b = InverseTemperature::new(1.0).unwrap();
        let rho = IncoherentState::new(&h, &[0.4, 0.2]).unwrap();
        let tau = gibbs(&h, b);
        for a in ALL {
            let a = RenyiAlpha::new(a);
            let grouped = gibbs_divergence(&rho, b, a);
            let flat = renyi_divergence(
                &rho.expanded_probabilities(),
                &tau.expanded_probabilities(),
                a,
            );
            assert!((grouped - flat).abs() < 1e-12, "alpha {a}");
        }
    }

    #[test]
    fn alpha_parsing_and_order() {
        assert_eq!("inf".parse::<RenyiAlpha>().unwrap(), RenyiAlpha::Infinity);
        assert_eq!("0-".parse::<RenyiAlpha>().unwrap(), RenyiAlpha::ZeroMinus);
        assert_eq!("1".parse::<RenyiAlpha>().unwrap(), RenyiAlpha::One);
        assert_eq!("2.5".parse::<RenyiAlpha>().unwrap(), RenyiAlpha::Finite(2.5));
        assert!("x".parse::<RenyiAlpha>().is_err());
        assert!(RenyiAlpha::ZeroMinus < RenyiAlpha::Zero);
        assert!(RenyiAlpha::Finite(-0.1) < RenyiAlpha::ZeroMinus);
        assert!(RenyiAlpha::Finite(50.0) < RenyiAlpha::Infinity);
        let json = serde_json::to_string(&[RenyiAlpha::Infinity, RenyiAlpha::Finite(0.5)]).unwrap();
        assert_eq!(json, r#"["inf",0.5]"#);
        let back: Vec<RenyiAlpha> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, vec![RenyiAlpha::Infinity, RenyiAlpha::Finite(0.5)]);
    }

    #[test]
    fn profile_is_sorted_and_contains_limits() {
        let prof = DivergenceProfile::compute(&[0.7, 0.3], &[0.5, 0.5], &[2.0, -1.0, 0.5]);
        let alphas: Vec<_> = prof.points.iter().map(|p| p.alpha).collect();
        assert_eq!(alphas.len(), 8);
        assert!(alphas.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(prof.get(RenyiAlpha::Zero), Some(0.0));
    }
}
