//! Majorization, noisy-operation feasibility and bistochastic constructions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::IncoherentState;
use crate::verdict::{Certificate, TransitionVerdict};

/// Slack allowed when comparing prefix sums.
pub const PREFIX_TOLERANCE: f64 = 1e-12;

/// Row/column sums of a bistochastic matrix must be within this of one.
pub const BISTOCHASTIC_TOLERANCE: f64 = 1e-9;

/// Dense square matrix acting on column vectors, `(A p)_i = Σ_j A_ij p_j`.
///
/// Columns sum to one. Serializes row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StochasticMatrix {
    dim: usize,
    rows: Vec<Vec<f64>>,
}

impl StochasticMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut rows = vec![vec![0.0; dim]; dim];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Self { dim, rows }
    }

    /// `P` with `P[i][perm[i]] = 1`.
    pub fn permutation(perm: &[usize]) -> Self {
        let dim = perm.len();
        let mut rows = vec![vec![0.0; dim]; dim];
        for (i, &j) in perm.iter().enumerate() {
            rows[i][j] = 1.0;
        }
        Self { dim, rows }
    }

    /// Accepts any square matrix with entries in `[0, 1]` and unit column sums.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidParameter("matrix must be square and nonempty".into()));
        }
        if rows.iter().flatten().any(|&x| !(-1e-15..=1.0 + 1e-12).contains(&x)) {
            return Err(Error::InvalidParameter("entries must lie in [0, 1]".into()));
        }
        let m = Self { dim, rows };
        if let Some(j) = (0..dim).find(|&j| (m.column_sum(j) - 1.0).abs() > BISTOCHASTIC_TOLERANCE)
        {
            return Err(Error::InvalidParameter(format!(
                "column {j} sums to {}",
                m.column_sum(j)
            )));
        }
        Ok(m)
    }

    pub(crate) fn from_rows_unchecked(rows: Vec<Vec<f64>>) -> Self {
        Self {
            dim: rows.len(),
            rows,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i][j]
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.rows[i].iter().sum()
    }

    pub fn column_sum(&self, j: usize) -> f64 {
        self.rows.iter().map(|r| r[j]).sum()
    }

    /// Largest deviation of any row or column sum from one.
    pub fn bistochastic_defect(&self) -> f64 {
        (0..self.dim)
            .flat_map(|k| [self.row_sum(k), self.column_sum(k)])
            .map(|s| (s - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_bistochastic(&self, tol: f64) -> bool {
        self.bistochastic_defect() <= tol
            && self.rows.iter().flatten().all(|&x| x >= -tol)
    }

    pub fn apply(&self, p: &[f64]) -> Vec<f64> {
        assert_eq!(p.len(), self.dim, "dimension mismatch");
        self.rows
            .iter()
            .map(|r| r.iter().zip(p).map(|(a, x)| a * x).sum())
            .collect()
    }

    /// Matrix product `self · rhs`.
    pub fn compose(&self, rhs: &StochasticMatrix) -> StochasticMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let d = self.dim;
        let mut rows = vec![vec![0.0; d]; d];
        for (i, row) in rows.iter_mut().enumerate() {
            for k in 0..d {
                let a = self.rows[i][k];
                if a == 0.0 {
                    continue;
                }
                for (j, out) in row.iter_mut().enumerate() {
                    *out += a * rhs.rows[k][j];
                }
            }
        }
        StochasticMatrix { dim: d, rows }
    }

    pub fn transpose(&self) -> StochasticMatrix {
        let d = self.dim;
        let rows = (0..d)
            .map(|i| (0..d).map(|j| self.rows[j][i]).collect())
            .collect();
        StochasticMatrix { dim: d, rows }
    }

    pub fn max_abs_difference(&self, other: &StochasticMatrix) -> f64 {
        self.rows
            .iter()
            .flatten()
            .zip(other.rows.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MajorizationCertificate {
    pub verdict: bool,
    /// Length of the first sorted prefix on which the source falls short.
    pub witness: Option<usize>,
}

fn sorted_desc(p: &[f64], d: usize) -> Vec<f64> {
    let mut v: Vec<f64> = p.to_vec();
    v.resize(d, 0.0);
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Checks `p ≻ q`, zero-padding the shorter vector.
pub fn majorizes(p: &[f64], q: &[f64]) -> MajorizationCertificate {
    let d = p.len().max(q.len());
    let (ps, qs) = (sorted_desc(p, d), sorted_desc(q, d));
    let (mut sp, mut sq) = (0.0, 0.0);
    for k in 0..d {
        sp += ps[k];
        sq += qs[k];
        if sp < sq - PREFIX_TOLERANCE {
            return MajorizationCertificate {
                verdict: false,
                witness: Some(k + 1),
            };
        }
    }
    MajorizationCertificate {
        verdict: true,
        witness: None,
    }
}

/// Decides a noisy-operation transition (trivial Hamiltonians on both sides).
pub fn check_noisy_transition(
    source: &IncoherentState,
    target: &IncoherentState,
) -> Result<TransitionVerdict> {
    if !source.hamiltonian().is_degenerate() || !target.hamiltonian().is_degenerate() {
        return Err(Error::NonDegenerate);
    }
    let p = source.expanded_probabilities();
    let q = target.expanded_probabilities();
    let cert = majorizes(&p, &q);
    Ok(match cert.witness {
        None => TransitionVerdict::feasible(),
        Some(k) => {
            let d = p.len().max(q.len());
            TransitionVerdict::infeasible(Certificate::Prefix {
                k,
                source_sum: sorted_desc(&p, d)[..k].iter().sum(),
                target_sum: sorted_desc(&q, d)[..k].iter().sum(),
            })
        }
    })
}

/// Two-coordinate averaging map `λ I + (1-λ) (i j)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TTransform {
    pub i: usize,
    pub j: usize,
    pub lambda: f64,
}

impl TTransform {
    pub fn matrix(&self, dim: usize) -> StochasticMatrix {
        let mut m = StochasticMatrix::identity(dim);
        let (i, j, l) = (self.i, self.j, self.lambda);
        m.rows[i][i] = l;
        m.rows[j][j] = l;
        m.rows[i][j] = 1.0 - l;
        m.rows[j][i] = 1.0 - l;
        m
    }
}

/// A construction `A = Q^T · T_m ⋯ T_1 · P` taking `p` to `q`, where `P`
/// sorts `p` and `Q` sorts `q`.
#[derive(Clone, Debug)]
pub struct TransformChain {
    pub dim: usize,
    pub source_order: Vec<usize>,
    pub target_order: Vec<usize>,
    /// T-transforms in application order, acting on sorted coordinates.
    pub transforms: Vec<TTransform>,
}

impl TransformChain {
    pub fn matrix(&self) -> StochasticMatrix {
        let sort_p = StochasticMatrix::permutation(&self.source_order);
        let sort_q = StochasticMatrix::permutation(&self.target_order);
        let mut m = sort_p;
        for t in &self.transforms {
            m = t.matrix(self.dim).compose(&m);
        }
        sort_q.transpose().compose(&m)
    }
}

fn descending_order(p: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..p.len()).collect();
    idx.sort_by(|&a, &b| p[b].total_cmp(&p[a]).then(a.cmp(&b)));
    idx
}

/// Hardy–Littlewood–Pólya chain of at most `d-1` T-transforms.
pub fn t_transform_chain(p: &[f64], q: &[f64]) -> Result<TransformChain> {
    let cert = majorizes(p, q);
    if let Some(k) = cert.witness {
        return Err(Error::NotMajorizing(k));
    }
    let d = p.len().max(q.len());
    let mut pp = p.to_vec();
    pp.resize(d, 0.0);
    let mut qq = q.to_vec();
    qq.resize(d, 0.0);
    let source_order = descending_order(&pp);
    let target_order = descending_order(&qq);
    let mut x: Vec<f64> = source_order.iter().map(|&i| pp[i]).collect();
    let y: Vec<f64> = target_order.iter().map(|&i| qq[i]).collect();

    const EPS: f64 = 1e-15;
    let mut transforms = Vec::new();
    for _ in 0..d {
        let Some(j) = (0..d).rev().find(|&j| x[j] > y[j] + EPS) else {
            break;
        };
        let Some(k) = (j + 1..d).find(|&k| x[k] < y[k] - EPS) else {
            break;
        };
        let gap = x[j] - x[k];
        let delta = (x[j] - y[j]).min(y[k] - x[k]);
        let lambda = (gap - delta) / gap;
        if delta == x[j] - y[j] {
            x[j] = y[j];
            x[k] += delta;
        } else {
            x[k] = y[k];
            x[j] -= delta;
        }
        transforms.push(TTransform { i: j, j: k, lambda });
    }
    Ok(TransformChain {
        dim: d,
        source_order,
        target_order,
        transforms,
    })
}

/// A bistochastic `A` with `A p = q`, given `p ≻ q`.
pub fn construct_bistochastic(p: &[f64], q: &[f64]) -> Result<StochasticMatrix> {
    Ok(t_transform_chain(p, q)?.matrix())
}

/// `perm[i]` is the column of the unit entry in row `i`.
pub type Permutation = Vec<usize>;

const ZERO_ENTRY: f64 = 1e-13;

/// Kuhn augmenting-path search on the support graph.
fn augment(
    row: usize,
    support: &[Vec<bool>],
    seen: &mut [bool],
    col_match: &mut [Option<usize>],
) -> bool {
    for col in 0..support.len() {
        if support[row][col] && !seen[col] {
            seen[col] = true;
            if col_match[col].is_none_or(|r| augment(r, support, seen, col_match)) {
                col_match[col] = Some(row);
                return true;
            }
        }
    }
    false
}

/// Perfect matching in `support`, optionally forcing `row -> col`.
fn perfect_matching(support: &[Vec<bool>], forced: Option<(usize, usize)>) -> Option<Permutation> {
    let d = support.len();
    let mut restricted = support.to_vec();
    if let Some((fr, fc)) = forced {
        for (r, row) in restricted.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                if (r == fr) != (c == fc) {
                    *cell = false;
                }
            }
        }
    }
    let mut col_match = vec![None; d];
    for row in 0..d {
        let mut seen = vec![false; d];
        if !augment(row, &restricted, &mut seen, &mut col_match) {
            return None;
        }
    }
    let mut perm = vec![0; d];
    for (col, r) in col_match.iter().enumerate() {
        perm[r.expect("complete matching")] = col;
    }
    Some(perm)
}

/// Greedy Birkhoff–von Neumann decomposition `A = Σ w_k P_k`.
///
/// Each step extracts a permutation through the current smallest positive
/// entry (lowest row, then lowest column, on ties) with that entry as weight.
pub fn birkhoff_decompose(a: &StochasticMatrix) -> Result<Vec<(f64, Permutation)>> {
    if !a.is_bistochastic(BISTOCHASTIC_TOLERANCE) {
        return Err(Error::NotBistochastic(format!(
            "row/column sums deviate by {:e}",
            a.bistochastic_defect()
        )));
    }
    let d = a.dim();
    let mut residual: Vec<Vec<f64>> = a
        .rows()
        .iter()
        .map(|r| r.iter().map(|&x| if x > ZERO_ENTRY { x } else { 0.0 }).collect())
        .collect();
    let mut terms = Vec::new();
    let max_terms = d * d + 1;
    while terms.len() < max_terms {
        let mut min: Option<(usize, usize, f64)> = None;
        for (i, row) in residual.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                if x > 0.0 && min.is_none_or(|(_, _, m)| x < m) {
                    min = Some((i, j, x));
                }
            }
        }
        let Some((mi, mj, _)) = min else {
            break;
        };
        let support: Vec<Vec<bool>> = residual
            .iter()
            .map(|r| r.iter().map(|&x| x > 0.0).collect())
            .collect();
        let Some(perm) = perfect_matching(&support, Some((mi, mj)))
            .or_else(|| perfect_matching(&support, None))
        else {
            break;
        };
        let weight = perm
            .iter()
            .enumerate()
            .map(|(i, &j)| residual[i][j])
            .fold(f64::INFINITY, f64::min);
        for (i, &j) in perm.iter().enumerate() {
            let v = residual[i][j] - weight;
            residual[i][j] = if v > ZERO_ENTRY { v } else { 0.0 };
        }
        terms.push((weight, perm));
    }
    let leftover: f64 = residual.iter().flatten().sum();
    if leftover > BISTOCHASTIC_TOLERANCE {
        return Err(Error::NotBistochastic(format!(
            "decomposition left residual mass {leftover:e}"
        )));
    }
    Ok(terms)
}

/// `Σ w_k P_k`.
pub fn recompose(terms: &[(f64, Permutation)], dim: usize) -> StochasticMatrix {
    let mut rows = vec![vec![0.0; dim]; dim];
    for (w, perm) in terms {
        for (i, &j) in perm.iter().enumerate() {
            rows[i][j] += w;
        }
    }
    StochasticMatrix::from_rows_unchecked(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::Hamiltonian;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn majorization_examples() {
        assert!(majorizes(&[1.0, 0.0], &[0.5, 0.5]).verdict);
        let c = majorizes(&[0.5, 0.5], &[1.0, 0.0]);
        assert!(!c.verdict);
        assert_eq!(c.witness, Some(1));
        assert!(majorizes(&[0.6, 0.4], &[0.5, 0.3, 0.2]).verdict);
        assert!(!majorizes(&[0.5, 0.3, 0.2], &[0.6, 0.4]).verdict);
    }

    #[test]
    fn noisy_transition_examples() {
        let h2 = Hamiltonian::degenerate(2).unwrap();
        let s = |p: &[f64]| IncoherentState::new(&h2, p).unwrap();
        assert!(check_noisy_transition(&s(&[0.6, 0.4]), &s(&[0.6, 0.4])).unwrap().feasible);
        assert!(check_noisy_transition(&s(&[1.0, 0.0]), &s(&[0.7, 0.3])).unwrap().feasible);
        let v = check_noisy_transition(&s(&[0.6, 0.4]), &s(&[0.8, 0.2])).unwrap();
        assert!(!v.feasible);
        match v.certificate {
            Some(Certificate::Prefix { k, source_sum, target_sum }) => {
                assert_eq!(k, 1);
                assert!(source_sum < target_sum);
            }
            other => panic!("unexpected certificate {other:?}"),
        }
    }

    #[test]
    fn noisy_transition_rejects_energy_structure() {
        let h = Hamiltonian::new(&[0.0, 1.0]).unwrap();
        let s = IncoherentState::new(&h, &[0.5, 0.5]).unwrap();
        assert!(matches!(check_noisy_transition(&s, &s), Err(Error::NonDegenerate)));
    }

    #[test]
    fn construction_of_equal_vectors_is_identity() {
        let p = [0.1, 0.5, 0.4];
        let a = construct_bistochastic(&p, &p).unwrap();
        assert_eq!(a, StochasticMatrix::identity(3));
    }

    #[test]
    fn single_t_transform() {
        let chain = t_transform_chain(&[0.7, 0.3], &[0.6, 0.4]).unwrap();
        assert_eq!(chain.transforms.len(), 1);
        let a = chain.matrix();
        let expected = [[0.75, 0.25], [0.25, 0.75]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((a.get(i, j) - expected[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pure_to_uniform_takes_two_transforms() {
        let p = [1.0, 0.0, 0.0];
        let q = [1.0 / 3.0; 3];
        let chain = t_transform_chain(&p, &q).unwrap();
        assert_eq!(chain.transforms.len(), 2);
        let a = chain.matrix();
        assert!(a.is_bistochastic(1e-12));
        assert!(close(&a.apply(&p), &q, 1e-12));
    }

    #[test]
    fn construction_handles_unsorted_and_padded_inputs() {
        let p = [0.1, 0.6, 0.3];
        let q = [0.3, 0.2, 0.25, 0.25];
        assert!(majorizes(&p, &q).verdict);
        let a = construct_bistochastic(&p, &q).unwrap();
        assert_eq!(a.dim(), 4);
        assert!(a.is_bistochastic(1e-12));
        assert!(close(&a.apply(&[0.1, 0.6, 0.3, 0.0]), &q, 1e-12));
    }

    #[test]
    fn construction_rejects_non_majorizing_pair() {
        assert!(matches!(
            construct_bistochastic(&[0.5, 0.5], &[0.9, 0.1]),
            Err(Error::NotMajorizing(1))
        ));
    }

    #[test]
    fn birkhoff_of_permutation_is_single_term() {
        let perm = vec![2, 0, 3, 1];
        let terms = birkhoff_decompose(&StochasticMatrix::permutation(&perm)).unwrap();
        assert_eq!(terms, vec![(1.0, perm)]);
    }

    #[test]
    fn birkhoff_of_uniform_two_by_two() {
        let a = StochasticMatrix::from_rows(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let terms = birkhoff_decompose(&a).unwrap();
        assert_eq!(terms.len(), 2);
        assert_eq!(terms[0], (0.5, vec![0, 1]));
        assert_eq!(terms[1], (0.5, vec![1, 0]));
    }

    #[test]
    fn birkhoff_round_trip_on_five_permutation_mix() {
        let perms = [
            vec![0, 1, 2, 3],
            vec![1, 0, 3, 2],
            vec![3, 2, 1, 0],
            vec![1, 2, 3, 0],
            vec![2, 3, 0, 1],
        ];
        let weights = [0.1, 0.25, 0.3, 0.15, 0.2];
        let terms: Vec<_> = weights.iter().copied().zip(perms.iter().cloned()).collect();
        let a = recompose(&terms, 4);
        let decomposed = birkhoff_decompose(&a).unwrap();
        assert!(decomposed.len() <= 10);
        assert!(recompose(&decomposed, 4).max_abs_difference(&a) < 1e-9);
        let total: f64 = decomposed.iter().map(|(w, _)| w).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn birkhoff_rejects_column_stochastic_only() {
        let a = StochasticMatrix::from_rows(vec![vec![1.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(birkhoff_decompose(&a), Err(Error::NotBistochastic(_))));
    }
}
