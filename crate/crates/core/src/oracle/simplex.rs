//! Phase-one simplex for `{G ≥ 0 column-stochastic, Gq = q, Gp = p'}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::order::StochasticMatrix;

/// Pivot and residual tolerance.
pub const LP_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpOutcome {
    pub feasible: bool,
    /// A realizing matrix when feasible.
    pub witness: Option<StochasticMatrix>,
}

struct Tableau {
    /// `m` constraint rows of length `n + 1`, the last entry is the right-hand side.
    rows: Vec<Vec<f64>>,
    /// Reduced costs of length `n + 1`; the last entry is minus the objective.
    cost: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c];
        for x in self.rows[r].iter_mut() {
            *x /= piv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= f * p;
                }
            }
        }
        let f = self.cost[c];
        if f != 0.0 {
            for (x, p) in self.cost.iter_mut().zip(&pivot_row) {
                *x -= f * p;
            }
        }
        self.basis[r] = c;
    }

    /// Runs Bland's rule to optimality.
    fn solve(&mut self, max_iter: usize) -> Result<()> {
        let n = self.cost.len() - 1;
        for _ in 0..max_iter {
            let Some(c) = (0..n).find(|&j| self.cost[j] < -LP_TOLERANCE) else {
                return Ok(());
            };
            let mut best: Option<(f64, usize)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c] > LP_TOLERANCE {
                    let ratio = row[n] / row[c];
                    let better = match best {
                        None => true,
                        Some((b, k)) => {
                            ratio < b - 1e-15 || (ratio <= b + 1e-15 && self.basis[i] < self.basis[k])
                        }
                    };
                    if better {
                        best = Some((ratio, i));
                    }
                }
            }
            let Some((_, r)) = best else {
                return Err(Error::Degenerate("phase-one objective is unbounded".into()));
            };
            self.pivot(r, c);
        }
        Err(Error::Degenerate("simplex iteration limit reached".into()))
    }
}

/// Decides whether some column-stochastic `G` maps `q ↦ q` and `p ↦ p'`.
pub fn feasibility_lp(p: &[f64], q: &[f64], target: &[f64]) -> Result<LpOutcome> {
    let d = p.len();
    if d == 0 || q.len() != d || target.len() != d {
        return Err(Error::InvalidParameter("vectors must share a nonzero dimension".into()));
    }
    if p.iter().chain(q).chain(target).any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::Degenerate("entries must be finite and nonnegative".into()));
    }
    // variable G_kl sits at column k * d + l
    let nv = d * d;
    let mut eqs: Vec<(Vec<f64>, f64)> = Vec::with_capacity(3 * d);
    for l in 0..d {
        let mut a = vec![0.0; nv];
        for k in 0..d {
            a[k * d + l] = 1.0;
        }
        eqs.push((a, 1.0));
    }
    for (v, rhs) in [(q, q), (p, target)] {
        for k in 0..d {
            let mut a = vec![0.0; nv];
            a[k * d..(k + 1) * d].copy_from_slice(v);
            eqs.push((a, rhs[k]));
        }
    }
    let m = eqs.len();
    let n = nv + m;
    let mut rows = Vec::with_capacity(m);
    let mut cost = vec![0.0; n + 1];
    for (i, (a, b)) in eqs.into_iter().enumerate() {
        let mut row = a;
        row.resize(n + 1, 0.0);
        row[nv + i] = 1.0;
        row[n] = b;
        for j in 0..nv {
            cost[j] -= row[j];
        }
        cost[n] -= b;
        rows.push(row);
    }
    let mut t = Tableau {
        rows,
        cost,
        basis: (nv..n).collect(),
    };
    t.solve(10_000)?;
    let infeasibility = -t.cost[n];
    if infeasibility > LP_TOLERANCE {
        return Ok(LpOutcome {
            feasible: false,
            witness: None,
        });
    }
    let mut g = vec![vec![0.0; d]; d];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < nv {
            g[b / d][b % d] = t.rows[i][n].max(0.0);
        }
    }
    Ok(LpOutcome {
        feasible: true,
        witness: Some(StochasticMatrix::from_rows_unchecked(g)),
    })
}
