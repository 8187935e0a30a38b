use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::order::StochasticMatrix;

/// Deterministic random source; `(seed, stream)` pins every draw.
#[derive(Clone, Debug)]
pub struct SeededSampler {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl SeededSampler {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random()
    }

    /// Uniform on `[lo, hi)`.
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform on `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn permutation(&mut self, d: usize) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..d).collect();
        perm.shuffle(&mut self.rng);
        perm
    }

    /// Uniform point of the probability simplex (flat Dirichlet).
    pub fn simplex(&mut self, d: usize) -> Vec<f64> {
        let w: Vec<f64> = (0..d).map(|_| self.rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = w.iter().sum();
        w.into_iter().map(|x| x / total).collect()
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// Random bistochastic matrix: a Dirichlet-weighted mixture of at most `3d` permutations.
pub fn sample_bistochastic(d: usize, sampler: &mut SeededSampler) -> Result<StochasticMatrix> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    if d == 1 {
        return Ok(StochasticMatrix::identity(1));
    }
    let k = 1 + sampler.index(3 * d);
    let weights = sampler.simplex(k);
    let mut rows = vec![vec![0.0; d]; d];
    for w in weights {
        let perm = sampler.permutation(d);
        for (i, &j) in perm.iter().enumerate() {
            rows[i][j] += w;
        }
    }
    Ok(StochasticMatrix::from_rows_unchecked(rows))
}

/// Product of `steps` random two-level partial swaps, each with fixed point `q`.
///
/// On levels `(i, j)` a fraction `a` of the population of `i` moves to `j`
/// and a fraction `b = a q_i / q_j` moves back, with `a = t min(1, q_j / q_i)`
/// for `t` uniform. This keeps `q` fixed exactly.
pub fn sample_gibbs_stochastic(
    q: &[f64],
    sampler: &mut SeededSampler,
    steps: usize,
) -> Result<StochasticMatrix> {
    let d = q.len();
    if d == 0 || q.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::InvalidParameter("fixed point must be strictly positive".into()));
    }
    let mut g = StochasticMatrix::identity(d);
    if d == 1 {
        return Ok(g);
    }
    for _ in 0..steps {
        let i = sampler.index(d);
        let j = (i + 1 + sampler.index(d - 1)) % d;
        let t = sampler.uniform();
        let a = t * (q[j] / q[i]).min(1.0);
        let b = a * q[i] / q[j];
        let mut rows = StochasticMatrix::identity(d).rows().to_vec();
        rows[i][i] = 1.0 - a;
        rows[j][i] = a;
        rows[j][j] = 1.0 - b;
        rows[i][j] = b;
        g = StochasticMatrix::from_rows_unchecked(rows).compose(&g);
    }
    Ok(g)
}
