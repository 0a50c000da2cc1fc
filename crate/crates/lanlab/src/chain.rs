//! Exact finite-state parametric Markov chains.
//!
//! Everything the likelihood analysis needs — transition probabilities,
//! their first two parameter derivatives, scores, Fisher information,
//! stationary distribution — is available in closed form here, which makes
//! these chains the desk-scale reference models for the statistical
//! machinery exercised on the SDE by Monte Carlo.

use std::sync::Arc;

use rand::Rng;

use crate::{Error, Result};

pub type EntryFn = Arc<dyn Fn(f64, usize, usize) -> f64 + Send + Sync>;

#[derive(Clone)]
enum ChainKind {
    /// `P(theta) = [[1-theta, theta], [theta, 1-theta]]`, `theta in (0,1)`.
    TwoStateSymmetric,
    /// Rows are softmax of affine scores `a_ij theta + b_ij`; every entry
    /// stays positive and smooth in theta.
    Softmax {
        weights: Vec<Vec<f64>>,
        offsets: Vec<Vec<f64>>,
    },
    /// User-supplied entry evaluators `(theta, i, j)` for `p`, `dp/dtheta`
    /// and `d2p/dtheta2`.
    Custom {
        p: EntryFn,
        dp: EntryFn,
        d2p: EntryFn,
    },
}

/// Finite-state chain with analytic parameter derivatives of the
/// transition matrix. Immutable and thread-safe.
#[derive(Clone)]
pub struct FiniteChainModel {
    n_states: usize,
    kind: ChainKind,
    theta_interval: (f64, f64),
}

impl std::fmt::Debug for FiniteChainModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match &self.kind {
            ChainKind::TwoStateSymmetric => "two_state_symmetric",
            ChainKind::Softmax { .. } => "softmax",
            ChainKind::Custom { .. } => "custom",
        };
        f.debug_struct("FiniteChainModel")
            .field("kind", &name)
            .field("n_states", &self.n_states)
            .finish()
    }
}

impl FiniteChainModel {
    pub fn two_state_symmetric() -> Self {
        Self {
            n_states: 2,
            kind: ChainKind::TwoStateSymmetric,
            theta_interval: (0.0, 1.0),
        }
    }

    /// Softmax-parameterized rows; `weights[i][j]` multiplies theta in the
    /// score of the `i -> j` entry, `offsets[i][j]` is the constant part.
    pub fn softmax(
        weights: Vec<Vec<f64>>,
        offsets: Vec<Vec<f64>>,
        theta_interval: (f64, f64),
    ) -> Result<Self> {
        let s = weights.len();
        if s == 0
            || offsets.len() != s
            || weights.iter().any(|r| r.len() != s)
            || offsets.iter().any(|r| r.len() != s)
        {
            return Err(Error::InvalidConfig(
                "softmax chain needs square score matrices".into(),
            ));
        }
        Ok(Self {
            n_states: s,
            kind: ChainKind::Softmax { weights, offsets },
            theta_interval,
        })
    }

    /// The shipped 3-state softmax chain.
    pub fn softmax3() -> Self {
        Self::softmax(
            vec![
                vec![1.0, 0.0, -1.0],
                vec![0.0, 1.0, 0.0],
                vec![-1.0, 0.0, 1.0],
            ],
            vec![
                vec![0.0, 0.5, 0.0],
                vec![0.5, 0.0, 0.5],
                vec![0.0, 0.5, 0.0],
            ],
            (-2.0, 2.0),
        )
        .expect("square matrices")
    }

    pub fn custom(
        n_states: usize,
        p: EntryFn,
        dp: EntryFn,
        d2p: EntryFn,
        theta_interval: (f64, f64),
    ) -> Self {
        Self {
            n_states,
            kind: ChainKind::Custom { p, dp, d2p },
            theta_interval,
        }
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn theta_interval(&self) -> (f64, f64) {
        self.theta_interval
    }

    pub fn contains_theta(&self, theta: f64) -> bool {
        self.theta_interval.0 < theta && theta < self.theta_interval.1
    }

    fn softmax_row(weights: &[f64], offsets: &[f64], theta: f64) -> Vec<f64> {
        let scores: Vec<f64> = weights
            .iter()
            .zip(offsets)
            .map(|(a, b)| a * theta + b)
            .collect();
        let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
        let total: f64 = exps.iter().sum();
        exps.into_iter().map(|e| e / total).collect()
    }

    /// Transition probability `p_{ij}(theta)`.
    pub fn prob(&self, theta: f64, i: usize, j: usize) -> f64 {
        match &self.kind {
            ChainKind::TwoStateSymmetric => {
                if i == j {
                    1.0 - theta
                } else {
                    theta
                }
            }
            ChainKind::Softmax { weights, offsets } => {
                Self::softmax_row(&weights[i], &offsets[i], theta)[j]
            }
            ChainKind::Custom { p, .. } => p(theta, i, j),
        }
    }

    /// `d p_{ij} / d theta`.
    pub fn dprob(&self, theta: f64, i: usize, j: usize) -> f64 {
        match &self.kind {
            ChainKind::TwoStateSymmetric => {
                if i == j {
                    -1.0
                } else {
                    1.0
                }
            }
            ChainKind::Softmax { weights, offsets } => {
                let row = Self::softmax_row(&weights[i], &offsets[i], theta);
                let mean_w: f64 = row.iter().zip(&weights[i]).map(|(p, a)| p * a).sum();
                row[j] * (weights[i][j] - mean_w)
            }
            ChainKind::Custom { dp, .. } => dp(theta, i, j),
        }
    }

    /// `d^2 p_{ij} / d theta^2`.
    pub fn d2prob(&self, theta: f64, i: usize, j: usize) -> f64 {
        match &self.kind {
            ChainKind::TwoStateSymmetric => 0.0,
            ChainKind::Softmax { weights, offsets } => {
                let row = Self::softmax_row(&weights[i], &offsets[i], theta);
                let mean_w: f64 = row.iter().zip(&weights[i]).map(|(p, a)| p * a).sum();
                let var_w: f64 = row
                    .iter()
                    .zip(&weights[i])
                    .map(|(p, a)| p * (a - mean_w) * (a - mean_w))
                    .sum();
                let c = weights[i][j] - mean_w;
                row[j] * (c * c - var_w)
            }
            ChainKind::Custom { d2p, .. } => d2p(theta, i, j),
        }
    }

    /// Full transition matrix at `theta`.
    pub fn matrix(&self, theta: f64) -> Vec<Vec<f64>> {
        (0..self.n_states)
            .map(|i| (0..self.n_states).map(|j| self.prob(theta, i, j)).collect())
            .collect()
    }

    /// Row-stochasticity and derivative-row-sum residuals over a theta grid:
    /// `(max |row sum - 1|, max |entry < 0 deficit|, max |d-row sum|)`.
    pub fn structure_residuals(&self, theta_grid: &[f64]) -> (f64, f64, f64) {
        let mut row_sum = 0.0f64;
        let mut negativity = 0.0f64;
        let mut drow_sum = 0.0f64;
        for &theta in theta_grid {
            for i in 0..self.n_states {
                let mut s = 0.0;
                let mut ds = 0.0;
                for j in 0..self.n_states {
                    let p = self.prob(theta, i, j);
                    s += p;
                    ds += self.dprob(theta, i, j);
                    if p < 0.0 {
                        negativity = negativity.max(-p);
                    }
                }
                row_sum = row_sum.max((s - 1.0).abs());
                drow_sum = drow_sum.max(ds.abs());
            }
        }
        (row_sum, negativity, drow_sum)
    }
}

/// Score `g(theta; i, j) = d/dtheta log p_{ij}(theta)`.
pub fn exact_score(chain: &FiniteChainModel, theta: f64, i: usize, j: usize) -> Result<f64> {
    let p = chain.prob(theta, i, j);
    if p <= 0.0 {
        return Err(Error::ScoreUndefined { y: j as f64 });
    }
    Ok(chain.dprob(theta, i, j) / p)
}

/// Square-root derivative `q = dp / (2 sqrt(p))`.
pub fn exact_sqrt_derivative(
    chain: &FiniteChainModel,
    theta: f64,
    i: usize,
    j: usize,
) -> Result<f64> {
    let p = chain.prob(theta, i, j);
    if p < 0.0 {
        return Err(Error::ScoreUndefined { y: j as f64 });
    }
    if p == 0.0 {
        // q is only used inside integrals against p; zero-probability
        // entries carry zero q for a chain whose support does not move
        return Ok(0.0);
    }
    Ok(chain.dprob(theta, i, j) / (2.0 * p.sqrt()))
}

/// Fisher information `I_n = sum_k E[g^2(X_{k-1}, X_k)]` from `X_0 = i0`,
/// by propagating the marginal distribution (dynamic programming).
pub fn exact_fisher_info(chain: &FiniteChainModel, theta0: f64, i0: usize, n: usize) -> f64 {
    let s = chain.n_states;
    let mut marginal = vec![0.0; s];
    marginal[i0] = 1.0;
    // per-state expected squared score
    let info_from: Vec<f64> = (0..s)
        .map(|i| {
            (0..s)
                .map(|j| {
                    let p = chain.prob(theta0, i, j);
                    if p > 0.0 {
                        let dp = chain.dprob(theta0, i, j);
                        dp * dp / p
                    } else {
                        0.0
                    }
                })
                .sum()
        })
        .collect();
    let mut total = 0.0;
    for _ in 1..=n {
        total += marginal
            .iter()
            .zip(&info_from)
            .map(|(m, f)| m * f)
            .sum::<f64>();
        let mut next = vec![0.0; s];
        for i in 0..s {
            if marginal[i] == 0.0 {
                continue;
            }
            for (j, nj) in next.iter_mut().enumerate() {
                *nj += marginal[i] * chain.prob(theta0, i, j);
            }
        }
        marginal = next;
    }
    total
}

fn irreducible(chain: &FiniteChainModel, theta: f64) -> bool {
    let s = chain.n_states;
    // boolean reachability closure over positive entries
    let mut reach = vec![vec![false; s]; s];
    for (i, row) in reach.iter_mut().enumerate() {
        for (j, r) in row.iter_mut().enumerate() {
            *r = i == j || chain.prob(theta, i, j) > 0.0;
        }
    }
    for k in 0..s {
        for i in 0..s {
            for j in 0..s {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    reach.iter().all(|row| row.iter().all(|&r| r))
}

/// Stationary distribution by damped power iteration (tolerance 1e-13).
/// The damping `(P + I)/2` preserves the stationary distribution and makes
/// the iteration converge for any irreducible chain.
pub fn stationary_distribution(chain: &FiniteChainModel, theta: f64) -> Result<Vec<f64>> {
    if !irreducible(chain, theta) {
        return Err(Error::NoUniqueInvariant(format!(
            "chain is reducible at theta = {theta}"
        )));
    }
    let s = chain.n_states;
    let mut pi = vec![1.0 / s as f64; s];
    for _ in 0..200_000 {
        let mut next = vec![0.0; s];
        for i in 0..s {
            for (j, nj) in next.iter_mut().enumerate() {
                *nj += pi[i] * chain.prob(theta, i, j);
            }
        }
        for (nj, &old) in next.iter_mut().zip(&pi) {
            *nj = 0.5 * (*nj + old);
        }
        let total: f64 = next.iter().sum();
        for nj in next.iter_mut() {
            *nj /= total;
        }
        let delta = next
            .iter()
            .zip(&pi)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        pi = next;
        if delta < 1e-13 {
            return Ok(pi);
        }
    }
    Err(Error::NoUniqueInvariant(
        "power iteration did not converge".into(),
    ))
}

/// Stationary expected squared score
/// `sigma^2 = sum_i pi_i sum_j g^2(i,j) p_{ij}`.
pub fn exact_sigma2(chain: &FiniteChainModel, theta0: f64) -> Result<f64> {
    let pi = stationary_distribution(chain, theta0)?;
    let s = chain.n_states;
    let mut total = 0.0;
    for (i, &w) in pi.iter().enumerate().take(s) {
        for j in 0..s {
            let p = chain.prob(theta0, i, j);
            if p > 0.0 {
                let dp = chain.dprob(theta0, i, j);
                total += w * dp * dp / p;
            }
        }
    }
    Ok(total)
}

/// Categorical sampling of `n` transitions from `i0`; returns the state
/// sequence of length `n + 1`.
pub fn sample_chain<R: Rng + ?Sized>(
    chain: &FiniteChainModel,
    theta: f64,
    i0: usize,
    n: usize,
    rng: &mut R,
) -> Vec<usize> {
    let s = chain.n_states;
    let mut states = Vec::with_capacity(n + 1);
    states.push(i0);
    let mut current = i0;
    for _ in 0..n {
        let u = rng.gen::<f64>();
        let mut acc = 0.0;
        let mut next = s - 1;
        for j in 0..s {
            acc += chain.prob(theta, current, j);
            if u < acc {
                next = j;
                break;
            }
        }
        current = next;
        states.push(current);
    }
    states
}
