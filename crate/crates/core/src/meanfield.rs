//! Mean-field approximation of the Gibbs distribution over clusterings and
//! the pairwise entropy acquisition built on it.

use ndarray::{Array2, ArrayView2, Axis};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SimilarityState;
use crate::par::*;
use crate::rng;

const PROB_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldParams {
    pub beta: f64,
    pub k: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub damping: f64,
    pub rng_seed: u64,
}

impl Default for MeanFieldParams {
    fn default() -> Self {
        MeanFieldParams {
            beta: 1.0,
            k: 2,
            max_iters: 100,
            tol: 1e-6,
            damping: 0.5,
            rng_seed: 0,
        }
    }
}

impl MeanFieldParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::invalid(format!("beta must be positive, got {}", self.beta)));
        }
        if self.k < 2 {
            return Err(Error::invalid(format!("k must be at least 2, got {}", self.k)));
        }
        if !(0.0..1.0).contains(&self.damping) {
            return Err(Error::invalid(format!(
                "damping must lie in [0, 1), got {}",
                self.damping
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters must be at least 1"));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::invalid("tol must be nonnegative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanFieldPosterior {
    /// Row-stochastic membership probabilities, N x K.
    pub q: Array2<f64>,
    /// Assignment costs, N x K, with `q = softmax(-beta * m)` row-wise.
    pub m: Array2<f64>,
    pub converged: bool,
    pub iters_used: usize,
}

/// Row-wise `softmax(-beta * m)`, shifted by the row minimum for stability.
pub fn softmax_neg(m: ArrayView2<f64>, beta: f64) -> Array2<f64> {
    let mut q = m.to_owned();
    for mut row in q.axis_iter_mut(Axis(0)) {
        let lo = row.iter().cloned().fold(f64::INFINITY, f64::min);
        row.mapv_inplace(|x| (-beta * (x - lo)).exp());
        let z = row.sum();
        row.mapv_inplace(|x| x / z);
    }
    q
}

/// Runs the synchronous updates from a random start.
pub fn mean_field(s: &SimilarityState, params: &MeanFieldParams) -> Result<MeanFieldPosterior> {
    mean_field_from(s, params, None)
}

/// Like [`mean_field`], but starts from the given cost matrix when present.
/// Its column count is adapted to `params.k` by truncation or by padding with
/// small random entries.
pub fn mean_field_from(
    s: &SimilarityState,
    params: &MeanFieldParams,
    init_m: Option<&Array2<f64>>,
) -> Result<MeanFieldPosterior> {
    params.validate()?;
    let n = s.n();
    let sm = s.matrix();
    if sm.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("similarity matrix has non-finite entries"));
    }
    let k = params.k;
    let mut rng = rng::seeded(params.rng_seed);
    let mut m = Array2::from_shape_fn((n, k), |_| rng.random_range(-0.01..=0.01));
    if let Some(init) = init_m {
        if init.nrows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: init.nrows(),
            });
        }
        let cols = init.ncols().min(k);
        m.slice_mut(ndarray::s![.., ..cols])
            .assign(&init.slice(ndarray::s![.., ..cols]));
    }

    let mut q = softmax_neg(m.view(), params.beta);
    m = -sm.dot(&q);
    let mut converged = false;
    let mut iters_used = 1;
    while iters_used < params.max_iters {
        let update = softmax_neg(m.view(), params.beta);
        let next = &update * (1.0 - params.damping) + &q * params.damping;
        let delta = (&next - &q).iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        q = next;
        m = -sm.dot(&q);
        iters_used += 1;
        if delta <= params.tol {
            converged = true;
            break;
        }
    }
    // Report the undamped update so that q and m are mutually consistent.
    let q = softmax_neg(m.view(), params.beta);
    Ok(MeanFieldPosterior {
        q,
        m,
        converged,
        iters_used,
    })
}

/// Max-norm residual of the mean-field fixed-point equation at `q`.
pub fn fixed_point_residual(s: &SimilarityState, q: &Array2<f64>, beta: f64) -> f64 {
    let m = -s.matrix().dot(q);
    let update = softmax_neg(m.view(), beta);
    (&update - q).iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Approximate probability that `u` and `v` share a cluster.
pub fn same_cluster_prob(q: &Array2<f64>, u: usize, v: usize) -> Result<f64> {
    let n = q.nrows();
    for index in [u, v] {
        if index >= n {
            return Err(Error::IndexOutOfRange { index, n });
        }
    }
    if u == v {
        return Err(Error::invalid("same_cluster_prob needs two distinct objects"));
    }
    Ok(q.row(u).dot(&q.row(v)).clamp(0.0, 1.0))
}

#[inline]
fn binary_entropy(p: f64) -> f64 {
    let p = p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
    -p * p.ln() - (1.0 - p) * (1.0 - p).ln()
}

/// Binary entropy in nats of a same-cluster probability.
pub fn entropy_score(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("probability {p} outside [0, 1]")));
    }
    Ok(binary_entropy(p))
}

/// Symmetric matrix of pairwise entropies with a zero diagonal.
pub fn entropy_matrix(q: &Array2<f64>) -> Array2<f64> {
    let n = q.nrows();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|u| {
            let qu = q.row(u);
            (u + 1..n)
                .map(|v| binary_entropy(qu.dot(&q.row(v)).clamp(0.0, 1.0)))
                .collect()
        })
        .collect();
    let mut h = Array2::zeros((n, n));
    for (u, row) in rows.into_iter().enumerate() {
        for (offset, x) in row.into_iter().enumerate() {
            let v = u + 1 + offset;
            h[[u, v]] = x;
            h[[v, u]] = x;
        }
    }
    h
}
