//! Local-search correlation clustering.
//!
//! Minimizes the max-correlation cost by single-object relocation: each object
//! moves to the existing cluster (or a fresh singleton) with the lowest
//! assignment cost. The number of clusters is an output.

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{mc_cost, Clustering, SimilarityState};
use crate::par::*;
use crate::rng;

/// Moves must improve the objective by more than this to be taken.
const MOVE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverParams {
    pub max_sweeps: usize,
    /// Extra runs from random partitions on top of the initial one.
    pub restarts: usize,
    pub rng_seed: u64,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            max_sweeps: 200,
            restarts: 0,
            rng_seed: 0,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_sweeps == 0 {
            return Err(Error::invalid("max_sweeps must be at least 1"));
        }
        Ok(())
    }
}

/// Cost of placing each object in each cluster: entry `(u, k)` is
/// `-sum_{v != u, c_v = k} S_uv`.
pub fn assignment_costs(s: &SimilarityState, c: &Clustering) -> Result<Array2<f64>> {
    let n = s.n();
    if c.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: c.n(),
        });
    }
    let mut costs = Array2::zeros((n, c.k()));
    for u in 0..n {
        for v in 0..n {
            if v != u {
                costs[[u, c.label(v)]] -= s.get(u, v);
            }
        }
    }
    Ok(costs)
}

/// Whether no single relocation (to another cluster or a new singleton)
/// lowers the max-correlation cost by more than `tol`.
pub fn is_locally_optimal(s: &SimilarityState, c: &Clustering, tol: f64) -> Result<bool> {
    let costs = assignment_costs(s, c)?;
    let sizes = c.sizes();
    for u in 0..s.n() {
        let cur = costs[[u, c.label(u)]];
        let best_existing = costs.row(u).iter().cloned().fold(f64::INFINITY, f64::min);
        if best_existing < cur - tol {
            return Ok(false);
        }
        if sizes[c.label(u)] > 1 && 0.0 < cur - tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Runs local search from `init` (all singletons when `None`) plus
/// `params.restarts` random starts, returning the best local optimum found.
pub fn local_search_cc(s: &SimilarityState, init: Option<&Clustering>, params: &SolverParams) -> Result<Clustering> {
    params.validate()?;
    let n = s.n();
    if let Some(c) = init {
        if c.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: c.n(),
            });
        }
    }

    let runs: Vec<Clustering> = (0..=params.restarts)
        .into_par_iter()
        .map(|run| {
            let mut rng = rng::seeded(rng::derive_seed(params.rng_seed, &[run as u64]));
            let start = if run == 0 {
                init.map_or_else(|| (0..n).collect(), |c| c.labels().to_vec())
            } else {
                let k = (n as f64).sqrt().ceil().max(1.0) as usize;
                (0..n).map(|_| rng.random_range(0..k)).collect()
            };
            descend(s, start, params.max_sweeps, &mut rng)
        })
        .collect();

    let mut best: Option<(f64, Clustering)> = None;
    for c in runs {
        let cost = mc_cost(&c, s)?;
        if best.as_ref().is_none_or(|(b, _)| cost < *b - MOVE_TOL) {
            best = Some((cost, c));
        }
    }
    Ok(best.map(|(_, c)| c).unwrap_or_else(|| Clustering::singletons(n)))
}

fn descend(s: &SimilarityState, start: Vec<usize>, max_sweeps: usize, rng: &mut rng::Rng) -> Clustering {
    let n = s.n();
    let canon = Clustering::new(&start);
    let mut labels = canon.labels().to_vec();
    let mut sizes = canon.sizes();
    let mut order: Vec<usize> = (0..n).collect();
    let mut costs: Vec<f64> = Vec::with_capacity(sizes.len() + 1);

    for _ in 0..max_sweeps {
        order.shuffle(rng);
        let mut moves = 0usize;
        for &u in &order {
            costs.clear();
            costs.resize(sizes.len(), 0.0);
            let row = s.matrix().row(u);
            for (v, &x) in row.iter().enumerate() {
                if v != u {
                    costs[labels[v]] -= x;
                }
            }
            let cur = labels[u];
            let mut best = cur;
            let mut best_cost = costs[cur];
            for (k, &cost) in costs.iter().enumerate() {
                if sizes[k] > 0 && cost < best_cost - MOVE_TOL {
                    best = k;
                    best_cost = cost;
                }
            }
            if sizes[cur] > 1 && 0.0 < best_cost - MOVE_TOL {
                // a fresh singleton beats every existing cluster
                best = sizes.len();
                sizes.push(0);
            }
            if best != cur {
                sizes[cur] -= 1;
                sizes[best] += 1;
                labels[u] = best;
                moves += 1;
            }
        }
        let canon = Clustering::new(&labels);
        labels.copy_from_slice(canon.labels());
        sizes = canon.sizes();
        if moves == 0 {
            break;
        }
    }
    Clustering::new(&labels)
}
