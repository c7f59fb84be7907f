//! Brute-force reference computations used only by tests. Nothing here calls
//! into the library's optimized paths.
#![allow(dead_code)]

/// Every partition of `n` objects as a restricted-growth label string.
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, max: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let next_max = if prefix.is_empty() { 0 } else { max + 1 };
        for label in 0..=next_max {
            prefix.push(label);
            extend(prefix, max.max(label), n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
        return out;
    }
    extend(&mut Vec::with_capacity(n), 0, n, &mut out);
    out
}

/// Max-correlation cost from a dense row-major matrix, summing pairs directly.
pub fn mc_cost_dense(s: &[Vec<f64>], labels: &[usize]) -> f64 {
    let n = labels.len();
    let mut total = 0.0;
    for u in 0..n {
        for v in u + 1..n {
            if labels[u] == labels[v] {
                total -= s[u][v];
            }
        }
    }
    total
}

/// Correlation clustering cost by direct pair enumeration.
pub fn cc_cost_dense(s: &[Vec<f64>], labels: &[usize]) -> f64 {
    let n = labels.len();
    let mut total = 0.0;
    for u in 0..n {
        for v in u + 1..n {
            let x = s[u][v];
            let bad = if labels[u] == labels[v] { x < 0.0 } else { x >= 0.0 };
            if bad {
                total += x.abs();
            }
        }
    }
    total
}

/// Minimum max-correlation cost over all partitions.
pub fn brute_force_min_mc(s: &[Vec<f64>]) -> f64 {
    all_partitions(s.len())
        .iter()
        .map(|p| mc_cost_dense(s, p))
        .fold(f64::INFINITY, f64::min)
}

/// Exact same-cluster marginals of the Gibbs distribution over all
/// partitions, `P(c) ∝ exp(-beta * R_mc(c))`.
pub fn gibbs_same_cluster(s: &[Vec<f64>], beta: f64) -> Vec<Vec<f64>> {
    let n = s.len();
    let parts = all_partitions(n);
    let energies: Vec<f64> = parts.iter().map(|p| -beta * mc_cost_dense(s, p)).collect();
    let top = energies.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = energies.iter().map(|e| (e - top).exp()).collect();
    let z: f64 = weights.iter().sum();
    let mut probs = vec![vec![0.0; n]; n];
    for (p, w) in parts.iter().zip(&weights) {
        for u in 0..n {
            for v in 0..n {
                if u != v && p[u] == p[v] {
                    probs[u][v] += w / z;
                }
            }
        }
    }
    probs
}

/// Region of a pair under hard labels, as `(min, max)` cluster ids.
pub fn hard_region(labels: &[usize], u: usize, v: usize) -> (usize, usize) {
    let (a, b) = (labels[u], labels[v]);
    (a.min(b), a.max(b))
}

/// Per-pair soft region weight summed over `u < v`, optionally weighted by `a`.
pub fn soft_region_sums(memb: &[Vec<f64>], a_mat: Option<&[Vec<f64>]>, ra: usize, rb: usize) -> f64 {
    let n = memb.len();
    let mut total = 0.0;
    for u in 0..n {
        for v in u + 1..n {
            let w = if ra == rb {
                memb[u][ra] * memb[v][ra]
            } else {
                memb[u][ra] * memb[v][rb] + memb[u][rb] * memb[v][ra]
            };
            total += w * a_mat.map_or(1.0, |a| a[u][v]);
        }
    }
    total
}

/// Pearson chi-square statistic of observed counts against expected
/// probabilities.
pub fn chi_square(observed: &[u64], probs: &[f64]) -> f64 {
    let total: u64 = observed.iter().sum();
    observed
        .iter()
        .zip(probs)
        .map(|(&o, &p)| {
            let e = p * total as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum()
}
