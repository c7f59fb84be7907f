//! Signed similarity graphs, clusterings and the correlation clustering
//! objectives.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An unordered object pair stored in canonical form `u < v`.
///
/// Serializes as a two-element array `[u, v]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pair(pub usize, pub usize);

impl Pair {
    /// Canonicalizes the pair. Panics on `a == b`.
    pub fn new(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "a pair needs two distinct objects");
        if a < b {
            Pair(a, b)
        } else {
            Pair(b, a)
        }
    }

    pub fn u(&self) -> usize {
        self.0
    }

    pub fn v(&self) -> usize {
        self.1
    }
}

/// Number of unordered pairs over `n` objects.
pub fn num_pairs(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Iterates all pairs `u < v` in row-major upper-triangle order.
pub fn all_pairs(n: usize) -> impl Iterator<Item = Pair> {
    (0..n).flat_map(move |u| (u + 1..n).map(move |v| Pair(u, v)))
}

/// The algorithm's whole knowledge about the objects: the current similarity
/// estimate and which pairs have been answered by the oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityState {
    s: Array2<f64>,
    queried: Vec<bool>,
    num_queried: usize,
}

impl SimilarityState {
    /// All similarities zero, nothing queried.
    pub fn zeros(n: usize) -> Self {
        SimilarityState {
            s: Array2::zeros((n, n)),
            queried: vec![false; n * n],
            num_queried: 0,
        }
    }

    /// Builds an unqueried state from a full matrix. The matrix must be
    /// square, symmetric, finite, zero on the diagonal and within `[-1, 1]`.
    pub fn from_matrix(s: Array2<f64>) -> Result<Self> {
        let (rows, cols) = s.dim();
        if rows != cols {
            return Err(Error::DimensionMismatch {
                expected: rows,
                found: cols,
            });
        }
        for u in 0..rows {
            if s[[u, u]] != 0.0 {
                return Err(Error::invalid(format!("diagonal entry {u} is nonzero")));
            }
            for v in u + 1..rows {
                let x = s[[u, v]];
                if !x.is_finite() || x.abs() > 1.0 {
                    return Err(Error::invalid(format!(
                        "similarity ({u}, {v}) = {x} is outside [-1, 1]"
                    )));
                }
                if x != s[[v, u]] {
                    return Err(Error::invalid(format!("similarity ({u}, {v}) is asymmetric")));
                }
            }
        }
        Ok(SimilarityState {
            queried: vec![false; rows * rows],
            s,
            num_queried: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.s.nrows()
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.s
    }

    fn check_pair(&self, u: usize, v: usize) -> Result<()> {
        let n = self.n();
        for index in [u, v] {
            if index >= n {
                return Err(Error::IndexOutOfRange { index, n });
            }
        }
        if u == v {
            return Err(Error::invalid(format!("pair ({u}, {v}) is a self-pair")));
        }
        Ok(())
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.s[[u, v]]
    }

    #[inline]
    pub fn is_queried(&self, u: usize, v: usize) -> bool {
        self.queried[u * self.n() + v]
    }

    pub fn num_queried(&self) -> usize {
        self.num_queried
    }

    pub fn num_unqueried(&self) -> usize {
        num_pairs(self.n()) - self.num_queried
    }

    /// Unqueried pairs in canonical order.
    pub fn unqueried_pairs(&self) -> Vec<Pair> {
        all_pairs(self.n()).filter(|p| !self.is_queried(p.0, p.1)).collect()
    }

    fn check_value(u: usize, v: usize, value: f64) -> Result<()> {
        if !value.is_finite() || value.abs() > 1.0 {
            return Err(Error::invalid(format!(
                "similarity ({u}, {v}) = {value} is outside [-1, 1]"
            )));
        }
        Ok(())
    }

    /// Overwrites a prior value of an unqueried pair without marking it.
    pub fn set_prior(&mut self, u: usize, v: usize, value: f64) -> Result<()> {
        self.check_pair(u, v)?;
        Self::check_value(u, v, value)?;
        if self.is_queried(u, v) {
            let p = Pair::new(u, v);
            return Err(Error::AlreadyQueried { u: p.0, v: p.1 });
        }
        self.s[[u, v]] = value;
        self.s[[v, u]] = value;
        Ok(())
    }

    /// Stores an oracle answer and marks the pair as queried. A pair can only
    /// be answered once; afterwards its value is frozen.
    pub fn record_query(&mut self, u: usize, v: usize, value: f64) -> Result<()> {
        self.set_prior(u, v, value)?;
        let n = self.n();
        self.queried[u * n + v] = true;
        self.queried[v * n + u] = true;
        self.num_queried += 1;
        Ok(())
    }

    /// The query mask as a 0/1 matrix.
    pub fn query_mask(&self) -> Array2<f64> {
        let n = self.n();
        Array2::from_shape_fn((n, n), |(u, v)| if self.queried[u * n + v] { 1.0 } else { 0.0 })
    }
}

/// A partition of `n` objects, stored as canonical labels: cluster ids are
/// assigned in order of first occurrence, so equal partitions compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Clustering {
    labels: Vec<usize>,
    k: usize,
}

impl Clustering {
    /// Canonicalizes arbitrary labels. Empty clusters cannot occur because
    /// ids are reassigned from the labels actually present.
    pub fn new(labels: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let labels: Vec<usize> = labels
            .iter()
            .map(|&l| {
                let next = map.len();
                *map.entry(l).or_insert(next)
            })
            .collect();
        Clustering { k: map.len(), labels }
    }

    pub fn singletons(n: usize) -> Self {
        Clustering {
            labels: (0..n).collect(),
            k: n,
        }
    }

    pub fn single_cluster(n: usize) -> Self {
        Clustering {
            labels: vec![0; n],
            k: usize::from(n > 0),
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    #[inline]
    pub fn label(&self, u: usize) -> usize {
        self.labels[u]
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    fn check_n(&self, n: usize) -> Result<()> {
        if self.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.n(),
            });
        }
        Ok(())
    }
}

#[inline]
fn violates_unchecked(same: bool, s: f64) -> bool {
    if same {
        s < 0.0
    } else {
        s >= 0.0
    }
}

/// Whether the pair disagrees with the clustering: a negative pair inside a
/// cluster, or a nonnegative pair across clusters. A zero similarity across
/// clusters counts as a violation.
pub fn violates(u: usize, v: usize, c: &Clustering, s: &SimilarityState) -> Result<bool> {
    c.check_n(s.n())?;
    s.check_pair(u, v)?;
    Ok(violates_unchecked(c.label(u) == c.label(v), s.get(u, v)))
}

/// Correlation clustering cost: total magnitude of violating pairs.
pub fn cc_cost(c: &Clustering, s: &SimilarityState) -> Result<f64> {
    c.check_n(s.n())?;
    Ok(all_pairs(s.n())
        .map(|Pair(u, v)| {
            let x = s.get(u, v);
            if violates_unchecked(c.label(u) == c.label(v), x) {
                x.abs()
            } else {
                0.0
            }
        })
        .sum())
}

/// Max-correlation cost: negative sum of within-cluster similarities.
pub fn mc_cost(c: &Clustering, s: &SimilarityState) -> Result<f64> {
    c.check_n(s.n())?;
    let within: f64 = all_pairs(s.n())
        .filter(|p| c.label(p.0) == c.label(p.1))
        .map(|Pair(u, v)| s.get(u, v))
        .sum();
    Ok(-within)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn three() -> SimilarityState {
        SimilarityState::from_matrix(array![[0.0, 1.0, -1.0], [1.0, 0.0, -1.0], [-1.0, -1.0, 0.0]]).unwrap()
    }

    #[test]
    fn violation_predicate() {
        let mut s = SimilarityState::zeros(3);
        s.set_prior(0, 1, -0.5).unwrap();
        let c = Clustering::new(&[0, 0, 1]);
        assert!(violates(0, 1, &c, &s).unwrap());
        // zero across clusters counts as similar
        assert!(violates(0, 2, &c, &s).unwrap());
        s.set_prior(0, 1, 1.0).unwrap();
        assert!(!violates(0, 1, &c, &s).unwrap());
        assert!(matches!(
            violates(0, 3, &c, &s),
            Err(Error::IndexOutOfRange { index: 3, n: 3 })
        ));
    }

    #[test]
    fn cc_cost_examples() {
        let mut s = SimilarityState::zeros(3);
        for (u, v) in [(0, 1), (0, 2), (1, 2)] {
            s.set_prior(u, v, -1.0).unwrap();
        }
        assert_eq!(cc_cost(&Clustering::single_cluster(3), &s).unwrap(), 3.0);

        let s = three();
        let c = Clustering::new(&[0, 0, 1]);
        assert_eq!(cc_cost(&c, &s).unwrap(), 0.0);
        assert_eq!(mc_cost(&c, &s).unwrap(), -1.0);
    }

    #[test]
    fn mc_cost_examples() {
        let s = three();
        assert_eq!(mc_cost(&Clustering::singletons(3), &s).unwrap(), 0.0);
        let z = SimilarityState::zeros(4);
        assert_eq!(mc_cost(&Clustering::single_cluster(4), &z).unwrap(), 0.0);
        assert!(matches!(
            mc_cost(&Clustering::singletons(2), &s),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn clustering_canonicalizes() {
        let a = Clustering::new(&[5, 5, 2, 9, 2]);
        assert_eq!(a.labels(), &[0, 0, 1, 2, 1]);
        assert_eq!(a.k(), 3);
        assert_eq!(a, Clustering::new(&[1, 1, 0, 7, 0]));
        assert_eq!(a.sizes(), vec![2, 2, 1]);
    }

    #[test]
    fn query_once_is_enforced() {
        let mut s = SimilarityState::zeros(4);
        s.set_prior(1, 2, 0.01).unwrap();
        s.record_query(2, 1, -0.3).unwrap();
        assert!(s.is_queried(1, 2) && s.is_queried(2, 1));
        assert_eq!(s.get(1, 2), -0.3);
        assert!(matches!(
            s.record_query(1, 2, 1.0),
            Err(Error::AlreadyQueried { u: 1, v: 2 })
        ));
        assert!(s.set_prior(1, 2, 0.5).is_err());
        assert_eq!(s.get(2, 1), -0.3);
        assert_eq!(s.num_unqueried(), 5);
        assert!(!s.unqueried_pairs().contains(&Pair(1, 2)));
    }

    #[test]
    fn rejects_invalid_matrices() {
        assert!(SimilarityState::from_matrix(array![[0.0, 2.0], [2.0, 0.0]]).is_err());
        assert!(SimilarityState::from_matrix(array![[0.0, 0.5], [0.4, 0.0]]).is_err());
        assert!(SimilarityState::from_matrix(array![[0.1, 0.5], [0.5, 0.0]]).is_err());
        assert!(SimilarityState::from_matrix(array![[0.0, f64::NAN], [f64::NAN, 0.0]]).is_err());
    }
}
