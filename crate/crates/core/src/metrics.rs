//! Adjusted Rand index.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::Clustering;

fn comb2(x: u64) -> f64 {
    (x * x.saturating_sub(1) / 2) as f64
}

/// Adjusted Rand index from the contingency table of the two partitions.
///
/// When the chance-corrected denominator vanishes (both partitions all
/// singletons, or both a single cluster) the partitions coincide and the
/// index is 1.
pub fn adjusted_rand_index(a: &Clustering, b: &Clustering) -> Result<f64> {
    adjusted_rand_index_labels(a.labels(), b.labels())
}

/// [`adjusted_rand_index`] on raw label slices.
pub fn adjusted_rand_index_labels(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let n = a.len() as u64;
    if n < 2 {
        return Ok(1.0);
    }
    let mut table: HashMap<(usize, usize), u64> = HashMap::new();
    let mut rows: HashMap<usize, u64> = HashMap::new();
    let mut cols: HashMap<usize, u64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *table.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    let index: f64 = table.values().map(|&c| comb2(c)).sum();
    let sum_rows: f64 = rows.values().map(|&c| comb2(c)).sum();
    let sum_cols: f64 = cols.values().map(|&c| comb2(c)).sum();
    let expected = sum_rows * sum_cols / comb2(n);
    let max_index = 0.5 * (sum_rows + sum_cols);
    let denom = max_index - expected;
    if denom == 0.0 {
        return Ok(1.0);
    }
    Ok((index - expected) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ari(a: &[usize], b: &[usize]) -> f64 {
        adjusted_rand_index_labels(a, b).unwrap()
    }

    #[test]
    fn identical_is_one() {
        assert_eq!(ari(&[0, 0, 1, 1, 2], &[0, 0, 1, 1, 2]), 1.0);
        assert_eq!(ari(&[0, 1, 2, 3], &[3, 2, 1, 0]), 1.0);
        assert_eq!(ari(&[0, 0, 0], &[5, 5, 5]), 1.0);
    }

    #[test]
    fn hand_computed_example() {
        // every contingency cell holds one object: index 0, expected 2/3, max 2
        assert!((ari(&[0, 0, 1, 1], &[0, 1, 0, 1]) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn relabeling_invariant() {
        let a = [0, 0, 1, 2, 2, 2, 1];
        let b = [1, 0, 1, 2, 2, 0, 1];
        let a2 = [7, 7, 3, 9, 9, 9, 3];
        assert_eq!(ari(&a, &b), ari(&a2, &b));
        assert_eq!(ari(&a, &b), ari(&b, &a));
    }

    #[test]
    fn length_mismatch() {
        assert!(adjusted_rand_index_labels(&[0, 1], &[0]).is_err());
    }
}
