//! Sampling without replacement via the Gumbel top-k trick.

use rand::seq::index;
use rand_distr::{Distribution, Gumbel};

use crate::error::{Error, Result};
use crate::model::Pair;
use crate::rng::Rng;

const SCORE_FLOOR: f64 = 1e-12;

/// Indices of the `k` largest `ln(score) + Gumbel(0, 1)` keys, best first.
///
/// Equivalent in law to drawing `k` items one by one without replacement with
/// probability proportional to score. Equal keys are ordered by index.
pub fn gumbel_top_k(scores: &[f64], k: usize, rng: &mut Rng) -> Vec<usize> {
    let gumbel = Gumbel::new(0.0, 1.0).expect("standard Gumbel");
    let mut keyed: Vec<(f64, usize)> = scores
        .iter()
        .enumerate()
        .map(|(i, &s)| (s.max(SCORE_FLOOR).ln() + gumbel.sample(rng), i))
        .collect();
    let k = k.min(keyed.len());
    let by_key = |x: &(f64, usize), y: &(f64, usize)| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1));
    if k < keyed.len() && k > 0 {
        keyed.select_nth_unstable_by(k - 1, by_key);
    }
    keyed.truncate(k);
    keyed.sort_unstable_by(by_key);
    keyed.into_iter().map(|(_, i)| i).collect()
}

/// Draws `b` pairs from one region, proportionally to their scores and
/// without replacement.
pub fn sample_within_region(pairs: &[Pair], scores: &[f64], b: usize, rng: &mut Rng) -> Result<Vec<Pair>> {
    if pairs.len() != scores.len() {
        return Err(Error::DimensionMismatch {
            expected: pairs.len(),
            found: scores.len(),
        });
    }
    if b > pairs.len() {
        return Err(Error::invalid(format!(
            "cannot draw {b} pairs from a region with {} candidates",
            pairs.len()
        )));
    }
    Ok(gumbel_top_k(scores, b, rng).into_iter().map(|i| pairs[i]).collect())
}

/// Uniform sample of `b` pairs without replacement.
pub fn sample_uniform(pairs: &[Pair], b: usize, rng: &mut Rng) -> Vec<Pair> {
    let b = b.min(pairs.len());
    index::sample(rng, pairs.len(), b)
        .into_iter()
        .map(|i| pairs[i])
        .collect()
}
