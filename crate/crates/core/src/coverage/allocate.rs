//! Largest-remainder apportionment of a batch across regions, with capacity
//! clipping.

use std::collections::BTreeMap;

use super::region::{Region, RegionCounts, RegionValues};

/// Remainders closer than this are treated as tied.
const REMAINDER_TIE: f64 = 1e-12;

/// Splits `total` units by `weights` (need not be normalized; all zero means
/// uniform over `fallback`). Leftovers go to the largest fractional
/// remainders, ties broken by position.
fn largest_remainder(total: usize, weights: &[f64], fallback: &[bool]) -> Vec<usize> {
    let mut weights = weights.to_vec();
    let mut sum: f64 = weights.iter().sum();
    if !(sum > 0.0) {
        weights = fallback.iter().map(|&ok| if ok { 1.0 } else { 0.0 }).collect();
        sum = weights.iter().sum();
    }
    if total == 0 || !(sum > 0.0) {
        return vec![0; weights.len()];
    }
    let quotas: Vec<f64> = weights.iter().map(|w| w / sum * total as f64).collect();
    let mut alloc: Vec<usize> = quotas.iter().map(|q| (q + 1e-9).floor() as usize).collect();
    let assigned: usize = alloc.iter().sum();
    let mut leftover = total.saturating_sub(assigned);

    let mut order: Vec<usize> = (0..quotas.len()).filter(|&i| weights[i] > 0.0).collect();
    // remainders are snapped to a grid so near-ties fall back to position
    let rem = |i: usize| ((quotas[i] - alloc[i] as f64) / REMAINDER_TIE).round() as i64;
    order.sort_by_key(|&i| (std::cmp::Reverse(rem(i)), i));
    let mut i = 0;
    while leftover > 0 && !order.is_empty() {
        alloc[order[i % order.len()]] += 1;
        leftover -= 1;
        i += 1;
    }
    alloc
}

/// Integer allocation of `batch` queries over regions.
///
/// Ideal quotas `pi_r * batch` are floored and the leftover units go to the
/// largest remainders. Regions whose share exceeds their capacity are clipped
/// and the remaining budget is re-apportioned over the unsaturated regions by
/// the same rule. The result sums to `min(batch, sum caps)`.
pub fn allocate_budget(pi: &RegionValues, batch: usize, caps: &RegionCounts) -> BTreeMap<Region, usize> {
    let keys: Vec<Region> = pi.keys().copied().collect();
    let weights: Vec<f64> = pi.values().map(|&p| p.max(0.0)).collect();
    let cap: Vec<usize> = keys.iter().map(|r| caps.get(r).copied().unwrap_or(0)).collect();

    let mut alloc = vec![0usize; keys.len()];
    let mut saturated = vec![false; keys.len()];
    let mut remaining = batch.min(cap.iter().sum());

    loop {
        let active_w: Vec<f64> = weights
            .iter()
            .zip(&saturated)
            .map(|(&w, &sat)| if sat { 0.0 } else { w })
            .collect();
        let fallback: Vec<bool> = (0..keys.len()).map(|i| !saturated[i] && cap[i] > 0).collect();
        let quota = largest_remainder(remaining, &active_w, &fallback);
        let over: Vec<usize> = (0..keys.len())
            .filter(|&i| !saturated[i] && quota[i] > cap[i])
            .collect();
        if over.is_empty() {
            for i in 0..keys.len() {
                if !saturated[i] {
                    alloc[i] = quota[i];
                }
            }
            break;
        }
        for i in over {
            saturated[i] = true;
            alloc[i] = cap[i];
            remaining -= cap[i];
        }
    }
    keys.into_iter().zip(alloc).collect()
}
