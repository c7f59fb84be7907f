//! Repeated runs and per-level aggregation.

use serde::Serialize;

use super::config::ExperimentConfig;
use super::run::{run_with_seed, RoundRecord};
use crate::error::{Error, Result};
use crate::par::*;

#[derive(Debug)]
pub struct SeedRun {
    pub seed: u64,
    pub result: Result<Vec<RoundRecord>>,
}

/// Aggregate over the runs of one experiment at one round index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub iter: usize,
    pub queries: usize,
    pub ari_mean: f64,
    pub ari_median: f64,
    /// Sample standard deviation; zero for a single run.
    pub ari_std: f64,
}

#[derive(Debug)]
pub struct Repetitions {
    pub runs: Vec<SeedRun>,
    pub summary: Vec<SummaryRow>,
}

impl Repetitions {
    pub fn curves(&self) -> impl Iterator<Item = (u64, &[RoundRecord])> {
        self.runs
            .iter()
            .filter_map(|r| r.result.as_ref().ok().map(|c| (r.seed, c.as_slice())))
    }

    pub fn failures(&self) -> impl Iterator<Item = (u64, &Error)> {
        self.runs
            .iter()
            .filter_map(|r| r.result.as_ref().err().map(|e| (r.seed, e)))
    }
}

/// `seed, seed + 1, ..., seed + count - 1`.
pub fn seed_range(seed: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|i| seed.wrapping_add(i)).collect()
}

/// Runs the experiment once per seed (concurrently under the `parallel`
/// feature) and aggregates the successful curves. A seed that fails at
/// runtime does not stop the others; a configuration or loading error is
/// returned as is.
pub fn run_repetitions(cfg: &ExperimentConfig, seeds: &[u64]) -> Result<Repetitions> {
    if seeds.is_empty() {
        return Err(Error::Config("at least one seed is required".into()));
    }
    cfg.validate()?;
    let mut runs: Vec<SeedRun> = seeds
        .par_iter()
        .map(|&seed| SeedRun {
            seed,
            result: run_with_seed(cfg, seed),
        })
        .collect();
    let bad_config = runs
        .iter()
        .position(|r| matches!(&r.result, Err(e) if e.is_config_error()));
    if let Some(i) = bad_config {
        runs.swap_remove(i).result?;
    }
    let curves: Vec<&[RoundRecord]> = runs
        .iter()
        .filter_map(|r| r.result.as_ref().ok().map(Vec::as_slice))
        .collect();
    Ok(Repetitions {
        summary: aggregate(&curves),
        runs,
    })
}

/// Per round index: mean, median and standard deviation of ARI across
/// curves. Curves shorter than the longest are extended with their final
/// record.
pub fn aggregate(curves: &[&[RoundRecord]]) -> Vec<SummaryRow> {
    let levels = curves.iter().map(|c| c.len()).max().unwrap_or(0);
    (0..levels)
        .map(|i| {
            let queries = curves
                .iter()
                .filter(|c| c.len() > i)
                .map(|c| c[i].queries)
                .max()
                .unwrap_or(0);
            let mut aris: Vec<f64> = curves
                .iter()
                .filter(|c| !c.is_empty())
                .map(|c| c[i.min(c.len() - 1)].ari)
                .collect();
            let (mean, median, std) = stats(&mut aris);
            SummaryRow {
                iter: i,
                queries,
                ari_mean: mean,
                ari_median: median,
                ari_std: std,
            }
        })
        .collect()
}

fn stats(xs: &mut [f64]) -> (f64, f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    xs.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    };
    let std = if n > 1 {
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    (mean, median, std)
}

/// Median of a list of optional values, with `None` sorting above every
/// number (a run that never reached the target counts as slowest).
pub fn median_of_options(values: &[Option<usize>]) -> Option<usize> {
    let mut v: Vec<Option<usize>> = values.to_vec();
    v.sort_by(|a, b| match (a, b) {
        (Some(x), Some(y)) => x.cmp(y),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    if v.is_empty() {
        return None;
    }
    // lower median keeps the result an observed value
    v[(v.len() - 1) / 2]
}
