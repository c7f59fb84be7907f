//! The active clustering loop.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::config::{DatasetSpec, ExperimentConfig};
use crate::coverage::select_batch_planned;
use crate::data::{self, init_similarity, load_feature_csv, synthetic_dataset, Dataset};
use crate::error::{Error, Result};
use crate::meanfield::mean_field_from;
use crate::metrics::adjusted_rand_index;
use crate::model::{mc_cost, num_pairs, Clustering, Pair, SimilarityState};
use crate::oracle::NoisyOracle;
use crate::rng::{self, Stream};
use crate::solver::{local_search_cc, SolverParams};

/// One line of a run log.
///
/// `queries` counts the oracle queries made before this round, so `ari`,
/// `k` and `mc_cost` describe the clustering the round's batch was chosen
/// from. `batch` lists the pairs queried in this round; it is empty in the
/// final record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub iter: usize,
    pub queries: usize,
    pub ari: f64,
    pub k: usize,
    pub mc_cost: f64,
    pub batch: Vec<Pair>,
}

/// Builds the dataset a run with master seed `seed` works on.
pub fn load_dataset(cfg: &ExperimentConfig, seed: u64) -> Result<Dataset> {
    match &cfg.dataset {
        DatasetSpec::Synthetic {
            n,
            k,
            dim,
            spread,
            seed: data_seed,
        } => {
            let mut r = match data_seed {
                Some(s) => rng::seeded(*s),
                None => rng::stream(seed, 0, Stream::Dataset),
            };
            synthetic_dataset(*n, *k, *dim, *spread, &mut r).map_err(|e| Error::Config(e.to_string()))
        }
        DatasetSpec::Csv { path } => load_feature_csv(path),
    }
}

/// The similarity state at round 0: the configured prior plus any revealed
/// ground-truth pairs.
pub fn initial_state(cfg: &ExperimentConfig, dataset: &Dataset, seed: u64) -> Result<SimilarityState> {
    let mut state = init_similarity(
        cfg.init.kind,
        dataset,
        cfg.init.k,
        cfg.init.scale,
        &mut rng::stream(seed, 0, Stream::Init),
    )
    .map_err(|e| Error::Config(format!("initialization: {e}")))?;
    if cfg.init.reveal_fraction > 0.0 {
        data::reveal_ground_truth(
            &mut state,
            dataset.labels(),
            cfg.init.reveal_fraction,
            cfg.init.reveal_mark_queried,
            &mut rng::stream(seed, 0, Stream::Reveal),
        )?;
    }
    Ok(state)
}

/// Runs the loop with the config's own seed.
pub fn run_active_cc(cfg: &ExperimentConfig) -> Result<Vec<RoundRecord>> {
    run_with_seed(cfg, cfg.seed)
}

/// Runs the loop with master seed `seed`, building the dataset from config.
pub fn run_with_seed(cfg: &ExperimentConfig, seed: u64) -> Result<Vec<RoundRecord>> {
    cfg.validate()?;
    let dataset = load_dataset(cfg, seed)?;
    run_on_dataset(cfg, &dataset, seed)
}

/// Active clustering on a given dataset:
///
/// 1. cluster the current similarities, warm-started from the last round;
/// 2. fit the mean-field posterior when the strategy's phase needs one;
/// 3. select a batch of unqueried pairs (the last batch is cut to the
///    remaining budget);
/// 4. query the oracle and freeze the answers.
///
/// Stops when the budget is spent or every pair has been queried, then
/// clusters once more for the final record.
pub fn run_on_dataset(cfg: &ExperimentConfig, dataset: &Dataset, seed: u64) -> Result<Vec<RoundRecord>> {
    cfg.validate()?;
    let n = dataset.n();
    if n < 2 {
        return Err(Error::Config("the dataset needs at least two objects".into()));
    }
    let budget = cfg.validate_for_pairs(num_pairs(n))?;
    let truth = dataset.ground_truth();
    let mut state = initial_state(cfg, dataset, seed)?;
    let mut oracle = NoisyOracle::new(
        dataset.labels().to_vec(),
        &cfg.oracle_config(rng::derive_seed(seed, &[Stream::Oracle as u64])),
    )?;
    let strategy = cfg.strategy_config();

    let mut records = Vec::new();
    let mut prev = Clustering::singletons(n);
    let mut prev_m: Option<Array2<f64>> = None;
    let mut queries = 0usize;
    let mut iter = 0usize;

    while queries < budget && state.num_unqueried() > 0 {
        let c = cluster(cfg, &state, &prev, seed, iter).map_err(|e| e.in_round(iter))?;
        let (ari, k, cost) = evaluate(&c, &truth, &state)?;

        let posterior = if strategy.phase(iter).needs_posterior() {
            let params = cfg.meanfield.params(
                (c.k() + cfg.meanfield.extra_components).max(2),
                rng::derive_seed(seed, &[iter as u64, Stream::MeanField as u64]),
            );
            let init = if cfg.meanfield.warm_start {
                prev_m.as_ref()
            } else {
                None
            };
            let post = mean_field_from(&state, &params, init).map_err(|e| e.in_round(iter))?;
            Some(post)
        } else {
            None
        };

        let size = cfg.batch_size.min(budget - queries);
        let selection = select_batch_planned(
            &strategy,
            iter,
            &state,
            &c,
            posterior.as_ref().map(|p| &p.q),
            size,
            &mut rng::stream(seed, iter, Stream::Strategy),
        )
        .map_err(|e| e.in_round(iter))?;
        if selection.pairs.is_empty() {
            return Err(Error::invalid("strategy returned an empty batch").in_round(iter));
        }
        for &Pair(u, v) in &selection.pairs {
            let answer = oracle.query(u, v).map_err(|e| e.in_round(iter))?;
            state.record_query(u, v, answer).map_err(|e| e.in_round(iter))?;
        }
        log::debug!(
            "seed {seed} round {iter}: {} queries, ari {ari:.4}, k {k}",
            queries + selection.pairs.len()
        );

        queries += selection.pairs.len();
        records.push(RoundRecord {
            iter,
            queries: queries - selection.pairs.len(),
            ari,
            k,
            mc_cost: cost,
            batch: selection.pairs,
        });
        prev = c;
        prev_m = posterior.map(|p| p.m);
        iter += 1;
    }

    let c = cluster(cfg, &state, &prev, seed, iter).map_err(|e| e.in_round(iter))?;
    let (ari, k, cost) = evaluate(&c, &truth, &state)?;
    records.push(RoundRecord {
        iter,
        queries,
        ari,
        k,
        mc_cost: cost,
        batch: Vec::new(),
    });
    Ok(records)
}

fn cluster(
    cfg: &ExperimentConfig,
    state: &SimilarityState,
    prev: &Clustering,
    seed: u64,
    iter: usize,
) -> Result<Clustering> {
    let params = SolverParams {
        max_sweeps: cfg.solver.max_sweeps,
        restarts: cfg.solver.restarts,
        rng_seed: rng::derive_seed(seed, &[iter as u64, Stream::Solver as u64]),
    };
    local_search_cc(state, Some(prev), &params)
}

fn evaluate(c: &Clustering, truth: &Clustering, state: &SimilarityState) -> Result<(f64, usize, f64)> {
    let ari = adjusted_rand_index(c, truth)?;
    // + 0.0 folds a negative zero into zero for stable output
    let cost = mc_cost(c, state)? + 0.0;
    Ok((ari, c.k(), cost))
}

/// Queries spent before the first record whose ARI reaches `threshold`.
pub fn queries_to_reach(records: &[RoundRecord], threshold: f64) -> Option<usize> {
    records.iter().find(|r| r.ari >= threshold).map(|r| r.queries)
}
