//! Experiment configuration, read from TOML.
//!
//! Every field has a default, so a config file only lists what it changes.
//! Unknown keys are rejected. The README lists every key.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::coverage::{Strategy, StrategyConfig};
use crate::data::InitKind;
use crate::error::{Error, Result};
use crate::meanfield::MeanFieldParams;
use crate::oracle::OracleConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Master seed of a run. Repetitions use `seed, seed + 1, ...`.
    pub seed: u64,
    pub strategy: Strategy,
    /// Iteration at which coverage and unient switch to entropy.
    pub switch_iter: usize,
    pub epsilon: f64,
    pub batch_size: usize,
    /// Total query budget; all pairs when absent.
    pub budget: Option<usize>,
    pub repetitions: usize,
    pub output_dir: PathBuf,
    pub dataset: DatasetSpec,
    pub init: InitSpec,
    pub oracle: OracleSpec,
    pub solver: SolverSpec,
    pub meanfield: MeanFieldSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 0,
            strategy: Strategy::Coverage {
                a: crate::coverage::AKind::Cost,
                membership: crate::coverage::MembershipMode::Hard,
            },
            switch_iter: 20,
            epsilon: 1e-9,
            batch_size: 50,
            budget: None,
            repetitions: 1,
            output_dir: PathBuf::from("results"),
            dataset: DatasetSpec::default(),
            init: InitSpec::default(),
            oracle: OracleSpec::default(),
            solver: SolverSpec::default(),
            meanfield: MeanFieldSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DatasetSpec {
    Synthetic {
        #[serde(default = "defaults::n")]
        n: usize,
        #[serde(default = "defaults::k")]
        k: usize,
        #[serde(default = "defaults::dim")]
        dim: usize,
        #[serde(default = "defaults::spread")]
        spread: f64,
        /// Fixed dataset seed; when absent each run seed draws its own data.
        #[serde(default)]
        seed: Option<u64>,
    },
    Csv {
        path: PathBuf,
    },
}

impl Default for DatasetSpec {
    fn default() -> Self {
        DatasetSpec::Synthetic {
            n: defaults::n(),
            k: defaults::k(),
            dim: defaults::dim(),
            spread: defaults::spread(),
            seed: None,
        }
    }
}

mod defaults {
    pub fn n() -> usize {
        100
    }
    pub fn k() -> usize {
        10
    }
    pub fn dim() -> usize {
        16
    }
    pub fn spread() -> f64 {
        1.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitSpec {
    pub kind: InitKind,
    /// Magnitude of the k-means prior entries.
    pub scale: f64,
    /// Number of k-means clusters; the number of classes when absent.
    pub k: Option<usize>,
    /// Fraction of pairs revealed noise-free before the first round.
    pub reveal_fraction: f64,
    /// Whether revealed pairs count as queried (and are never re-queried).
    pub reveal_mark_queried: bool,
}

impl Default for InitSpec {
    fn default() -> Self {
        InitSpec {
            kind: InitKind::Zero,
            scale: 0.01,
            k: None,
            reveal_fraction: 0.0,
            reveal_mark_queried: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleSpec {
    pub gamma: f64,
}

impl Default for OracleSpec {
    fn default() -> Self {
        OracleSpec { gamma: 0.4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSpec {
    pub max_sweeps: usize,
    pub restarts: usize,
}

impl Default for SolverSpec {
    fn default() -> Self {
        SolverSpec {
            max_sweeps: 200,
            restarts: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeanFieldSpec {
    pub beta: f64,
    pub max_iters: usize,
    pub tol: f64,
    pub damping: f64,
    /// Columns of Q beyond the current number of clusters.
    pub extra_components: usize,
    /// Start each round from the previous round's assignment costs.
    pub warm_start: bool,
}

impl Default for MeanFieldSpec {
    fn default() -> Self {
        MeanFieldSpec {
            beta: 1.0,
            max_iters: 100,
            tol: 1e-6,
            damping: 0.5,
            extra_components: 2,
            warm_start: false,
        }
    }
}

impl MeanFieldSpec {
    pub fn params(&self, k: usize, rng_seed: u64) -> MeanFieldParams {
        MeanFieldParams {
            beta: self.beta,
            k,
            max_iters: self.max_iters,
            tol: self.tol,
            damping: self.damping,
            rng_seed,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn strategy_config(&self) -> StrategyConfig {
        StrategyConfig {
            strategy: self.strategy,
            switch_iter: self.switch_iter,
            epsilon: self.epsilon,
        }
    }

    pub fn oracle_config(&self, rng_seed: u64) -> OracleConfig {
        OracleConfig {
            gamma: self.oracle.gamma,
            rng_seed,
        }
    }

    /// Checks everything that does not depend on the dataset size.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.batch_size == 0 {
            return fail("batch_size must be at least 1".into());
        }
        if let Some(w) = self.budget {
            if w < self.batch_size {
                return fail(format!("budget {w} is smaller than batch_size {}", self.batch_size));
            }
        }
        if !(self.epsilon > 0.0) {
            return fail("epsilon must be positive".into());
        }
        if self.repetitions == 0 {
            return fail("repetitions must be at least 1".into());
        }
        self.oracle_config(0).validate().or_else(|e| fail(e.to_string()))?;
        if self.solver.max_sweeps == 0 {
            return fail("solver.max_sweeps must be at least 1".into());
        }
        self.meanfield
            .params(2, 0)
            .validate()
            .or_else(|e| fail(format!("meanfield: {e}")))?;
        if !(0.0..=1.0).contains(&self.init.scale) {
            return fail("init.scale must lie in [0, 1]".into());
        }
        if !(0.0..=1.0).contains(&self.init.reveal_fraction) {
            return fail("init.reveal_fraction must lie in [0, 1]".into());
        }
        if let DatasetSpec::Synthetic { n, k, spread, .. } = &self.dataset {
            if *k == 0 || n < k || *n < 2 {
                return fail(format!(
                    "synthetic dataset needs n >= k >= 1 and n >= 2, got n = {n}, k = {k}"
                ));
            }
            if !(*spread >= 0.0) {
                return fail("synthetic spread must be nonnegative".into());
            }
        }
        Ok(())
    }

    /// Checks the batch size and budget against the number of pairs.
    pub fn validate_for_pairs(&self, pairs: usize) -> Result<usize> {
        let w = self.budget.unwrap_or(pairs);
        if w > pairs {
            return Err(Error::Config(format!("budget {w} exceeds the {pairs} available pairs")));
        }
        if self.batch_size > w {
            return Err(Error::Config(format!(
                "batch_size {} exceeds the budget {w}",
                self.batch_size
            )));
        }
        Ok(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = ExperimentConfig::from_toml_str("").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        assert_eq!(cfg.strategy.to_string(), "coverage-cost-hard");
    }

    #[test]
    fn parses_full_file() {
        let text = r#"
            seed = 3
            strategy = "unient"
            switch_iter = 10
            batch_size = 20
            budget = 400
            repetitions = 4
            output_dir = "out"

            [dataset]
            kind = "synthetic"
            n = 60
            k = 6

            [init]
            kind = "kmeans"
            scale = 0.02

            [oracle]
            gamma = 0.1

            [solver]
            restarts = 2

            [meanfield]
            beta = 2.0
            warm_start = true
        "#;
        let cfg = ExperimentConfig::from_toml_str(text).unwrap();
        assert_eq!(cfg.strategy, Strategy::UniEnt);
        assert_eq!(cfg.budget, Some(400));
        assert_eq!(cfg.init.kind, InitKind::Kmeans);
        assert!(matches!(
            cfg.dataset,
            DatasetSpec::Synthetic {
                n: 60,
                k: 6,
                dim: 16,
                ..
            }
        ));
        assert_eq!(cfg.solver.restarts, 2);
        assert!(cfg.meanfield.warm_start);
        let again = ExperimentConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn csv_dataset() {
        let cfg = ExperimentConfig::from_toml_str("[dataset]\nkind = \"csv\"\npath = \"x.csv\"\n").unwrap();
        assert_eq!(cfg.dataset, DatasetSpec::Csv { path: "x.csv".into() });
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            "strategy = \"bogus\"",
            "batch_size = 0",
            "batch_size = 10\nbudget = 5",
            "unknown_key = 1",
            "[oracle]\ngamma = 1.5",
            "[meanfield]\ndamping = 1.0",
            "[dataset]\nkind = \"synthetic\"\nn = 3\nk = 5",
            "[dataset]\nkind = \"parquet\"",
        ] {
            let err = ExperimentConfig::from_toml_str(text).unwrap_err();
            assert!(err.is_config_error(), "{text}: {err}");
        }
    }

    #[test]
    fn budget_against_pairs() {
        let cfg = ExperimentConfig::default();
        assert_eq!(cfg.validate_for_pairs(4950).unwrap(), 4950);
        let cfg = ExperimentConfig {
            budget: Some(5000),
            ..Default::default()
        };
        assert!(cfg.validate_for_pairs(4950).is_err());
        let cfg = ExperimentConfig {
            batch_size: 50,
            ..Default::default()
        };
        assert!(cfg.validate_for_pairs(10).is_err());
    }
}
