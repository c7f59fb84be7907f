//! Experiment driver: configuration, the active clustering loop, repeated
//! runs, sweeps, ablations and their output files.

pub mod config;
pub mod grid;
pub mod output;
pub mod repeat;
pub mod run;

pub use config::{DatasetSpec, ExperimentConfig};
pub use grid::{ablation_variants, run_variants, strategy_variants, Ablation, Variant, VariantResult};
pub use repeat::{run_repetitions, seed_range, Repetitions, SummaryRow};
pub use run::{queries_to_reach, run_active_cc, run_on_dataset, run_with_seed, RoundRecord};

pub use crate::metrics::adjusted_rand_index;
