//! Cold-start active correlation clustering.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: signed similarity state, clusterings, and the two correlation
//!   clustering objectives.
//! - [`solver`]: local-search solver for the max-correlation objective.
//! - [`meanfield`]: mean-field surrogate of the Gibbs distribution over
//!   clusterings and the pairwise entropy acquisition.
//! - [`coverage`]: query regions, region budget allocation, Gumbel top-k
//!   sampling and the query strategies built on them.
//! - [`data`] and [`oracle`]: datasets, similarity initialisation and the
//!   simulated noisy oracle.
//! - [`harness`]: the active clustering loop, ARI evaluation, repetitions,
//!   ablations and output files.
//!
//! With the default `parallel` feature, batch loops (solver restarts, entropy
//! matrices, per-region sampling, repetitions, sweeps) run on rayon. Without
//! it they run sequentially with identical results.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod coverage;
pub mod data;
pub mod error;
pub mod harness;
pub mod meanfield;
pub mod metrics;
pub mod model;
pub mod oracle;
pub mod par;
pub mod rng;
pub mod solver;

pub use error::{Error, Result};
pub use model::{Clustering, Pair, SimilarityState};

#[cfg(test)]
#[path = "../tests/common/oracles.rs"]
mod oracles;
