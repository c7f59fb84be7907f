//! Query strategies.
//!
//! The coverage-aware strategy splits the batch across query regions induced
//! by the current clustering, in proportion to each region's informativeness
//! per pair, and then samples pairs inside each region proportionally to
//! their entropy. Plain entropy, uniform and uniform-then-entropy baselines
//! share the same entry point, [`select_batch`].

pub mod allocate;
pub mod amatrix;
pub mod region;
pub mod sampling;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

pub use allocate::allocate_budget;
pub use amatrix::{build_a, AKind};
pub use region::{
    informativeness_mass, membership_hard, region_proportions, region_sizes, regions, MembershipMatrix, MembershipMode,
    Region, RegionCounts, RegionEntry, RegionPlan, RegionValues,
};
pub use sampling::{gumbel_top_k, sample_uniform, sample_within_region};

use crate::error::{Error, Result};
use crate::meanfield::entropy_matrix;
use crate::model::{Clustering, Pair, SimilarityState};
use crate::par::*;
use crate::rng::{self, Rng};

/// A query strategy, identified on the command line and in config files by
/// strings such as `coverage-cost-hard`, `entropy`, `uniform` or `unient`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Strategy {
    Coverage { a: AKind, membership: MembershipMode },
    Entropy,
    Uniform,
    UniEnt,
}

impl Strategy {
    /// Every strategy: the eight coverage variants, then the baselines.
    pub fn all() -> Vec<Strategy> {
        let mut out = Vec::new();
        for membership in [MembershipMode::Hard, MembershipMode::Soft] {
            for a in AKind::ALL {
                out.push(Strategy::Coverage { a, membership });
            }
        }
        out.extend([Strategy::Entropy, Strategy::Uniform, Strategy::UniEnt]);
        out
    }

    /// What the strategy does at iteration `iter`.
    pub fn phase(&self, iter: usize, switch_iter: usize) -> Phase {
        match *self {
            Strategy::Coverage { a, membership } if iter < switch_iter => Phase::Coverage { a, membership },
            Strategy::UniEnt if iter < switch_iter => Phase::Uniform,
            Strategy::Uniform => Phase::Uniform,
            _ => Phase::Entropy,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Coverage { a, membership } => {
                let m = match membership {
                    MembershipMode::Hard => "hard",
                    MembershipMode::Soft => "soft",
                };
                write!(f, "coverage-{a}-{m}")
            }
            Strategy::Entropy => f.write_str("entropy"),
            Strategy::Uniform => f.write_str("uniform"),
            Strategy::UniEnt => f.write_str("unient"),
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "entropy" => return Ok(Strategy::Entropy),
            "uniform" => return Ok(Strategy::Uniform),
            "unient" => return Ok(Strategy::UniEnt),
            _ => {}
        }
        let unknown = || Error::invalid(format!("unknown strategy '{s}'"));
        let rest = s.strip_prefix("coverage-").ok_or_else(unknown)?;
        let (a, m) = rest.rsplit_once('-').ok_or_else(unknown)?;
        let membership = match m {
            "hard" => MembershipMode::Hard,
            "soft" => MembershipMode::Soft,
            _ => return Err(unknown()),
        };
        Ok(Strategy::Coverage {
            a: a.parse().map_err(|_| unknown())?,
            membership,
        })
    }
}

impl TryFrom<String> for Strategy {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Strategy> for String {
    fn from(s: Strategy) -> String {
        s.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Coverage { a: AKind, membership: MembershipMode },
    Entropy,
    Uniform,
}

impl Phase {
    pub fn needs_posterior(&self) -> bool {
        !matches!(self, Phase::Uniform)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyConfig {
    pub strategy: Strategy,
    /// Iteration from which coverage and unient hand over to entropy.
    pub switch_iter: usize,
    /// Floor on region sizes when normalizing masses.
    pub epsilon: f64,
}

impl StrategyConfig {
    pub fn new(strategy: Strategy) -> Self {
        StrategyConfig {
            strategy,
            switch_iter: 20,
            epsilon: 1e-9,
        }
    }

    pub fn phase(&self, iter: usize) -> Phase {
        self.strategy.phase(iter, self.switch_iter)
    }
}

/// Output of one selection step.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Selection {
    pub pairs: Vec<Pair>,
    /// Region bookkeeping when the coverage phase was active.
    pub plan: Option<RegionPlan>,
}

/// Selects up to `batch` distinct unqueried pairs. `q` is the mean-field
/// posterior; it is required by every phase except uniform sampling.
pub fn select_batch(
    strategy: &StrategyConfig,
    iter: usize,
    s: &SimilarityState,
    c: &Clustering,
    q: Option<&Array2<f64>>,
    batch: usize,
    rng: &mut Rng,
) -> Result<Vec<Pair>> {
    select_batch_planned(strategy, iter, s, c, q, batch, rng).map(|sel| sel.pairs)
}

/// [`select_batch`], also returning the region plan.
pub fn select_batch_planned(
    strategy: &StrategyConfig,
    iter: usize,
    s: &SimilarityState,
    c: &Clustering,
    q: Option<&Array2<f64>>,
    batch: usize,
    rng: &mut Rng,
) -> Result<Selection> {
    if c.n() != s.n() {
        return Err(Error::DimensionMismatch {
            expected: s.n(),
            found: c.n(),
        });
    }
    let phase = strategy.phase(iter);
    let posterior = || {
        let q = q.ok_or_else(|| Error::invalid(format!("strategy {} needs a posterior", strategy.strategy)))?;
        if q.nrows() != s.n() {
            return Err(Error::DimensionMismatch {
                expected: s.n(),
                found: q.nrows(),
            });
        }
        Ok(q)
    };
    let candidates = s.unqueried_pairs();
    if candidates.is_empty() || batch == 0 {
        return Ok(Selection::default());
    }
    match phase {
        Phase::Uniform => Ok(Selection {
            pairs: sample_uniform(&candidates, batch, rng),
            plan: None,
        }),
        Phase::Entropy => {
            let h = entropy_matrix(posterior()?);
            let scores: Vec<f64> = candidates.iter().map(|p| h[[p.0, p.1]]).collect();
            let pairs = gumbel_top_k(&scores, batch, rng)
                .into_iter()
                .map(|i| candidates[i])
                .collect();
            Ok(Selection { pairs, plan: None })
        }
        Phase::Coverage { a, membership } => coverage_batch(
            a,
            membership,
            strategy.epsilon,
            s,
            c,
            posterior()?,
            candidates,
            batch,
            rng,
        ),
    }
}

#[allow(clippy::too_many_arguments)]
fn coverage_batch(
    a_kind: AKind,
    mode: MembershipMode,
    epsilon: f64,
    s: &SimilarityState,
    c: &Clustering,
    q: &Array2<f64>,
    candidates: Vec<Pair>,
    batch: usize,
    rng: &mut Rng,
) -> Result<Selection> {
    let (memb, group) = match mode {
        MembershipMode::Hard => (membership_hard(c), c.labels().to_vec()),
        MembershipMode::Soft => {
            let m = MembershipMatrix::soft(q.clone())?;
            let g = m.dominant_columns();
            (m, g)
        }
    };
    let a = build_a(a_kind, s, Some(q), c)?;
    let entropy = if a_kind == AKind::Entropy {
        a.clone()
    } else {
        entropy_matrix(q)
    };

    let mut pools: BTreeMap<Region, Vec<Pair>> = BTreeMap::new();
    for p in candidates {
        pools.entry(Region::new(group[p.0], group[p.1])).or_default().push(p);
    }
    let caps: RegionCounts = pools.iter().map(|(r, v)| (*r, v.len())).collect();
    let plan = RegionPlan::build(&memb, &a, &caps, batch, epsilon)?;

    let jobs: Vec<(&[Pair], usize, u64)> = plan
        .entries
        .iter()
        .filter(|e| e.allocation > 0)
        .map(|e| (pools[&e.region].as_slice(), e.allocation, rng.random()))
        .collect();
    let drawn: Vec<Result<Vec<Pair>>> = jobs
        .par_iter()
        .map(|&(pairs, b, seed)| {
            let scores: Vec<f64> = pairs.iter().map(|p| entropy[[p.0, p.1]]).collect();
            sample_within_region(pairs, &scores, b, &mut rng::seeded(seed))
        })
        .collect();
    let mut pairs = Vec::with_capacity(batch);
    for d in drawn {
        pairs.extend(d?);
    }
    Ok(Selection {
        pairs,
        plan: Some(plan),
    })
}
