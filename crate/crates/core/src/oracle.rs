//! Simulated noisy similarity oracle.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    /// Probability that an answer is replaced by uniform noise on `[-1, 1]`.
    pub gamma: f64,
    pub rng_seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            gamma: 0.4,
            rng_seed: 0,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::invalid(format!("gamma must lie in [0, 1], got {}", self.gamma)));
        }
        Ok(())
    }
}

fn check(labels: &[usize], u: usize, v: usize) -> Result<()> {
    let n = labels.len();
    for index in [u, v] {
        if index >= n {
            return Err(Error::IndexOutOfRange { index, n });
        }
    }
    if u == v {
        return Err(Error::invalid("the oracle is only asked about distinct objects"));
    }
    Ok(())
}

/// `+1` when both objects carry the same class label, `-1` otherwise.
pub fn ground_truth_similarity(labels: &[usize], u: usize, v: usize) -> Result<f64> {
    check(labels, u, v)?;
    Ok(if labels[u] == labels[v] { 1.0 } else { -1.0 })
}

/// One oracle answer: the truth with probability `1 - gamma`, otherwise a
/// fresh uniform draw on `[-1, 1]`.
pub fn noisy_oracle(labels: &[usize], u: usize, v: usize, gamma: f64, rng: &mut Rng) -> Result<f64> {
    let truth = ground_truth_similarity(labels, u, v)?;
    if rng.random_bool(gamma) {
        Ok(rng.random_range(-1.0..=1.0))
    } else {
        Ok(truth)
    }
}

/// Stateful oracle for one experiment run. Answers depend only on the seed
/// and the sequence of questions.
#[derive(Debug, Clone)]
pub struct NoisyOracle {
    labels: Vec<usize>,
    gamma: f64,
    rng: Rng,
    asked: usize,
}

impl NoisyOracle {
    pub fn new(labels: Vec<usize>, cfg: &OracleConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(NoisyOracle {
            labels,
            gamma: cfg.gamma,
            rng: rng::seeded(cfg.rng_seed),
            asked: 0,
        })
    }

    pub fn query(&mut self, u: usize, v: usize) -> Result<f64> {
        let x = noisy_oracle(&self.labels, u, v, self.gamma, &mut self.rng)?;
        self.asked += 1;
        Ok(x)
    }

    pub fn num_queries(&self) -> usize {
        self.asked
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truth_is_symmetric_sign() {
        let labels = [0, 0, 1];
        assert_eq!(ground_truth_similarity(&labels, 0, 1).unwrap(), 1.0);
        assert_eq!(ground_truth_similarity(&labels, 0, 2).unwrap(), -1.0);
        assert_eq!(ground_truth_similarity(&labels, 2, 0).unwrap(), -1.0);
        assert!(ground_truth_similarity(&labels, 0, 3).is_err());
        assert!(ground_truth_similarity(&labels, 1, 1).is_err());
    }

    #[test]
    fn noiseless_oracle_is_exact() {
        let labels = [0, 1, 0, 1];
        let mut o = NoisyOracle::new(
            labels.to_vec(),
            &OracleConfig {
                gamma: 0.0,
                rng_seed: 1,
            },
        )
        .unwrap();
        for _ in 0..100 {
            assert_eq!(o.query(0, 2).unwrap(), 1.0);
            assert_eq!(o.query(1, 2).unwrap(), -1.0);
        }
        assert_eq!(o.num_queries(), 200);
    }

    #[test]
    fn responses_reproducible_and_bounded() {
        let labels: Vec<usize> = (0..10).map(|i| i % 3).collect();
        let cfg = OracleConfig {
            gamma: 0.4,
            rng_seed: 9,
        };
        let mut a = NoisyOracle::new(labels.clone(), &cfg).unwrap();
        let mut b = NoisyOracle::new(labels, &cfg).unwrap();
        for u in 0..10 {
            for v in u + 1..10 {
                let x = a.query(u, v).unwrap();
                assert_eq!(x.to_bits(), b.query(u, v).unwrap().to_bits());
                assert!((-1.0..=1.0).contains(&x));
            }
        }
    }

    #[test]
    fn rejects_bad_gamma() {
        assert!(NoisyOracle::new(
            vec![0, 1],
            &OracleConfig {
                gamma: 1.5,
                rng_seed: 0
            }
        )
        .is_err());
    }
}
