//! Per-pair informativeness matrices used to weigh query regions.

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::meanfield::entropy_matrix;
use crate::model::{Clustering, SimilarityState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AKind {
    /// Pairwise entropy of the mean-field same-cluster indicator.
    Entropy,
    /// `|S_uv|` on pairs violating the current clustering.
    Cost,
    /// 1 for unqueried pairs, 0 for queried ones.
    Freq,
    /// Magnitude uncertainty `1 - |S_uv|`.
    Mu,
}

impl AKind {
    pub const ALL: [AKind; 4] = [AKind::Entropy, AKind::Cost, AKind::Freq, AKind::Mu];

    pub fn as_str(&self) -> &'static str {
        match self {
            AKind::Entropy => "entropy",
            AKind::Cost => "cost",
            AKind::Freq => "freq",
            AKind::Mu => "mu",
        }
    }
}

impl fmt::Display for AKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown informativeness kind '{s}'")))
    }
}

/// Builds the symmetric, nonnegative, zero-diagonal matrix for `kind`.
/// `q` is required for [`AKind::Entropy`].
pub fn build_a(kind: AKind, s: &SimilarityState, q: Option<&Array2<f64>>, c: &Clustering) -> Result<Array2<f64>> {
    let n = s.n();
    if c.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: c.n(),
        });
    }
    let off_diag =
        |f: &dyn Fn(usize, usize) -> f64| Array2::from_shape_fn((n, n), |(u, v)| if u == v { 0.0 } else { f(u, v) });
    let a = match kind {
        AKind::Entropy => {
            let q = q.ok_or_else(|| Error::invalid("entropy informativeness needs a mean-field posterior"))?;
            if q.nrows() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: q.nrows(),
                });
            }
            entropy_matrix(q)
        }
        AKind::Cost => off_diag(&|u, v| {
            let x = s.get(u, v);
            let violated = if c.label(u) == c.label(v) { x < 0.0 } else { x >= 0.0 };
            if violated {
                x.abs()
            } else {
                0.0
            }
        }),
        AKind::Freq => off_diag(&|u, v| if s.is_queried(u, v) { 0.0 } else { 1.0 }),
        AKind::Mu => off_diag(&|u, v| 1.0 - s.get(u, v).abs()),
    };
    Ok(a)
}
