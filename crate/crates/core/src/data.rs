//! Datasets, k-means, and initial similarity matrices.

use std::collections::HashMap;
use std::path::Path;

use ndarray::{Array1, Array2};
use rand::seq::{index, SliceRandom};
use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{all_pairs, num_pairs, Clustering, Pair, SimilarityState};
use crate::oracle::ground_truth_similarity;
use crate::rng::Rng;

/// Half-width of the hypercube holding synthetic class means.
const MEAN_BOX: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    labels: Vec<usize>,
    num_classes: usize,
    features: Option<Array2<f64>>,
}

impl Dataset {
    /// Labels are remapped to `0..C` in order of first occurrence.
    pub fn new(labels: &[usize], features: Option<Array2<f64>>) -> Result<Self> {
        let c = Clustering::new(labels);
        if let Some(f) = &features {
            if f.nrows() != labels.len() {
                return Err(Error::DimensionMismatch {
                    expected: labels.len(),
                    found: f.nrows(),
                });
            }
            if f.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid("features contain non-finite values"));
            }
        }
        Ok(Dataset {
            num_classes: c.k(),
            labels: c.labels().to_vec(),
            features,
        })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn features(&self) -> Option<&Array2<f64>> {
        self.features.as_ref()
    }

    pub fn ground_truth(&self) -> Clustering {
        Clustering::new(&self.labels)
    }
}

/// Size-balanced Gaussian blobs: `n` objects in `k` classes whose sizes
/// differ by at most one, each class an isotropic Gaussian with standard
/// deviation `spread` around a mean drawn uniformly from `[-10, 10]^dim`.
pub fn synthetic_dataset(n: usize, k: usize, dim: usize, spread: f64, rng: &mut Rng) -> Result<Dataset> {
    if k == 0 || n < k {
        return Err(Error::invalid(format!("need n >= k >= 1, got n = {n}, k = {k}")));
    }
    if !(spread >= 0.0) || !spread.is_finite() {
        return Err(Error::invalid(format!("spread must be nonnegative, got {spread}")));
    }
    let mut labels: Vec<usize> = (0..n).map(|i| i % k).collect();
    labels.shuffle(rng);
    let means = Array2::from_shape_fn((k, dim), |_| rng.random_range(-MEAN_BOX..=MEAN_BOX));
    let noise = Normal::new(0.0, spread).map_err(|e| Error::invalid(e.to_string()))?;
    let mut features = Array2::zeros((n, dim));
    for (u, &l) in labels.iter().enumerate() {
        for d in 0..dim {
            features[[u, d]] = means[[l, d]] + noise.sample(rng);
        }
    }
    let d = Dataset {
        labels,
        num_classes: k,
        features: Some(features),
    };
    Ok(d)
}

/// Reads a comma-separated file: one object per row, features first and an
/// integer class label last. A first row that does not parse as numbers is
/// taken as a header.
pub fn load_feature_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let err = |row: usize, message: String| Error::Load {
        path: path.to_path_buf(),
        row,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| err(0, e.to_string()))?;

    let mut width: Option<usize> = None;
    let mut rows: Vec<f64> = Vec::new();
    let mut raw_labels: Vec<i64> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 1;
        let record = record.map_err(|e| err(line, e.to_string()))?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let numeric = record.iter().all(|f| f.parse::<f64>().is_ok());
        if idx == 0 && !numeric {
            continue;
        }
        let w = *width.get_or_insert(record.len());
        if record.len() != w {
            return Err(err(line, format!("expected {w} columns, found {}", record.len())));
        }
        let (label, feats) = record
            .iter()
            .collect::<Vec<_>>()
            .split_last()
            .map(|(l, f)| (*l, f.to_vec()))
            .ok_or_else(|| err(line, "empty row".into()))?;
        for f in feats {
            let x: f64 = f
                .parse()
                .map_err(|_| err(line, format!("cannot parse feature '{f}'")))?;
            if !x.is_finite() {
                return Err(err(line, format!("non-finite feature '{f}'")));
            }
            rows.push(x);
        }
        raw_labels.push(
            label
                .parse()
                .map_err(|_| err(line, format!("cannot parse class label '{label}'")))?,
        );
    }
    let n = raw_labels.len();
    if n == 0 {
        return Err(err(0, "no data rows".into()));
    }
    let dim = width.unwrap_or(1) - 1;
    let mut ids = HashMap::new();
    let labels: Vec<usize> = raw_labels
        .iter()
        .map(|l| {
            let next = ids.len();
            *ids.entry(*l).or_insert(next)
        })
        .collect();
    let features = if dim > 0 {
        Some(Array2::from_shape_vec((n, dim), rows).expect("rows have uniform width"))
    } else {
        None
    };
    Dataset::new(&labels, features)
}

fn sq_dist(a: ndarray::ArrayView1<f64>, b: ndarray::ArrayView1<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// k-means++ seeding: the first center uniformly, each further center with
/// probability proportional to squared distance from the chosen ones.
fn plus_plus(features: &Array2<f64>, k: usize, rng: &mut Rng) -> Vec<usize> {
    let n = features.nrows();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut dist: Vec<f64> = (0..n)
        .map(|u| sq_dist(features.row(u), features.row(chosen[0])))
        .collect();
    while chosen.len() < k {
        let total: f64 = dist.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random_range(0.0..total);
            let mut pick = n - 1;
            for (u, &d) in dist.iter().enumerate() {
                if target < d {
                    pick = u;
                    break;
                }
                target -= d;
            }
            pick
        } else {
            // duplicates only: any point not yet chosen
            let rest: Vec<usize> = (0..n).filter(|u| !chosen.contains(u)).collect();
            rest[rng.random_range(0..rest.len())]
        };
        chosen.push(next);
        for (u, d) in dist.iter_mut().enumerate() {
            *d = d.min(sq_dist(features.row(u), features.row(next)));
        }
    }
    chosen
}

/// Lloyd's algorithm from k-means++ centers, until assignments stop changing
/// or `max_iters` is reached. Empty clusters are re-seeded with the point
/// farthest from its center.
pub fn kmeans(features: Option<&Array2<f64>>, k: usize, max_iters: usize, rng: &mut Rng) -> Result<Clustering> {
    let features = features.ok_or_else(|| Error::invalid("k-means needs feature vectors"))?;
    let n = features.nrows();
    if k == 0 || k > n {
        return Err(Error::invalid(format!(
            "k-means needs 1 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    let dim = features.ncols();
    let mut centers = Array2::zeros((k, dim));
    for (j, &u) in plus_plus(features, k, rng).iter().enumerate() {
        centers.row_mut(j).assign(&features.row(u));
    }
    let mut labels = vec![usize::MAX; n];
    for _ in 0..max_iters.max(1) {
        let mut changed = false;
        let mut dists = vec![0.0; n];
        for u in 0..n {
            let (best, d) = (0..k)
                .map(|j| (j, sq_dist(features.row(u), centers.row(j))))
                .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
            dists[u] = d;
            if labels[u] != best {
                labels[u] = best;
                changed = true;
            }
        }
        let mut counts = vec![0usize; k];
        for &l in &labels {
            counts[l] += 1;
        }
        for j in 0..k {
            if counts[j] == 0 {
                let far = (0..n)
                    .filter(|&u| counts[labels[u]] > 1)
                    .max_by(|&x, &y| dists[x].total_cmp(&dists[y]).then(y.cmp(&x)));
                if let Some(u) = far {
                    counts[labels[u]] -= 1;
                    labels[u] = j;
                    counts[j] = 1;
                    dists[u] = 0.0;
                    changed = true;
                }
            }
        }
        let mut sums = Array2::<f64>::zeros((k, dim));
        for (u, &l) in labels.iter().enumerate() {
            let mut row = sums.row_mut(l);
            row += &features.row(u);
        }
        for j in 0..k {
            let mean: Array1<f64> = sums.row(j).mapv(|x| x / counts[j] as f64);
            centers.row_mut(j).assign(&mean);
        }
        if !changed {
            break;
        }
    }
    Ok(Clustering::new(&labels))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitKind {
    Zero,
    Kmeans,
}

/// The similarity state before any query: all zero, or `+scale` / `-scale`
/// according to a k-means partition of the features. Nothing is marked
/// queried, so every prior entry can be overwritten by the oracle.
pub fn init_similarity(
    kind: InitKind,
    dataset: &Dataset,
    k_init: Option<usize>,
    scale: f64,
    rng: &mut Rng,
) -> Result<SimilarityState> {
    let n = dataset.n();
    let mut s = SimilarityState::zeros(n);
    if kind == InitKind::Zero {
        return Ok(s);
    }
    if !(0.0..=1.0).contains(&scale) {
        return Err(Error::invalid(format!("init scale must lie in [0, 1], got {scale}")));
    }
    let k = k_init.unwrap_or(dataset.num_classes()).min(n);
    let c = kmeans(dataset.features(), k, 300, rng)?;
    for Pair(u, v) in all_pairs(n) {
        let x = if c.label(u) == c.label(v) { scale } else { -scale };
        s.set_prior(u, v, x)?;
    }
    Ok(s)
}

/// Reveals a random `fraction` of all pairs with their noise-free similarity.
/// Revealed pairs are marked as queried when `mark_queried` is set, and
/// otherwise stay overwritable priors. Returns the number of pairs revealed.
pub fn reveal_ground_truth(
    s: &mut SimilarityState,
    labels: &[usize],
    fraction: f64,
    mark_queried: bool,
    rng: &mut Rng,
) -> Result<usize> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::invalid(format!(
            "reveal fraction must lie in [0, 1], got {fraction}"
        )));
    }
    let total = num_pairs(s.n());
    let count = (fraction * total as f64).round() as usize;
    let pairs: Vec<Pair> = all_pairs(s.n()).collect();
    let mut picked: Vec<usize> = index::sample(rng, total, count).into_vec();
    picked.sort_unstable();
    for i in picked {
        let Pair(u, v) = pairs[i];
        let x = ground_truth_similarity(labels, u, v)?;
        if mark_queried {
            s.record_query(u, v, x)?;
        } else {
            s.set_prior(u, v, x)?;
        }
    }
    Ok(count)
}
