//! Query regions and their size-normalized informativeness.
//!
//! A region is either all pairs inside cluster `a` or all pairs between
//! clusters `a < b`. With soft memberships each pair contributes a fractional
//! weight to every region; sizes and masses are then computed in closed form
//! from `s = U^T 1`, `B = U^T U` and `G = U^T A U`.

use std::collections::BTreeMap;

use ndarray::{Array1, Array2};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Clustering;

/// Region `(a, b)` with `a <= b`. Ordering is lexicographic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Region {
    pub a: usize,
    pub b: usize,
}

impl Region {
    pub fn new(x: usize, y: usize) -> Self {
        Region {
            a: x.min(y),
            b: x.max(y),
        }
    }

    pub fn is_within(&self) -> bool {
        self.a == self.b
    }
}

/// All regions for `k` clusters in lexicographic order.
pub fn regions(k: usize) -> impl Iterator<Item = Region> {
    (0..k).flat_map(move |a| (a..k).map(move |b| Region { a, b }))
}

pub type RegionValues = BTreeMap<Region, f64>;
pub type RegionCounts = BTreeMap<Region, usize>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MembershipMode {
    Soft,
    Hard,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipMatrix {
    u: Array2<f64>,
    mode: MembershipMode,
}

impl MembershipMatrix {
    /// Soft memberships from a row-stochastic matrix such as the mean-field Q.
    pub fn soft(q: Array2<f64>) -> Result<Self> {
        for (row_idx, row) in q.outer_iter().enumerate() {
            if row.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
                return Err(Error::invalid(format!("membership row {row_idx} has a negative entry")));
            }
            if (row.sum() - 1.0).abs() > 1e-9 {
                return Err(Error::invalid(format!(
                    "membership row {row_idx} sums to {}",
                    row.sum()
                )));
            }
        }
        Ok(MembershipMatrix {
            u: q,
            mode: MembershipMode::Soft,
        })
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.u
    }

    pub fn mode(&self) -> MembershipMode {
        self.mode
    }

    pub fn n(&self) -> usize {
        self.u.nrows()
    }

    pub fn k(&self) -> usize {
        self.u.ncols()
    }

    /// Column holding each object's largest membership (lowest on ties).
    pub fn dominant_columns(&self) -> Vec<usize> {
        self.u
            .outer_iter()
            .map(|row| {
                let mut best = 0;
                for (k, &x) in row.iter().enumerate() {
                    if x > row[best] {
                        best = k;
                    }
                }
                best
            })
            .collect()
    }
}

/// One-hot memberships `U_uk = 1[c_u = k]`.
pub fn membership_hard(c: &Clustering) -> MembershipMatrix {
    let mut u = Array2::zeros((c.n(), c.k()));
    for (obj, &label) in c.labels().iter().enumerate() {
        u[[obj, label]] = 1.0;
    }
    MembershipMatrix {
        u,
        mode: MembershipMode::Hard,
    }
}

/// Soft pair counts per region: `N_aa = (s_a^2 - B_aa) / 2` and
/// `N_ab = s_a s_b - B_ab`.
pub fn region_sizes(memb: &MembershipMatrix) -> RegionValues {
    let u = memb.matrix();
    let col_sums: Array1<f64> = u.sum_axis(ndarray::Axis(0));
    let gram = u.t().dot(u);
    regions(memb.k())
        .map(|r| {
            let size = if r.is_within() {
                0.5 * (col_sums[r.a] * col_sums[r.a] - gram[[r.a, r.a]])
            } else {
                col_sums[r.a] * col_sums[r.b] - gram[[r.a, r.b]]
            };
            (r, size.max(0.0))
        })
        .collect()
}

/// Check that `a` is a valid informativeness matrix for `n` objects.
pub fn validate_informativeness(a: &Array2<f64>, n: usize) -> Result<()> {
    if a.dim() != (n, n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.nrows(),
        });
    }
    for u in 0..n {
        if a[[u, u]] != 0.0 {
            return Err(Error::invalid(format!("informativeness diagonal {u} is nonzero")));
        }
        for v in u + 1..n {
            let x = a[[u, v]];
            if !(x >= 0.0) || !x.is_finite() {
                return Err(Error::invalid(format!("informativeness ({u}, {v}) = {x} is negative")));
            }
            if x != a[[v, u]] {
                return Err(Error::invalid(format!("informativeness ({u}, {v}) is asymmetric")));
            }
        }
    }
    Ok(())
}

/// Informativeness mass per region from `G = U^T A U`: `M_aa = G_aa / 2`,
/// `M_ab = G_ab`.
pub fn informativeness_mass(memb: &MembershipMatrix, a: &Array2<f64>) -> Result<RegionValues> {
    validate_informativeness(a, memb.n())?;
    let u = memb.matrix();
    let g = u.t().dot(&a.dot(u));
    Ok(regions(memb.k())
        .map(|r| {
            let mass = if r.is_within() {
                0.5 * g[[r.a, r.a]]
            } else {
                g[[r.a, r.b]]
            };
            (r, mass.max(0.0))
        })
        .collect())
}

/// Size-normalized proportions `pi_r = V_r / sum V`, `V_r = M_r / max(N_r, eps)`.
///
/// When every score is zero the proportions fall back to uniform, restricted
/// to regions with remaining capacity when `caps` is given.
pub fn region_proportions(
    sizes: &RegionValues,
    masses: &RegionValues,
    epsilon: f64,
    caps: Option<&RegionCounts>,
) -> Result<RegionValues> {
    if !(epsilon > 0.0) {
        return Err(Error::invalid("epsilon must be positive"));
    }
    if sizes.len() != masses.len() || sizes.keys().zip(masses.keys()).any(|(x, y)| x != y) {
        return Err(Error::invalid("sizes and masses cover different regions"));
    }
    let scores: Vec<(Region, f64)> = sizes
        .iter()
        .zip(masses.values())
        .map(|((&r, &n), &m)| (r, m / n.max(epsilon)))
        .collect();
    let total: f64 = scores.iter().map(|(_, v)| v).sum();
    if total > 0.0 && total.is_finite() {
        return Ok(scores.into_iter().map(|(r, v)| (r, v / total)).collect());
    }

    let eligible = |r: &Region| caps.is_none_or(|c| c.get(r).copied().unwrap_or(0) > 0);
    let count = sizes.keys().filter(|r| eligible(r)).count();
    Ok(sizes
        .keys()
        .map(|r| {
            let p = if count > 0 && eligible(r) {
                1.0 / count as f64
            } else {
                0.0
            };
            (*r, p)
        })
        .collect())
}

/// Per-region bookkeeping for one coverage-driven batch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionEntry {
    pub region: Region,
    pub size: f64,
    pub mass: f64,
    pub score: f64,
    pub proportion: f64,
    pub allocation: usize,
    pub capacity: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct RegionPlan {
    pub entries: Vec<RegionEntry>,
}

impl RegionPlan {
    pub fn build(
        memb: &MembershipMatrix,
        a: &Array2<f64>,
        caps: &RegionCounts,
        batch: usize,
        epsilon: f64,
    ) -> Result<Self> {
        let sizes = region_sizes(memb);
        let masses = informativeness_mass(memb, a)?;
        let pi = region_proportions(&sizes, &masses, epsilon, Some(caps))?;
        let alloc = super::allocate::allocate_budget(&pi, batch, caps);
        let entries = sizes
            .iter()
            .map(|(&region, &size)| {
                let mass = masses[&region];
                RegionEntry {
                    region,
                    size,
                    mass,
                    score: mass / size.max(epsilon),
                    proportion: pi[&region],
                    allocation: alloc.get(&region).copied().unwrap_or(0),
                    capacity: caps.get(&region).copied().unwrap_or(0),
                }
            })
            .collect();
        Ok(RegionPlan { entries })
    }

    pub fn total_allocation(&self) -> usize {
        self.entries.iter().map(|e| e.allocation).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn r(a: usize, b: usize) -> Region {
        Region::new(a, b)
    }

    #[test]
    fn hard_membership_examples() {
        let m = membership_hard(&Clustering::new(&[0, 0, 1]));
        assert_eq!(m.matrix(), &array![[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        let m = membership_hard(&Clustering::single_cluster(4));
        assert_eq!(m.matrix(), &Array2::<f64>::ones((4, 1)));
        let m = membership_hard(&Clustering::singletons(3));
        assert_eq!(m.matrix(), &Array2::<f64>::eye(3));
        assert_eq!(m.mode(), MembershipMode::Hard);
    }

    #[test]
    fn hard_sizes_are_pair_counts() {
        let m = membership_hard(&Clustering::new(&[0, 0, 0, 1, 1]));
        let sizes = region_sizes(&m);
        assert_eq!(sizes[&r(0, 0)], 3.0);
        assert_eq!(sizes[&r(1, 1)], 1.0);
        assert_eq!(sizes[&r(0, 1)], 6.0);
    }

    #[test]
    fn soft_sizes_by_hand() {
        let m = MembershipMatrix::soft(array![[0.5, 0.5], [0.5, 0.5]]).unwrap();
        let sizes = region_sizes(&m);
        assert_abs_diff_eq!(sizes[&r(0, 0)], 0.25);
        assert_abs_diff_eq!(sizes[&r(1, 1)], 0.25);
        assert_abs_diff_eq!(sizes[&r(0, 1)], 0.5);
    }

    #[test]
    fn mass_examples() {
        let m = membership_hard(&Clustering::new(&[0, 0, 1, 1]));
        let mut a = Array2::zeros((4, 4));
        a[[0, 1]] = 0.7;
        a[[1, 0]] = 0.7;
        let mass = informativeness_mass(&m, &a).unwrap();
        assert_abs_diff_eq!(mass[&r(0, 0)], 0.7, epsilon = 1e-15);
        assert_eq!(mass[&r(1, 1)], 0.0);
        assert_eq!(mass[&r(0, 1)], 0.0);

        let m = MembershipMatrix::soft(array![[0.5, 0.5], [0.5, 0.5]]).unwrap();
        let a = array![[0.0, 1.0], [1.0, 0.0]];
        let mass = informativeness_mass(&m, &a).unwrap();
        assert_abs_diff_eq!(mass[&r(0, 0)], 0.25);
        assert_abs_diff_eq!(mass[&r(1, 1)], 0.25);
        assert_abs_diff_eq!(mass[&r(0, 1)], 0.5);
    }

    #[test]
    fn mass_rejects_bad_matrices() {
        let m = membership_hard(&Clustering::new(&[0, 1]));
        assert!(informativeness_mass(&m, &array![[0.0, 1.0], [0.5, 0.0]]).is_err());
        assert!(informativeness_mass(&m, &array![[0.0, -1.0], [-1.0, 0.0]]).is_err());
        assert!(informativeness_mass(&m, &Array2::zeros((3, 3))).is_err());
    }

    #[test]
    fn proportion_examples() {
        let keys = [r(0, 0), r(0, 1), r(1, 1)];
        let map = |xs: [f64; 3]| keys.iter().copied().zip(xs).collect::<RegionValues>();

        let pi = region_proportions(&map([1.0, 1.0, 1.0]), &map([2.0, 2.0, 2.0]), 1e-9, None).unwrap();
        assert!(pi.values().all(|&p| (p - 1.0 / 3.0).abs() < 1e-15));

        let pi = region_proportions(&map([1.0, 1.0, 2.0]), &map([2.0, 1.0, 1.0]), 1e-9, None).unwrap();
        let got: Vec<f64> = pi.values().copied().collect();
        for (g, w) in got.iter().zip([4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0]) {
            assert_abs_diff_eq!(*g, w, epsilon = 1e-15);
        }

        let pi = region_proportions(&map([1.0, 3.0, 2.0]), &map([0.0; 3]), 1e-9, None).unwrap();
        assert!(pi.values().all(|&p| (p - 1.0 / 3.0).abs() < 1e-15));

        let caps: RegionCounts = keys.iter().copied().zip([0, 4, 2]).collect();
        let pi = region_proportions(&map([1.0, 3.0, 2.0]), &map([0.0; 3]), 1e-9, Some(&caps)).unwrap();
        assert_eq!(pi.values().copied().collect::<Vec<_>>(), vec![0.0, 0.5, 0.5]);
    }

    #[test]
    fn epsilon_guards_empty_regions() {
        let keys = [r(0, 0), r(0, 1)];
        let sizes: RegionValues = keys.iter().copied().zip([0.0, 2.0]).collect();
        let masses: RegionValues = keys.iter().copied().zip([0.0, 1.0]).collect();
        let pi = region_proportions(&sizes, &masses, 1e-9, None).unwrap();
        assert_eq!(pi[&r(0, 0)], 0.0);
        assert_eq!(pi[&r(0, 1)], 1.0);
        assert!(region_proportions(&sizes, &masses, 0.0, None).is_err());
    }
}
