//! Ball Divergence: the two-sample statistic, its three K-sample
//! aggregations, the O(N^2) univariate path, and the shuffled-rank
//! reconstruction used by the permutation engine.
//!
//! All ball membership counts are tie-inclusive (`<=` on distances) and kept
//! as integers until the final division, so tied data give exact statistics
//! and results are independent of worker count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::types::{BdKind, DistanceMatrix, GroupedSample, RankStructures};

/// Upper-triangular table of the two-sample statistics
/// `BD(mu_s, mu_t)` for `0 <= s < t < K`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseBdTable {
    k: usize,
    values: Vec<f64>,
}

impl PairwiseBdTable {
    fn index(&self, s: usize, t: usize) -> usize {
        debug_assert!(s < t && t < self.k);
        s * self.k - s * (s + 1) / 2 + (t - s - 1)
    }

    /// Number of groups.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Two-sample statistic for the unordered pair `{s, t}`.
    pub fn get(&self, s: usize, t: usize) -> f64 {
        if s < t {
            self.values[self.index(s, t)]
        } else {
            self.values[self.index(t, s)]
        }
    }

    /// Entries in ascending `(s, t)` order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.k).flat_map(move |s| {
            ((s + 1)..self.k).map(move |t| (s, t, self.values[self.index(s, t)]))
        })
    }

    pub fn from_entries(k: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), k * (k - 1) / 2);
        Self { k, values }
    }
}

/// All three K-sample aggregations of a pairwise table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BdAggregates {
    pub sum: f64,
    pub summax: f64,
    pub max: f64,
}

impl BdAggregates {
    pub fn select(&self, kind: BdKind) -> f64 {
        match kind {
            BdKind::Sum => self.sum,
            BdKind::SumMax => self.summax,
            BdKind::Max => self.max,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.sum, self.summax, self.max]
    }
}

/// Two-sample Ball Divergence over a pooled distance matrix.
///
/// The proportions are read off tie-inclusive ranks of each center's
/// distance row restricted to its own group and to the pooled pair, giving
/// `O(N^2 log N)` total work.
pub fn bd_two_sample(dist: &DistanceMatrix, groups: &GroupedSample) -> Result<f64> {
    if groups.k() != 2 {
        return Err(Error::InvalidLabels {
            reason: format!("two-sample statistic needs K = 2, got {}", groups.k()),
        });
    }
    if groups.n() != dist.n() {
        return Err(Error::DimensionMismatch {
            expected: dist.n(),
            got: groups.n(),
        });
    }
    let g1 = groups.group_indices(0);
    let g2 = groups.group_indices(1);
    Ok(bd_two_sample_indexed(dist, &g1, &g2))
}

/// Two-sample Ball Divergence over explicit index sets of a pooled matrix.
pub fn bd_two_sample_indexed(dist: &DistanceMatrix, g1: &[usize], g2: &[usize]) -> f64 {
    let s1 = group_center_sum(dist, g1, g2);
    let s2 = group_center_sum(dist, g2, g1);
    bd_from_sums(s1, s2, g1.len(), g2.len())
}

/// Integer sum of `(a * n_other - b * n_own)^2` over all balls centered in
/// `own`, where `a` and `b` count own-group and other-group members of the
/// ball. One sort of the pooled pair row per center; tie runs are resolved
/// by assigning the run-final counts to every member of the run.
fn group_center_sum(dist: &DistanceMatrix, own: &[usize], other: &[usize]) -> u128 {
    let n_own = own.len() as u64;
    let n_other = other.len() as u64;
    own.par_iter()
        .map_init(
            || Vec::with_capacity(own.len() + other.len()),
            |entries, &i| {
                let row = dist.row(i);
                entries.clear();
                entries.extend(own.iter().map(|&j| (row[j], true)));
                entries.extend(other.iter().map(|&j| (row[j], false)));
                entries.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

                let mut acc = 0u128;
                let mut cnt_own = 0u64;
                let mut cnt_all = 0u64;
                let mut start = 0;
                let len = entries.len();
                while start < len {
                    let value = entries[start].0;
                    let mut end = start;
                    let mut run_own = 0u64;
                    while end < len && entries[end].0 == value {
                        if entries[end].1 {
                            run_own += 1;
                        }
                        end += 1;
                    }
                    cnt_own += run_own;
                    cnt_all += (end - start) as u64;
                    // Each own-group member of the run is one ball boundary j.
                    let a = cnt_own;
                    let b = cnt_all - cnt_own;
                    let diff = (a * n_other) as i64 - (b * n_own) as i64;
                    acc += run_own as u128 * (diff * diff) as u128;
                    start = end;
                }
                acc
            },
        )
        .sum()
}

fn bd_from_sums(s1: u128, s2: u128, n1: usize, n2: usize) -> f64 {
    let pair = (n1 * n2) as f64;
    let scale1 = (n1 * n1) as f64 * pair * pair;
    let scale2 = (n2 * n2) as f64 * pair * pair;
    s1 as f64 / scale1 + s2 as f64 / scale2
}

/// Two-sample Ball Divergence for sorted univariate samples in `O(N^2)`.
///
/// For each center, ball boundaries are visited in decreasing radius while
/// two windows (own sample and pooled sample) shrink to exactly the points
/// within the current radius, so membership counts stay exact under ties.
/// Produces bit-identical results to [`bd_two_sample`] on the Euclidean
/// distance matrix.
pub fn bd_two_sample_univariate(x1: &[f64], x2: &[f64]) -> Result<f64> {
    check_sorted(x1)?;
    check_sorted(x2)?;
    if x1.is_empty() {
        return Err(Error::EmptyGroup { group: 0 });
    }
    if x2.is_empty() {
        return Err(Error::EmptyGroup { group: 1 });
    }
    let pooled = merge_sorted(x1, x2);
    let s1: u128 = (0..x1.len())
        .into_par_iter()
        .map(|i| univariate_center_sum(x1, &pooled, x1[i], x2.len() as u64, x1.len() as u64))
        .sum();
    let s2: u128 = (0..x2.len())
        .into_par_iter()
        .map(|i| univariate_center_sum(x2, &pooled, x2[i], x1.len() as u64, x2.len() as u64))
        .sum();
    Ok(bd_from_sums(s1, s2, x1.len(), x2.len()))
}

fn check_sorted(values: &[f64]) -> Result<()> {
    for (pos, pair) in values.windows(2).enumerate() {
        if !(pair[0] <= pair[1]) {
            return Err(Error::UnsortedInput { position: pos + 1 });
        }
    }
    Ok(())
}

fn merge_sorted(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Ball membership counts for all boundaries of one center, accumulated into
/// the integer statistic sum. `own` and `pooled` are sorted ascending and
/// `center` is an element of both.
fn univariate_center_sum(
    own: &[f64],
    pooled: &[f64],
    center: f64,
    n_other: u64,
    n_own: u64,
) -> u128 {
    let n = own.len();
    let (mut lo, mut hi) = (0usize, n - 1);
    let (mut l, mut r) = (0usize, n - 1);
    let (mut pl, mut pr) = (0usize, pooled.len() - 1);
    let mut acc = 0u128;
    for _ in 0..n {
        // Next boundary: the remaining point farthest from the center.
        let left_radius = center - own[lo];
        let right_radius = own[hi] - center;
        let radius = if left_radius >= right_radius {
            lo += 1;
            left_radius
        } else {
            hi -= 1;
            right_radius
        };
        while own[r] - center > radius {
            r -= 1;
        }
        while center - own[l] > radius {
            l += 1;
        }
        while pooled[pr] - center > radius {
            pr -= 1;
        }
        while center - pooled[pl] > radius {
            pl += 1;
        }
        let a = (r - l + 1) as u64;
        let b = (pr - pl + 1) as u64 - a;
        let diff = (a * n_other) as i64 - (b * n_own) as i64;
        acc += (diff * diff) as u128;
    }
    acc
}

/// Within-sample ball membership counts `n * P` for one center of a sorted
/// univariate sample, in boundary order `j = 0..n`. Exposed for the
/// univariate independence path, which needs the window bounds themselves.
pub(crate) fn univariate_bounds(
    sorted: &[f64],
    center: f64,
    lower: &mut [u32],
    upper: &mut [u32],
) {
    let n = sorted.len();
    let (mut lo, mut hi) = (0usize, n - 1);
    let (mut l, mut r) = (0usize, n - 1);
    for _ in 0..n {
        let left_radius = center - sorted[lo];
        let right_radius = sorted[hi] - center;
        let (radius, boundary) = if left_radius >= right_radius {
            lo += 1;
            (left_radius, lo - 1)
        } else {
            hi -= 1;
            (right_radius, hi + 1)
        };
        while sorted[r] - center > radius {
            r -= 1;
        }
        while center - sorted[l] > radius {
            l += 1;
        }
        lower[boundary] = l as u32;
        upper[boundary] = r as u32;
    }
}

/// All pairwise two-sample statistics of a K-group pooled sample. Each pair
/// is ranked within its own pooled submatrix.
pub fn bd_pairwise(dist: &DistanceMatrix, groups: &GroupedSample) -> Result<PairwiseBdTable> {
    let k = groups.k();
    if k < 2 {
        return Err(Error::InvalidLabels {
            reason: format!("K-sample statistic needs K >= 2, got {k}"),
        });
    }
    if groups.n() != dist.n() {
        return Err(Error::DimensionMismatch {
            expected: dist.n(),
            got: groups.n(),
        });
    }
    let indices: Vec<Vec<usize>> = (0..k).map(|g| groups.group_indices(g)).collect();
    let mut values = Vec::with_capacity(k * (k - 1) / 2);
    for s in 0..k {
        for t in (s + 1)..k {
            values.push(bd_two_sample_indexed(dist, &indices[s], &indices[t]));
        }
    }
    Ok(PairwiseBdTable::from_entries(k, values))
}

/// Aggregate a pairwise table into the selected K-sample statistic; all
/// three aggregations are always returned alongside the selected one.
pub fn bd_k_sample(table: &PairwiseBdTable, kind: BdKind) -> (f64, BdAggregates) {
    let aggregates = bd_aggregates(table);
    (aggregates.select(kind), aggregates)
}

pub(crate) fn bd_aggregates(table: &PairwiseBdTable) -> BdAggregates {
    let k = table.k();
    let sum = table.entries().map(|(_, _, v)| v).sum();
    let summax = (0..k)
        .map(|t| (0..k).filter(|&s| s != t).map(|s| table.get(s, t)).sum())
        .fold(f64::NEG_INFINITY, f64::max);
    let mut sorted: Vec<f64> = table.entries().map(|(_, _, v)| v).collect();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let max = sorted.iter().take(k - 1).sum();
    BdAggregates { sum, summax, max }
}

/// Positions of each pooled observation inside the shuffled block layout:
/// observation `i` with shuffled label `k` goes to block `k` at offset
/// `cumulative[k]` plus the number of earlier observations sharing the label.
pub fn position_vector(shuffled_labels: &[usize], groups: &GroupedSample) -> Result<Vec<u32>> {
    let sizes = groups.sizes();
    let mut seen = vec![0usize; sizes.len()];
    let mut positions = Vec::with_capacity(shuffled_labels.len());
    for &label in shuffled_labels {
        if label >= sizes.len() {
            return Err(Error::LabelCountMismatch {
                group: label,
                got: 1,
                expected: 0,
            });
        }
        positions.push((groups.cumulative()[label] + seen[label]) as u32);
        seen[label] += 1;
    }
    for (g, (&got, &expected)) in seen.iter().zip(sizes.iter()).enumerate() {
        if got != expected {
            return Err(Error::LabelCountMismatch {
                group: g,
                got,
                expected,
            });
        }
    }
    Ok(positions)
}

/// Row-wise rank matrices of one shuffled group pair, reconstructed from the
/// pooled order structures without touching distances.
#[derive(Debug, Clone, PartialEq)]
pub struct ShuffledPairRanks {
    pub n_s: usize,
    pub n_t: usize,
    /// `n_s x n_s` ranks of the shuffled group `s` within itself.
    pub own_s: Vec<u32>,
    /// `n_t x n_t` ranks of the shuffled group `t` within itself.
    pub own_t: Vec<u32>,
    /// `(n_s + n_t)^2` ranks within the shuffled pair pooled together,
    /// group `s` occupying the leading block.
    pub pooled: Vec<u32>,
}

impl ShuffledPairRanks {
    pub fn zeroed(n_s: usize, n_t: usize) -> Self {
        let m = n_s + n_t;
        Self {
            n_s,
            n_t,
            own_s: vec![0; n_s * n_s],
            own_t: vec![0; n_t * n_t],
            pooled: vec![0; m * m],
        }
    }

    fn reset(&mut self, n_s: usize, n_t: usize) {
        let m = n_s + n_t;
        self.n_s = n_s;
        self.n_t = n_t;
        self.own_s.resize(n_s * n_s, 0);
        self.own_t.resize(n_t * n_t, 0);
        self.pooled.resize(m * m, 0);
    }

    /// The two-sample statistic of the reconstructed pair; bit-identical to
    /// ranking the materialized shuffled submatrices directly.
    pub fn bd_statistic(&self) -> f64 {
        let (n_s, n_t) = (self.n_s, self.n_t);
        let m = n_s + n_t;
        let mut acc_s = 0u128;
        for r in 0..n_s {
            for c in 0..n_s {
                let a = u64::from(self.own_s[r * n_s + c]);
                let b = u64::from(self.pooled[r * m + c]) - a;
                let diff = (a * n_t as u64) as i64 - (b * n_s as u64) as i64;
                acc_s += (diff * diff) as u128;
            }
        }
        let mut acc_t = 0u128;
        for r in 0..n_t {
            for c in 0..n_t {
                let a = u64::from(self.own_t[r * n_t + c]);
                let b = u64::from(self.pooled[(n_s + r) * m + (n_s + c)]) - a;
                let diff = (a * n_s as u64) as i64 - (b * n_t as u64) as i64;
                acc_t += (diff * diff) as u128;
            }
        }
        bd_from_sums(acc_s, acc_t, n_s, n_t)
    }
}

/// Reconstruct the row-wise rank matrices of the shuffled pair `(s, t)` from
/// order structures built once on the unshuffled pooled matrix, in `O(N)` per
/// relevant row instead of a fresh `O(N log N)` ranking.
///
/// Scanning a row's columns in pooled distance order, a member's rank within
/// any subset is the number of subset members seen once its whole tie run has
/// been consumed; the run boundaries are read from the pooled rank matrix.
pub fn reconstruct_shuffled_ranks(
    structures: &RankStructures,
    shuffled_labels: &[usize],
    groups: &GroupedSample,
    pair: (usize, usize),
) -> Result<ShuffledPairRanks> {
    if shuffled_labels.len() != structures.n() {
        return Err(Error::DimensionMismatch {
            expected: structures.n(),
            got: shuffled_labels.len(),
        });
    }
    let positions = position_vector(shuffled_labels, groups)?;
    let mut out = ShuffledPairRanks::zeroed(groups.sizes()[pair.0], groups.sizes()[pair.1]);
    reconstruct_into(structures, shuffled_labels, &positions, groups, pair, &mut out);
    Ok(out)
}

/// In-place variant of [`reconstruct_shuffled_ranks`] for callers that reuse
/// scratch buffers across replicates. `positions` must come from
/// [`position_vector`] for the same shuffled labels.
pub(crate) fn reconstruct_into(
    structures: &RankStructures,
    shuffled_labels: &[usize],
    positions: &[u32],
    groups: &GroupedSample,
    (s, t): (usize, usize),
    out: &mut ShuffledPairRanks,
) {
    let n = structures.n();
    let n_s = groups.sizes()[s];
    let n_t = groups.sizes()[t];
    let m = n_s + n_t;
    let offset_s = groups.cumulative()[s] as u32;
    let offset_t = groups.cumulative()[t] as u32;
    out.reset(n_s, n_t);

    for i in 0..n {
        let center_group = shuffled_labels[i];
        if center_group != s && center_group != t {
            continue;
        }
        let center_is_s = center_group == s;
        let own_row = if center_is_s {
            (positions[i] - offset_s) as usize
        } else {
            (positions[i] - offset_t) as usize
        };
        let pooled_row = if center_is_s { own_row } else { own_row + n_s };

        let order = structures.order_row(i);
        let rank = structures.rank_row(i);
        let mut cnt_s = 0u32;
        let mut cnt_t = 0u32;
        let mut start = 0usize;
        while start < n {
            let run_end = rank[order[start] as usize] as usize;
            for &o in &order[start..run_end] {
                let label = shuffled_labels[o as usize];
                if label == s {
                    cnt_s += 1;
                } else if label == t {
                    cnt_t += 1;
                }
            }
            let cnt_pooled = cnt_s + cnt_t;
            for &o in &order[start..run_end] {
                let o = o as usize;
                let label = shuffled_labels[o];
                if label == s {
                    let col = (positions[o] - offset_s) as usize;
                    if center_is_s {
                        out.own_s[own_row * n_s + col] = cnt_s;
                    }
                    out.pooled[pooled_row * m + col] = cnt_pooled;
                } else if label == t {
                    let col = (positions[o] - offset_t) as usize;
                    if !center_is_s {
                        out.own_t[own_row * n_t + col] = cnt_t;
                    }
                    out.pooled[pooled_row * m + (col + n_s)] = cnt_pooled;
                }
            }
            start = run_end;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::rowwise_rank;
    use crate::metrics::{euclidean_distances, PointSet};
    use crate::oracle;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn euclid(values: &[f64]) -> DistanceMatrix {
        euclidean_distances(&PointSet::from_column(values).unwrap())
    }

    #[test]
    fn single_point_groups_give_two() {
        let dist = euclid(&[0.0, 1.0]);
        let groups = GroupedSample::from_sizes(&[1, 1]).unwrap();
        assert_eq!(bd_two_sample(&dist, &groups).unwrap(), 2.0);
    }

    #[test]
    fn identical_multisets_give_zero() {
        let dist = euclid(&[1.0, 2.0, 3.0, 1.0, 2.0, 3.0]);
        let groups = GroupedSample::from_sizes(&[3, 3]).unwrap();
        assert_eq!(bd_two_sample(&dist, &groups).unwrap(), 0.0);
    }

    #[test]
    fn two_one_split_matches_frozen_oracle_value() {
        let dist = euclid(&[0.0, 1.0, 2.0]);
        let groups = GroupedSample::from_sizes(&[2, 1]).unwrap();
        assert_eq!(bd_two_sample(&dist, &groups).unwrap(), 1.375);
    }

    #[test]
    fn rank_path_matches_oracle_on_random_gaussians() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for round in 0..20 {
            let data: Vec<f64> = (0..30)
                .map(|_| {
                    // Mix of continuous values and duplicates.
                    if rng.random::<f64>() < 0.3 {
                        rng.random_range(0..5) as f64
                    } else {
                        rng.random::<f64>() * 2.0
                    }
                })
                .collect();
            let dist = euclid(&data);
            let groups = GroupedSample::from_sizes(&[15, 15]).unwrap();
            let fast = bd_two_sample(&dist, &groups).unwrap();
            let slow = oracle::naive_bd_two_sample(&dist, &groups).unwrap();
            assert!(
                (fast - slow).abs() < 1e-12,
                "round {round}: fast {fast} vs oracle {slow}"
            );
        }
    }

    #[test]
    fn label_order_within_groups_is_irrelevant() {
        let data = [0.3, 1.2, -0.4, 0.9, 2.2, -1.0, 0.0];
        let dist = euclid(&data);
        let a = GroupedSample::from_labels(&[0, 0, 0, 1, 1, 1, 1]).unwrap();
        let b = GroupedSample::from_labels(&[1, 0, 1, 0, 1, 0, 1]).unwrap();
        // Same observations, different assignment: values differ. But
        // re-listing the same assignment in shuffled positions must not.
        let perm_data = [0.9, 0.3, 2.2, 1.2, -1.0, -0.4, 0.0];
        let perm_labels = [1, 0, 1, 0, 1, 0, 1];
        let dist_perm = euclid(&perm_data);
        let c = GroupedSample::from_labels(&perm_labels).unwrap();
        assert_eq!(
            bd_two_sample(&dist, &a).unwrap(),
            bd_two_sample(&dist_perm, &c).unwrap()
        );
        // Sanity: the alternative assignment is a genuinely different split.
        assert_ne!(
            bd_two_sample(&dist, &a).unwrap(),
            bd_two_sample(&dist, &b).unwrap()
        );
    }

    #[test]
    fn univariate_counts_from_bounds() {
        // Sorted sample {1, 2, 4}, center 2: ball radii 1, 0, 2 give
        // membership counts 2, 1, 3.
        let sorted = [1.0, 2.0, 4.0];
        let mut lower = [0u32; 3];
        let mut upper = [0u32; 3];
        univariate_bounds(&sorted, 2.0, &mut lower, &mut upper);
        let counts: Vec<u32> = (0..3).map(|j| upper[j] - lower[j] + 1).collect();
        assert_eq!(counts, vec![2, 1, 3]);
    }

    #[test]
    fn univariate_identical_samples_give_zero() {
        assert_eq!(
            bd_two_sample_univariate(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(),
            0.0
        );
    }

    #[test]
    fn univariate_rejects_unsorted() {
        assert!(matches!(
            bd_two_sample_univariate(&[2.0, 1.0], &[0.0]),
            Err(Error::UnsortedInput { position: 1 })
        ));
    }

    #[test]
    fn univariate_matches_rank_path_with_ties() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..500 {
            let n1 = rng.random_range(1..20);
            let n2 = rng.random_range(1..20);
            let tied = rng.random::<f64>() < 0.5;
            let sample = |rng: &mut ChaCha8Rng, n: usize| -> Vec<f64> {
                let mut v: Vec<f64> = (0..n)
                    .map(|_| {
                        if tied {
                            rng.random_range(0..6) as f64
                        } else {
                            rng.random::<f64>()
                        }
                    })
                    .collect();
                v.sort_by(|a, b| a.partial_cmp(b).unwrap());
                v
            };
            let x1 = sample(&mut rng, n1);
            let x2 = sample(&mut rng, n2);
            let pooled: Vec<f64> = x1.iter().chain(x2.iter()).copied().collect();
            let dist = euclid(&pooled);
            let groups = GroupedSample::from_sizes(&[n1, n2]).unwrap();
            let general = bd_two_sample(&dist, &groups).unwrap();
            let fast = bd_two_sample_univariate(&x1, &x2).unwrap();
            assert_eq!(fast, general, "x1 {x1:?} x2 {x2:?}");
        }
    }

    #[test]
    fn pairwise_degenerates_to_two_sample() {
        let dist = euclid(&[0.1, 0.7, 1.4, -0.2, 0.5]);
        let groups = GroupedSample::from_sizes(&[2, 3]).unwrap();
        let table = bd_pairwise(&dist, &groups).unwrap();
        assert_eq!(table.get(0, 1), bd_two_sample(&dist, &groups).unwrap());
    }

    #[test]
    fn pairwise_identical_groups_are_zero() {
        let dist = euclid(&[1.0, 2.0, 1.0, 2.0, 1.0, 2.0]);
        let groups = GroupedSample::from_sizes(&[2, 2, 2]).unwrap();
        let table = bd_pairwise(&dist, &groups).unwrap();
        for (_, _, v) in table.entries() {
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn pairwise_matches_independent_oracles() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let data: Vec<f64> = (0..12).map(|_| rng.random::<f64>() * 3.0).collect();
        let dist = euclid(&data);
        let groups = GroupedSample::from_labels(&[0, 1, 2, 0, 1, 2, 0, 1, 2, 0, 1, 2]).unwrap();
        let table = bd_pairwise(&dist, &groups).unwrap();
        for (s, t, v) in table.entries() {
            let oracle_v =
                oracle::naive_bd_indexed(&dist, &groups.group_indices(s), &groups.group_indices(t));
            assert!((v - oracle_v).abs() < 1e-12);
        }
    }

    #[test]
    fn aggregations_hand_case() {
        let table = PairwiseBdTable::from_entries(3, vec![1.0, 2.0, 3.0]);
        let (_, agg) = bd_k_sample(&table, BdKind::Sum);
        assert_eq!(agg.sum, 6.0);
        assert_eq!(agg.summax, 5.0);
        assert_eq!(agg.max, 5.0);
    }

    #[test]
    fn aggregations_degenerate_for_two_groups() {
        let table = PairwiseBdTable::from_entries(2, vec![0.7]);
        let (primary, agg) = bd_k_sample(&table, BdKind::Max);
        assert_eq!(primary, 0.7);
        assert_eq!(agg.as_array(), [0.7, 0.7, 0.7]);
    }

    #[test]
    fn aggregations_equal_entries() {
        let c = 0.25;
        let table = PairwiseBdTable::from_entries(4, vec![c; 6]);
        let (_, agg) = bd_k_sample(&table, BdKind::Sum);
        assert_eq!(agg.sum, 6.0 * c);
        assert_eq!(agg.summax, 3.0 * c);
        assert_eq!(agg.max, 3.0 * c);
    }

    fn direct_pair_ranks(
        dist: &DistanceMatrix,
        labels: &[usize],
        (s, t): (usize, usize),
    ) -> ShuffledPairRanks {
        let idx_s: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == s).collect();
        let idx_t: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == t).collect();
        let pair: Vec<usize> = idx_s.iter().chain(idx_t.iter()).copied().collect();
        let rank_of = |indices: &[usize]| {
            let sub = dist.submatrix(indices);
            let rs = rowwise_rank(&sub);
            (0..indices.len())
                .flat_map(|i| rs.rank_row(i).to_vec())
                .collect::<Vec<u32>>()
        };
        ShuffledPairRanks {
            n_s: idx_s.len(),
            n_t: idx_t.len(),
            own_s: rank_of(&idx_s),
            own_t: rank_of(&idx_t),
            pooled: rank_of(&pair),
        }
    }

    #[test]
    fn reconstruction_identity_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let data: Vec<f64> = (0..10).map(|_| rng.random_range(0..8) as f64).collect();
        let dist = euclid(&data);
        let groups = GroupedSample::from_sizes(&[4, 6]).unwrap();
        let structures = rowwise_rank(&dist);
        let rebuilt =
            reconstruct_shuffled_ranks(&structures, groups.labels(), &groups, (0, 1)).unwrap();
        let direct = direct_pair_ranks(&dist, groups.labels(), (0, 1));
        assert_eq!(rebuilt, direct);
    }

    #[test]
    fn reconstruction_matches_direct_ranking_on_random_shuffles() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let k = rng.random_range(2..=4usize);
            let sizes: Vec<usize> = (0..k).map(|_| rng.random_range(2..6)).collect();
            let n: usize = sizes.iter().sum();
            let data: Vec<f64> = (0..n)
                .map(|_| {
                    if rng.random::<f64>() < 0.4 {
                        rng.random_range(0..4) as f64
                    } else {
                        rng.random::<f64>()
                    }
                })
                .collect();
            let dist = euclid(&data);
            let groups = GroupedSample::from_sizes(&sizes).unwrap();
            let structures = rowwise_rank(&dist);
            let mut labels = groups.labels().to_vec();
            labels.shuffle(&mut rng);
            for s in 0..k {
                for t in (s + 1)..k {
                    let rebuilt =
                        reconstruct_shuffled_ranks(&structures, &labels, &groups, (s, t)).unwrap();
                    let direct = direct_pair_ranks(&dist, &labels, (s, t));
                    assert_eq!(rebuilt, direct);
                    // The statistic from reconstructed ranks equals the
                    // statistic from the materialized shuffled pair exactly.
                    let idx: Vec<usize> = (0..n)
                        .filter(|&i| labels[i] == s)
                        .chain((0..n).filter(|&i| labels[i] == t))
                        .collect();
                    let sub = dist.submatrix(&idx);
                    let sub_groups =
                        GroupedSample::from_sizes(&[rebuilt.n_s, rebuilt.n_t]).unwrap();
                    assert_eq!(
                        rebuilt.bd_statistic(),
                        bd_two_sample(&sub, &sub_groups).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn reconstruction_rejects_wrong_label_counts() {
        let dist = euclid(&[0.0, 1.0, 2.0, 3.0]);
        let groups = GroupedSample::from_sizes(&[2, 2]).unwrap();
        let structures = rowwise_rank(&dist);
        let err =
            reconstruct_shuffled_ranks(&structures, &[0, 0, 0, 1], &groups, (0, 1)).unwrap_err();
        assert!(matches!(err, Error::LabelCountMismatch { .. }));
    }

    #[test]
    fn monotone_transform_leaves_bd_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let data: Vec<f64> = (0..14).map(|_| rng.random::<f64>() * 4.0).collect();
        let dist = euclid(&data);
        let transformed = DistanceMatrix::from_flat(
            dist.n(),
            dist.as_slice().iter().map(|&d| d * d + 2.0 * d).collect(),
        )
        .unwrap();
        let groups = GroupedSample::from_sizes(&[6, 8]).unwrap();
        assert_eq!(
            bd_two_sample(&dist, &groups).unwrap(),
            bd_two_sample(&transformed, &groups).unwrap()
        );
    }
}
