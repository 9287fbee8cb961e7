//! Core data types shared by the statistic and test modules.

use serde::Serialize;

use crate::error::{Error, Result};

/// Absolute tolerance used when checking symmetry and the zero diagonal of a
/// raw distance table. Violations within the tolerance are repaired
/// (off-diagonal pairs averaged, diagonal forced to zero) so that externally
/// computed matrices with floating-point artifacts are accepted unchanged in
/// spirit; violations beyond it are rejected.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

/// A validated symmetric pairwise-distance table with zero diagonal.
///
/// This is the sole geometry interface: every statistic consumes distances
/// only through comparisons `d(x, z) <= d(x, y)`, so the triangle inequality
/// is deliberately not required and any dissimilarity table qualifies.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>, // row-major n x n
}

impl DistanceMatrix {
    /// Validate a raw square table given as rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NonSquare {
                    rows: n,
                    row: i,
                    cols: row.len(),
                });
            }
        }
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            data.extend_from_slice(row);
        }
        Self::from_flat(n, data)
    }

    /// Validate a raw square table given in row-major order.
    ///
    /// Checks: finiteness, nonnegativity, symmetry within
    /// [`SYMMETRY_TOLERANCE`], diagonal magnitude within the same tolerance.
    /// Accepted tables are then repaired: off-diagonal pairs are averaged and
    /// the diagonal is set to exactly zero.
    pub fn from_flat(n: usize, mut data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::NonSquare {
                rows: n,
                row: 0,
                cols: if n == 0 { data.len() } else { data.len() / n },
            });
        }
        for i in 0..n {
            for j in 0..n {
                let v = data[i * n + j];
                if !v.is_finite() {
                    return Err(Error::NonFiniteEntry { row: i, col: j });
                }
                if v < 0.0 {
                    return Err(Error::NegativeEntry {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
            }
        }
        for i in 0..n {
            let diag = data[i * n + i];
            if diag.abs() > SYMMETRY_TOLERANCE {
                return Err(Error::NonzeroDiagonal { row: i, value: diag });
            }
            for j in (i + 1)..n {
                let a = data[i * n + j];
                let b = data[j * n + i];
                let delta = (a - b).abs();
                if delta > SYMMETRY_TOLERANCE {
                    return Err(Error::AsymmetricBeyondTolerance {
                        row: i,
                        col: j,
                        delta,
                        tolerance: SYMMETRY_TOLERANCE,
                    });
                }
            }
        }
        // Repair: exact symmetry by averaging, exact zero diagonal.
        for i in 0..n {
            data[i * n + i] = 0.0;
            for j in (i + 1)..n {
                let m = 0.5 * (data[i * n + j] + data[j * n + i]);
                data[i * n + j] = m;
                data[j * n + i] = m;
            }
        }
        Ok(Self { n, data })
    }

    /// Build directly from entries already known to satisfy the invariants
    /// (used by the metric constructors, which produce exact symmetry).
    pub(crate) fn from_valid(n: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        Self { n, data }
    }

    /// Number of observations.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Distance between observations `i` and `j`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Row `i` as a slice of length `n`.
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// The validated table in row-major order.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Restriction to the given observation indices, in the given order.
    pub fn submatrix(&self, indices: &[usize]) -> DistanceMatrix {
        let m = indices.len();
        let mut data = Vec::with_capacity(m * m);
        for &i in indices {
            let row = self.row(i);
            for &j in indices {
                data.push(row[j]);
            }
        }
        DistanceMatrix { n: m, data }
    }
}

/// A pooled sample of `N` observations partitioned into `K` labeled groups.
///
/// Group labels are `0..K`. `cumulative[k]` is the number of observations in
/// groups `0..k`, so group `k` occupies positions `cumulative[k]..cumulative[k] + sizes[k]`
/// of the block-ordered pooled sample.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedSample {
    labels: Vec<usize>,
    sizes: Vec<usize>,
    cumulative: Vec<usize>,
}

impl GroupedSample {
    /// Build from a label sequence. Labels must cover `0..K` with every group
    /// nonempty; the derived sizes and cumulative offsets are canonical in the
    /// label values, not in their order of appearance.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidLabels {
                reason: "label vector is empty".into(),
            });
        }
        let k = labels.iter().copied().max().unwrap() + 1;
        let mut sizes = vec![0usize; k];
        for &l in labels {
            sizes[l] += 1;
        }
        for (g, &s) in sizes.iter().enumerate() {
            if s == 0 {
                return Err(Error::EmptyGroup { group: g });
            }
        }
        let cumulative = cumulative_sizes(&sizes);
        Ok(Self {
            labels: labels.to_vec(),
            sizes,
            cumulative,
        })
    }

    /// Build a block-ordered sample (`sizes[0]` zeros, then `sizes[1]` ones, ...).
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidLabels {
                reason: "size vector is empty".into(),
            });
        }
        for (g, &s) in sizes.iter().enumerate() {
            if s == 0 {
                return Err(Error::EmptyGroup { group: g });
            }
        }
        let mut labels = Vec::with_capacity(sizes.iter().sum());
        for (g, &s) in sizes.iter().enumerate() {
            labels.extend(std::iter::repeat(g).take(s));
        }
        let cumulative = cumulative_sizes(sizes);
        Ok(Self {
            labels,
            sizes: sizes.to_vec(),
            cumulative,
        })
    }

    /// Group label of each pooled observation.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Per-group counts `n_k`.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Cumulative sizes `(0, n_0, n_0 + n_1, ...)`, length `K`.
    pub fn cumulative(&self) -> &[usize] {
        &self.cumulative
    }

    /// Number of groups.
    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    /// Total number of observations.
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Pooled indices of group `g`, in ascending order.
    pub fn group_indices(&self, g: usize) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == g)
            .map(|(i, _)| i)
            .collect()
    }
}

fn cumulative_sizes(sizes: &[usize]) -> Vec<usize> {
    let mut cumulative = Vec::with_capacity(sizes.len());
    let mut acc = 0;
    for &s in sizes {
        cumulative.push(acc);
        acc += s;
    }
    cumulative
}

/// An empirical ball-proportion table kept as integer counts over a common
/// denominator, so downstream accumulation stays exact until the final
/// statistic is assembled.
#[derive(Debug, Clone, PartialEq)]
pub struct ProportionTable {
    rows: usize,
    cols: usize,
    counts: Vec<u32>,
    denominator: u32,
}

impl ProportionTable {
    pub fn new(rows: usize, cols: usize, counts: Vec<u32>, denominator: u32) -> Self {
        debug_assert_eq!(counts.len(), rows * cols);
        debug_assert!(counts.iter().all(|&c| c <= denominator));
        Self {
            rows,
            cols,
            counts,
            denominator,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Raw count of points inside the ball for entry `(i, j)`.
    #[inline]
    pub fn count(&self, i: usize, j: usize) -> u32 {
        self.counts[i * self.cols + j]
    }

    /// Sample size the counts are taken over.
    pub fn denominator(&self) -> u32 {
        self.denominator
    }

    /// The proportion `count / denominator` as a float.
    #[inline]
    pub fn proportion(&self, i: usize, j: usize) -> f64 {
        f64::from(self.count(i, j)) / f64::from(self.denominator)
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }
}

/// Row-wise rank and order structures of a distance matrix.
///
/// `rank[i][j]` is the tie-inclusive rank `#{t : d[i][t] <= d[i][j]}`, and
/// `order[i]` lists the column indices of row `i` sorted by ascending
/// distance, ties broken by ascending column index. Because the rank of an
/// element equals the position (1-based) of the last element of its tie run
/// in the sorted order, the pair `(rank, order)` also encodes the tie-run
/// boundaries of every row.
#[derive(Debug, Clone, PartialEq)]
pub struct RankStructures {
    n: usize,
    rank: Vec<u32>,
    order: Vec<u32>,
}

impl RankStructures {
    pub(crate) fn new(n: usize, rank: Vec<u32>, order: Vec<u32>) -> Self {
        debug_assert_eq!(rank.len(), n * n);
        debug_assert_eq!(order.len(), n * n);
        Self { n, rank, order }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Tie-inclusive rank of `d[i][j]` within row `i`.
    #[inline]
    pub fn rank(&self, i: usize, j: usize) -> u32 {
        self.rank[i * self.n + j]
    }

    #[inline]
    pub fn rank_row(&self, i: usize) -> &[u32] {
        &self.rank[i * self.n..(i + 1) * self.n]
    }

    /// Column indices of row `i` in ascending distance order.
    #[inline]
    pub fn order_row(&self, i: usize) -> &[u32] {
        &self.order[i * self.n..(i + 1) * self.n]
    }
}

/// Inclusive index bounds of a ball intersected with a sorted sample:
/// the ball covers sorted positions `lower..=upper`, so the membership count
/// is `upper - lower + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundPair {
    pub lower: usize,
    pub upper: usize,
}

impl BoundPair {
    #[inline]
    pub fn count(&self) -> usize {
        self.upper - self.lower + 1
    }
}

/// Aggregation rule for the K-sample Ball Divergence statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BdKind {
    /// Sum of all pairwise two-sample statistics.
    Sum,
    /// Largest per-group sum of that group's pairwise statistics.
    #[serde(rename = "summax")]
    SumMax,
    /// Sum of the K-1 largest pairwise statistics.
    Max,
}

impl BdKind {
    pub const ALL: [BdKind; 3] = [BdKind::Sum, BdKind::SumMax, BdKind::Max];

    pub fn name(&self) -> &'static str {
        match self {
            BdKind::Sum => "sum",
            BdKind::SumMax => "summax",
            BdKind::Max => "max",
        }
    }
}

/// Weight applied to each ball term of the Ball Covariance statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BcovWeight {
    /// Unit weight.
    Constant,
    /// Reciprocal of the product of marginal ball proportions.
    Probability,
    /// Reciprocal of the product of marginal ball-indicator variances.
    #[serde(rename = "chisquare")]
    ChiSquare,
}

impl BcovWeight {
    pub const ALL: [BcovWeight; 3] = [
        BcovWeight::Constant,
        BcovWeight::Probability,
        BcovWeight::ChiSquare,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BcovWeight::Constant => "constant",
            BcovWeight::Probability => "probability",
            BcovWeight::ChiSquare => "chisquare",
        }
    }
}

/// One statistic variant with its permutation p-value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariantOutcome {
    pub name: String,
    pub statistic: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
}

/// Outcome of a Ball test: the selected variant is primary, and
/// `complete_info` always carries all three variants of the family computed
/// from the same replicate stream.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    pub statistic: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    pub replicates: usize,
    /// Per-group sizes for the K-sample test, `[N]` for independence tests.
    pub sizes: Vec<usize>,
    /// Statistic family, e.g. "2-sample Ball Divergence Test".
    pub method: String,
    /// Selected variant within the family.
    pub variant: String,
    pub complete_info: Vec<VariantOutcome>,
}
