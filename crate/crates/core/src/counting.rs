//! Order and rank primitives: the merge-sort "count of no-larger numbers
//! after self" routine and tie-inclusive row-wise ranking of a distance
//! matrix.

use rayon::prelude::*;

use crate::types::{DistanceMatrix, RankStructures};

/// Output of [`count_leq_after_self`]: the input sequence sorted in place by
/// the merge passes, and `numbers[j] = #{t > j : values[t] <= values[j]}`
/// indexed by the original positions.
#[derive(Debug, Clone, PartialEq)]
pub struct CountResult {
    pub values: Vec<f64>,
    pub numbers: Vec<u32>,
}

/// For every position, count the later elements that are less than or equal
/// to it, in `O(n log n)` by an augmented merge sort.
///
/// During a merge, an element of the left half picks up the number of right
/// half elements already merged; ties merge the right element first, so
/// equal elements on the right are included in the count.
pub fn count_leq_after_self(values: &[f64]) -> CountResult {
    let mut values = values.to_vec();
    let mut numbers = vec![0u32; values.len()];
    let mut counter = MergeCounter::new(values.len());
    counter.count(&mut values, &mut numbers);
    CountResult { values, numbers }
}

/// Reusable scratch buffers for the merge-sort counter, for callers that run
/// it once per matrix row.
#[derive(Debug)]
pub struct MergeCounter {
    index: Vec<u32>,
    tmp_values: Vec<f64>,
    tmp_index: Vec<u32>,
}

impl MergeCounter {
    pub fn new(capacity: usize) -> Self {
        Self {
            index: Vec::with_capacity(capacity),
            tmp_values: Vec::with_capacity(capacity),
            tmp_index: Vec::with_capacity(capacity),
        }
    }

    /// Sort `values` in place and write the after-self counts into `numbers`
    /// (indexed by original position). `numbers` must be zeroed by the caller
    /// and have the same length as `values`.
    pub fn count(&mut self, values: &mut [f64], numbers: &mut [u32]) {
        let n = values.len();
        debug_assert_eq!(numbers.len(), n);
        if n < 2 {
            return;
        }
        self.index.clear();
        self.index.extend(0..n as u32);
        self.tmp_values.resize(n, 0.0);
        self.tmp_index.resize(n, 0);
        merge_sort_count(
            values,
            &mut self.index,
            numbers,
            &mut self.tmp_values,
            &mut self.tmp_index,
            0,
            n - 1,
        );
    }
}

fn merge_sort_count(
    values: &mut [f64],
    index: &mut [u32],
    numbers: &mut [u32],
    tmp_values: &mut [f64],
    tmp_index: &mut [u32],
    start: usize,
    end: usize,
) {
    if end <= start {
        return;
    }
    let mid = (start + end) / 2;
    merge_sort_count(values, index, numbers, tmp_values, tmp_index, start, mid);
    merge_sort_count(values, index, numbers, tmp_values, tmp_index, mid + 1, end);

    tmp_values[start..=end].copy_from_slice(&values[start..=end]);
    tmp_index[start..=end].copy_from_slice(&index[start..=end]);

    let mut left = start;
    let mut right = mid + 1;
    let mut out = start;
    while left <= mid && right <= end {
        if tmp_values[left] < tmp_values[right] {
            numbers[tmp_index[left] as usize] += (right - mid - 1) as u32;
            values[out] = tmp_values[left];
            index[out] = tmp_index[left];
            left += 1;
        } else {
            values[out] = tmp_values[right];
            index[out] = tmp_index[right];
            right += 1;
        }
        out += 1;
    }
    while left <= mid {
        numbers[tmp_index[left] as usize] += (right - mid - 1) as u32;
        values[out] = tmp_values[left];
        index[out] = tmp_index[left];
        left += 1;
        out += 1;
    }
    while right <= end {
        values[out] = tmp_values[right];
        index[out] = tmp_index[right];
        right += 1;
        out += 1;
    }
}

/// Tie-inclusive rank and order structures of every row of `dist`.
///
/// `rank[i][j] = #{t : d[i][t] <= d[i][j]}` and `order[i]` holds the column
/// indices of row `i` sorted by ascending distance, ties by ascending column
/// index. Rows are ranked concurrently; the result does not depend on the
/// number of workers.
pub fn rowwise_rank(dist: &DistanceMatrix) -> RankStructures {
    let n = dist.n();
    let mut rank = vec![0u32; n * n];
    let mut order = vec![0u32; n * n];
    rank.par_chunks_mut(n)
        .zip(order.par_chunks_mut(n))
        .enumerate()
        .for_each(|(i, (rank_row, order_row))| {
            rank_row_of(dist.row(i), rank_row, order_row);
        });
    RankStructures::new(n, rank, order)
}

/// Rank a single row into caller-provided buffers.
pub(crate) fn rank_row_of(row: &[f64], rank_row: &mut [u32], order_row: &mut [u32]) {
    let n = row.len();
    for (j, slot) in order_row.iter_mut().enumerate() {
        *slot = j as u32;
    }
    order_row.sort_by(|&a, &b| {
        row[a as usize]
            .partial_cmp(&row[b as usize])
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut start = 0;
    while start < n {
        let value = row[order_row[start] as usize];
        let mut end = start + 1;
        while end < n && row[order_row[end] as usize] == value {
            end += 1;
        }
        for &col in &order_row[start..end] {
            rank_row[col as usize] = end as u32;
        }
        start = end;
    }
}
