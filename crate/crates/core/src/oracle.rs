//! Literal O(N^3) evaluations of the Ball statistics, used as ground truth by
//! the test suites. Every ball membership is decided by the raw comparison
//! `d(center, z) <= d(center, boundary)` with no ranking shortcuts, and the
//! tie convention (closed balls, `<=`) is shared with the fast paths so that
//! agreement is exact up to summation order.
//!
//! This module is test support, not part of the supported API surface.

use crate::bcov::BcovTriple;
use crate::error::{Error, Result};
use crate::types::{BcovWeight, DistanceMatrix, GroupedSample};

/// Two-sample Ball Divergence straight from the definition.
pub fn naive_bd_two_sample(dist: &DistanceMatrix, groups: &GroupedSample) -> Result<f64> {
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
    Ok(naive_bd_indexed(dist, &g1, &g2))
}

/// Two-sample Ball Divergence over explicit index sets of the pooled matrix.
pub fn naive_bd_indexed(dist: &DistanceMatrix, g1: &[usize], g2: &[usize]) -> f64 {
    let part = |own: &[usize], other: &[usize]| -> f64 {
        let n_own = own.len() as f64;
        let n_other = other.len() as f64;
        let mut acc = 0.0;
        for &i in own {
            for &j in own {
                let radius = dist.get(i, j);
                let own_in = own.iter().filter(|&&t| dist.get(i, t) <= radius).count();
                let other_in = other.iter().filter(|&&t| dist.get(i, t) <= radius).count();
                let diff = own_in as f64 / n_own - other_in as f64 / n_other;
                acc += diff * diff;
            }
        }
        acc / (n_own * n_own)
    };
    part(g1, g2) + part(g2, g1)
}

/// Ball Covariance of K variables straight from the definition.
pub fn naive_bcov(dists: &[DistanceMatrix], weight: BcovWeight) -> Result<f64> {
    Ok(select(&naive_bcov_all(dists)?, weight))
}

/// All three weight variants from one definitional pass.
pub fn naive_bcov_all(dists: &[DistanceMatrix]) -> Result<BcovTriple> {
    let k = dists.len();
    if k < 2 {
        return Err(Error::TooFewVariables { got: k });
    }
    let n = dists[0].n();
    for d in dists {
        if d.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: d.n(),
            });
        }
    }
    let nf = n as f64;
    let mut constant = 0.0;
    let mut probability = 0.0;
    let mut chi_square = 0.0;
    for i in 0..n {
        for j in 0..n {
            let joint = (0..n)
                .filter(|&t| dists.iter().all(|d| d.get(i, t) <= d.get(i, j)))
                .count() as f64
                / nf;
            let marginals: Vec<f64> = dists
                .iter()
                .map(|d| (0..n).filter(|&t| d.get(i, t) <= d.get(i, j)).count() as f64 / nf)
                .collect();
            let product: f64 = marginals.iter().product();
            let base = (joint - product) * (joint - product);

            constant += base;
            // A closed ball always contains its center, so every marginal
            // proportion is at least 1/N; the zero guards are kept for safety.
            if marginals.iter().all(|&p| p > 0.0) {
                probability += base / product;
            }
            if marginals.iter().all(|&p| p > 0.0 && p < 1.0) {
                let variance: f64 = marginals.iter().map(|&p| p * (1.0 - p)).product();
                chi_square += base / variance;
            }
        }
    }
    let scale = nf * nf;
    Ok(BcovTriple {
        constant: constant / scale,
        probability: probability / scale,
        chi_square: chi_square / scale,
    })
}

fn select(triple: &BcovTriple, weight: BcovWeight) -> f64 {
    match weight {
        BcovWeight::Constant => triple.constant,
        BcovWeight::Probability => triple.probability,
        BcovWeight::ChiSquare => triple.chi_square,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{euclidean_distances, PointSet};

    fn euclid(values: &[f64]) -> DistanceMatrix {
        euclidean_distances(&PointSet::from_column(values).unwrap())
    }

    #[test]
    fn single_point_groups() {
        let dist = euclid(&[0.0, 1.0]);
        let groups = GroupedSample::from_sizes(&[1, 1]).unwrap();
        assert_eq!(naive_bd_two_sample(&dist, &groups).unwrap(), 2.0);
    }

    #[test]
    fn two_one_split_value_confirmed_by_hand() {
        // Group 1 = {0, 1}, group 2 = {2}. Working through every ball:
        // group-1 part sums to 1.5 / 4 and the singleton part is 1.
        let dist = euclid(&[0.0, 1.0, 2.0]);
        let groups = GroupedSample::from_sizes(&[2, 1]).unwrap();
        assert_eq!(naive_bd_two_sample(&dist, &groups).unwrap(), 1.375);
    }

    #[test]
    fn identical_groups_give_zero() {
        let dist = euclid(&[1.0, 2.0, 3.0, 1.0, 2.0, 3.0]);
        let groups = GroupedSample::from_sizes(&[3, 3]).unwrap();
        assert_eq!(naive_bd_two_sample(&dist, &groups).unwrap(), 0.0);
    }

    #[test]
    fn bcov_two_point_diagonal() {
        let d = euclid(&[0.0, 1.0]);
        let triple = naive_bcov_all(&[d.clone(), d]).unwrap();
        assert_eq!(triple.constant, 1.0 / 32.0);
    }

    #[test]
    fn bcov_degenerate_sample_is_zero() {
        let d = euclid(&[2.0, 2.0, 2.0]);
        for k in [2, 3] {
            let dists = vec![d.clone(); k];
            let triple = naive_bcov_all(&dists).unwrap();
            assert_eq!(triple.constant, 0.0);
            assert_eq!(triple.probability, 0.0);
            assert_eq!(triple.chi_square, 0.0);
        }
    }

    #[test]
    fn too_few_variables() {
        let d = euclid(&[0.0, 1.0]);
        assert!(matches!(
            naive_bcov(&[d], BcovWeight::Constant),
            Err(Error::TooFewVariables { got: 1 })
        ));
    }
}
