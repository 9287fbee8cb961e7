//! Built-in distance matrices for raw coordinate data.
//!
//! Only the two geometries the tests need natively are provided; any other
//! metric enters as a precomputed [`DistanceMatrix`].

use crate::error::{Error, Result};
use crate::types::DistanceMatrix;

/// How far a row norm may deviate from 1 before a point is rejected instead
/// of being renormalized onto the unit sphere.
const UNIT_NORM_TOLERANCE: f64 = 1e-6;

/// A set of `N` points with `p` real coordinates each.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    n: usize,
    p: usize,
    data: Vec<f64>, // row-major n x p
}

impl PointSet {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, |r| r.len());
        if p == 0 {
            return Err(Error::InvalidLabels {
                reason: "point set needs at least one coordinate column".into(),
            });
        }
        let mut data = Vec::with_capacity(n * p);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != p {
                return Err(Error::NonSquare {
                    rows: p,
                    row: i,
                    cols: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFiniteEntry { row: i, col: j });
                }
                data.push(v);
            }
        }
        Ok(Self { n, p, data })
    }

    /// Univariate convenience constructor.
    pub fn from_column(values: &[f64]) -> Result<Self> {
        Self::from_rows(&values.iter().map(|&v| vec![v]).collect::<Vec<_>>())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.p..(i + 1) * self.p]
    }
}

/// Pairwise Euclidean distances.
pub fn euclidean_distances(points: &PointSet) -> DistanceMatrix {
    let n = points.n();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        let ri = points.row(i);
        for j in (i + 1)..n {
            let rj = points.row(j);
            let d = ri
                .iter()
                .zip(rj.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            data[i * n + j] = d;
            data[j * n + i] = d;
        }
    }
    DistanceMatrix::from_valid(n, data)
}

/// Pairwise great-circle distances between points on the unit sphere.
///
/// Rows whose Euclidean norm deviates from 1 by at most `1e-6` are
/// renormalized before use; rows further from the sphere are rejected.
/// Distances are `arccos` of the inner product, clamped to `[-1, 1]` so that
/// rounding cannot produce NaN, and lie in `[0, pi]`.
pub fn great_circle_distances(points: &PointSet) -> Result<DistanceMatrix> {
    let n = points.n();
    let p = points.dim();
    let mut unit = Vec::with_capacity(n * p);
    for i in 0..n {
        let row = points.row(i);
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroNormRow { row: i });
        }
        if (norm - 1.0).abs() > UNIT_NORM_TOLERANCE {
            return Err(Error::NotOnUnitSphere { row: i, norm });
        }
        unit.extend(row.iter().map(|v| v / norm));
    }
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        let ri = &unit[i * p..(i + 1) * p];
        for j in (i + 1)..n {
            let rj = &unit[j * p..(j + 1) * p];
            let dot: f64 = ri.iter().zip(rj.iter()).map(|(a, b)| a * b).sum();
            let d = dot.clamp(-1.0, 1.0).acos();
            data[i * n + j] = d;
            data[j * n + i] = d;
        }
    }
    Ok(DistanceMatrix::from_valid(n, data))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_univariate() {
        let p = PointSet::from_column(&[0.0, 3.0]).unwrap();
        let d = euclidean_distances(&p);
        assert_eq!(d.get(0, 1), 3.0);
        assert_eq!(d.get(1, 0), 3.0);
    }

    #[test]
    fn euclidean_3_4_5() {
        let p = PointSet::from_rows(&[vec![0.0, 0.0], vec![3.0, 4.0]]).unwrap();
        let d = euclidean_distances(&p);
        assert_eq!(d.get(0, 1), 5.0);
    }

    #[test]
    fn euclidean_identical_rows() {
        let p = PointSet::from_rows(&[vec![1.5, -2.0], vec![1.5, -2.0]]).unwrap();
        let d = euclidean_distances(&p);
        assert_eq!(d.get(0, 1), 0.0);
    }

    #[test]
    fn great_circle_identity_antipodal_orthogonal() {
        let p = PointSet::from_rows(&[
            vec![1.0, 0.0],
            vec![1.0, 0.0],
            vec![-1.0, 0.0],
            vec![0.0, 1.0],
        ])
        .unwrap();
        let d = great_circle_distances(&p).unwrap();
        assert_eq!(d.get(0, 1), 0.0);
        assert!((d.get(0, 2) - std::f64::consts::PI).abs() < 1e-15);
        assert!((d.get(0, 3) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn great_circle_renormalizes_near_unit_rows() {
        let p = PointSet::from_rows(&[vec![1.0 + 5e-7, 0.0], vec![0.0, 1.0 - 5e-7]]).unwrap();
        let d = great_circle_distances(&p).unwrap();
        assert!((d.get(0, 1) - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn great_circle_rejects_off_sphere_rows() {
        let p = PointSet::from_rows(&[vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(
            great_circle_distances(&p),
            Err(Error::NotOnUnitSphere { row: 0, .. })
        ));
        let z = PointSet::from_rows(&[vec![0.0, 0.0]]).unwrap();
        assert!(matches!(
            great_circle_distances(&z),
            Err(Error::ZeroNormRow { row: 0 })
        ));
    }

    #[test]
    fn outputs_validate_without_repair() {
        let p = PointSet::from_rows(&[
            vec![0.2, 0.4],
            vec![-1.3, 2.0],
            vec![0.0, 0.0],
            vec![5.0, -0.1],
        ])
        .unwrap();
        let d = euclidean_distances(&p);
        let revalidated = DistanceMatrix::from_flat(d.n(), d.as_slice().to_vec()).unwrap();
        assert_eq!(d, revalidated);

        let s = PointSet::from_rows(&[vec![1.0, 0.0], vec![0.6, 0.8], vec![0.0, -1.0]]).unwrap();
        let g = great_circle_distances(&s).unwrap();
        let revalidated = DistanceMatrix::from_flat(g.n(), g.as_slice().to_vec()).unwrap();
        assert_eq!(g, revalidated);
        for i in 0..g.n() {
            for j in 0..g.n() {
                assert!(g.get(i, j) >= 0.0 && g.get(i, j) <= std::f64::consts::PI);
            }
        }
    }
}
