//! Classical (Torgerson) multidimensional scaling into two dimensions.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::similarity::DistanceMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdsPoint<T: Scalar = f64> {
    pub product_id: String,
    pub x: T,
    pub y: T,
}

/// Double-centers the squared distances, keeps the two largest eigenpairs
/// and scales each eigenvector by the square root of its (non-negative)
/// eigenvalue; eigenvalues within rounding of zero count as zero. Each axis is flipped so its first clearly nonzero
/// coordinate is positive.
///
/// The eigendecomposition runs in `f64` whatever the scalar type.
pub fn mds_project<T: Scalar>(dm: &DistanceMatrix<T>) -> Result<Vec<MdsPoint<T>>> {
    let n = dm.len();
    if n < 2 {
        return Err(Error::TooFewSeries { needed: 2, available: n });
    }
    let sq = DMatrix::<f64>::from_fn(n, n, |i, j| {
        let d = dm.get(i, j).as_f64();
        d * d
    });
    if sq.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("distance matrix entry".into()));
    }
    let row_means: Vec<f64> = (0..n).map(|i| sq.row(i).sum() / n as f64).collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    let b = DMatrix::<f64>::from_fn(n, n, |i, j| -0.5 * (sq[(i, j)] - row_means[i] - row_means[j] + grand));

    let eig = SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });

    // Eigenvalues at rounding level are zero; their square roots would
    // otherwise leak ~1e-8 coordinates into degenerate axes.
    let top = eig.eigenvalues[order[0]].max(0.0);
    let floor = top * n as f64 * f64::EPSILON;
    let mut axes = [vec![0.0; n], vec![0.0; n]];
    for (axis, &k) in axes.iter_mut().zip(&order) {
        let lambda = eig.eigenvalues[k];
        let scale = if lambda > floor { lambda.sqrt() } else { 0.0 };
        for (i, c) in axis.iter_mut().enumerate() {
            *c = eig.eigenvectors[(i, k)] * scale;
        }
        let peak = axis.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        if let Some(first) = axis.iter().find(|v| v.abs() > 1e-9 * peak) {
            if *first < 0.0 {
                axis.iter_mut().for_each(|v| *v = -*v);
            }
        }
    }
    if axes.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("embedding coordinate".into()));
    }
    Ok(dm
        .ids()
        .iter()
        .enumerate()
        .map(|(i, id)| MdsPoint {
            product_id: id.clone(),
            x: T::lit(axes[0][i]),
            y: T::lit(axes[1][i]),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("p{i}")).collect()
    }

    #[test]
    fn two_points_keep_their_distance() {
        let dm = DistanceMatrix::<f64>::from_rows(ids(2), vec![vec![0.0, 3.5], vec![3.5, 0.0]]).unwrap();
        let p = mds_project(&dm).unwrap();
        let d = ((p[0].x - p[1].x).powi(2) + (p[0].y - p[1].y).powi(2)).sqrt();
        assert!((d - 3.5).abs() < 1e-12);
        assert!(p[0].x > 0.0);
        assert!(p.iter().all(|q| q.y.abs() < 1e-12));
    }

    #[test]
    fn rejects_single_point() {
        let dm = DistanceMatrix::from_rows(ids(1), vec![vec![0.0]]).unwrap();
        assert!(mds_project(&dm).is_err());
    }

    #[test]
    fn identical_points_collapse() {
        let dm = DistanceMatrix::from_rows(ids(3), vec![vec![0.0; 3]; 3]).unwrap();
        let p = mds_project(&dm).unwrap();
        assert!(p.iter().all(|q| q.x == 0.0 && q.y == 0.0));
    }

    #[test]
    fn output_is_reproducible() {
        let rows = vec![vec![0.0, 1.0, 2.0, 2.5], vec![1.0, 0.0, 1.2, 2.0], vec![2.0, 1.2, 0.0, 1.1], vec![2.5, 2.0, 1.1, 0.0]];
        let dm = DistanceMatrix::from_rows(ids(4), rows).unwrap();
        assert_eq!(mds_project(&dm).unwrap(), mds_project(&dm).unwrap());
    }
}
