//! Least-squares lag regressions: AR(p) with intercept and ridge on lags.

use super::FittedState;
use crate::error::Result;
use crate::linalg::{cholesky_solve, ols, Matrix};
use crate::scalar::Scalar;

/// Rows `[x_{t-1}, ..., x_{t-lags}]` with targets `x_t` for every `t >= lags`.
fn lag_design<T: Scalar>(xs: &[T], lags: usize) -> (Vec<Vec<T>>, Vec<T>) {
    let rows = (lags..xs.len()).map(|t| (1..=lags).map(|i| xs[t - i]).collect()).collect();
    let targets = xs[lags..].to_vec();
    (rows, targets)
}

pub(super) fn fit_ar<T: Scalar>(xs: &[T], order: usize) -> Result<FittedState<T>> {
    let (lags, y) = lag_design(xs, order);
    let rows: Vec<Vec<T>> = lags
        .into_iter()
        .map(|r| std::iter::once(T::one()).chain(r).collect())
        .collect();
    let fit = ols(&Matrix::from_rows(&rows), &y)?;
    Ok(FittedState::Ar {
        intercept: fit.coef[0],
        coef: fit.coef[1..].to_vec(),
    })
}

/// Ridge on lag features with an unpenalized intercept (centered solve).
pub(super) fn fit_ridge<T: Scalar>(xs: &[T], lags: usize, penalty: T) -> Result<FittedState<T>> {
    let (rows, y) = lag_design(xs, lags);
    let n = T::from_count(rows.len());
    let x_mean: Vec<T> = (0..lags).map(|j| rows.iter().map(|r| r[j]).sum::<T>() / n).collect();
    let y_mean = y.iter().copied().sum::<T>() / n;

    let mut gram = Matrix::zeros(lags, lags);
    let mut rhs = vec![T::zero(); lags];
    for (r, &yt) in rows.iter().zip(&y) {
        let yc = yt - y_mean;
        for i in 0..lags {
            let xi = r[i] - x_mean[i];
            rhs[i] = rhs[i] + xi * yc;
            for j in 0..=i {
                let v = gram.get(i, j) + xi * (r[j] - x_mean[j]);
                gram.set(i, j, v);
            }
        }
    }
    for i in 0..lags {
        for j in 0..i {
            gram.set(j, i, gram.get(i, j));
        }
        gram.set(i, i, gram.get(i, i) + penalty);
    }
    let coef = cholesky_solve(&gram, &rhs)?;
    let intercept = y_mean - coef.iter().zip(&x_mean).map(|(&b, &m)| b * m).sum::<T>();
    Ok(FittedState::Ridge { intercept, coef })
}

/// `intercept + Σ coef[i] · x_{n-1-i}`.
pub(super) fn apply_lags<T: Scalar>(xs: &[T], intercept: T, coef: &[T]) -> T {
    let n = xs.len();
    coef.iter()
        .enumerate()
        .fold(intercept, |acc, (i, &c)| acc + c * xs[n - 1 - i])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ar_recovers_exact_recursion() {
        // x_t = 2 + 0.5 x_{t-1} - 0.2 x_{t-2}, short enough to stay off the fixed point.
        let mut xs: Vec<f64> = vec![1.0, 7.0];
        for t in 2..12 {
            xs.push(2.0 + 0.5 * xs[t - 1] - 0.2 * xs[t - 2]);
        }
        match fit_ar(&xs, 2).unwrap() {
            FittedState::Ar { intercept, coef } => {
                assert!((intercept - 2.0).abs() < 1e-8, "{intercept}");
                assert!((coef[0] - 0.5).abs() < 1e-8 && (coef[1] + 0.2).abs() < 1e-8);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ridge_zero_penalty_matches_ols() {
        let xs: Vec<f64> = (0..40).map(|t| ((t * 7919) % 23) as f64 + 0.1 * t as f64).collect();
        let (ri, rc) = match fit_ridge(&xs, 3, 0.0).unwrap() {
            FittedState::Ridge { intercept, coef } => (intercept, coef),
            other => panic!("{other:?}"),
        };
        let (ai, ac) = match fit_ar(&xs, 3).unwrap() {
            FittedState::Ar { intercept, coef } => (intercept, coef),
            other => panic!("{other:?}"),
        };
        assert!((ri - ai).abs() < 1e-8);
        for (a, b) in rc.iter().zip(&ac) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn ridge_penalty_shrinks() {
        let xs: Vec<f64> = (0..40).map(|t| ((t * 31) % 17) as f64).collect();
        let norm = |p: f64| match fit_ridge(&xs, 12, p).unwrap() {
            FittedState::Ridge { coef, .. } => coef.iter().map(|c| c * c).sum::<f64>(),
            _ => unreachable!(),
        };
        assert!(norm(100.0) < norm(1.0));
    }

    #[test]
    fn apply_lags_order() {
        assert_eq!(apply_lags(&[1.0, 2.0, 3.0], 10.0, &[1.0, 0.1]), 10.0 + 3.0 + 0.2);
    }
}
