use serde::{Deserialize, Serialize};

use super::mackinnon;
use crate::dataset::DemandSeries;
use crate::error::{Error, Result};
use crate::linalg::{ols, Matrix};
use crate::scalar::{negligible_spread, Scalar};

pub const MIN_ADF_LENGTH: usize = 20;
pub const SIGNIFICANCE: f64 = 0.05;
const MIN_OBSERVATIONS: usize = 10;

/// Augmented Dickey-Fuller test with a constant and no trend term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfResult<T: Scalar = f64> {
    pub statistic: T,
    pub p_value: T,
    pub lag_order: usize,
    pub nobs: usize,
    /// `p_value < 0.05`.
    pub stationary: bool,
}

/// `floor(12 · (n / 100)^(1/4))`, lowered until at least ten observations
/// and one residual degree of freedom remain.
pub fn max_lag_order(n: usize) -> usize {
    let mut p = (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize;
    while p > 0 && (n - 1 - p < MIN_OBSERVATIONS || n - 1 - p <= p + 2) {
        p -= 1;
    }
    p
}

/// Regression of `Δx_t` on `[x_{t-1}, 1, Δx_{t-1}, ..., Δx_{t-lags}]` over
/// `t` such that the first difference used has index `first`.
fn design<T: Scalar>(xs: &[T], dx: &[T], lags: usize, first: usize) -> (Matrix<T>, Vec<T>) {
    let rows: Vec<Vec<T>> = (first..dx.len())
        .map(|j| {
            let mut row = Vec::with_capacity(lags + 2);
            row.push(xs[j]);
            row.push(T::one());
            row.extend((1..=lags).map(|i| dx[j - i]));
            row
        })
        .collect();
    (Matrix::from_rows(&rows), dx[first..].to_vec())
}

/// Lag order chosen by BIC over `0..=max_lag_order(n)` on a common sample,
/// then refitted on all available observations. The statistic is the
/// t-ratio of the `x_{t-1}` coefficient; its p-value comes from the
/// MacKinnon table.
pub fn adf_test<T: Scalar>(series: &DemandSeries<T>) -> Result<AdfResult<T>> {
    let xs = &series.values;
    let n = xs.len();
    if n < MIN_ADF_LENGTH {
        return Err(Error::TooShort {
            needed: MIN_ADF_LENGTH,
            available: n,
        });
    }
    if negligible_spread(xs) {
        return Err(Error::ZeroVariance);
    }
    let dx: Vec<T> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let max_lag = max_lag_order(n);

    let mut best: Option<(T, usize)> = None;
    for lags in 0..=max_lag {
        let (x, y) = design(xs, &dx, lags, max_lag);
        let Ok(fit) = ols(&x, &y) else { continue };
        if !usable(fit.rss, &y) {
            continue;
        }
        let m = T::from_count(fit.nobs);
        let bic = m * (fit.rss / m).ln() + T::from_count(fit.coef.len()) * m.ln();
        if best.is_none_or(|(b, _)| bic < b) {
            best = Some((bic, lags));
        }
    }
    let (_, lag_order) = best.ok_or(Error::DegenerateRegression)?;

    let (x, y) = design(xs, &dx, lag_order, lag_order);
    let fit = ols(&x, &y)?;
    if !usable(fit.rss, &y) {
        return Err(Error::DegenerateRegression);
    }
    let se = fit.std_errors().ok_or(Error::DegenerateRegression)?;
    let statistic = fit.coef[0] / se[0];
    if !statistic.is_finite() {
        return Err(Error::DegenerateRegression);
    }
    let p_value = mackinnon::p_value(statistic.as_f64());
    Ok(AdfResult {
        statistic,
        p_value: T::lit(p_value),
        lag_order,
        nobs: fit.nobs,
        stationary: p_value < SIGNIFICANCE,
    })
}

/// A perfect fit leaves no residual variance to build a t-ratio from.
fn usable<T: Scalar>(rss: T, y: &[T]) -> bool {
    let tss: T = y.iter().map(|&v| v * v).sum();
    rss.is_finite() && rss > T::epsilon() * T::epsilon() * tss.max(T::min_positive_value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::month::MonthIndex;

    fn series(values: Vec<f64>) -> DemandSeries<f64> {
        DemandSeries::new("p", "t", MonthIndex::new(2015, 1).unwrap(), values)
    }

    #[test]
    fn lag_rule() {
        assert_eq!(max_lag_order(200), 14);
        assert_eq!(max_lag_order(100), 12);
        assert_eq!(max_lag_order(47), 9);
        // n = 20: Schwert gives 8, which leaves 11 observations.
        assert_eq!(max_lag_order(20), 8);
    }

    #[test]
    fn preconditions() {
        assert!(matches!(adf_test(&series(vec![1.0; 19])), Err(Error::TooShort { .. })));
        assert_eq!(adf_test(&series(vec![4.0; 30])).unwrap_err(), Error::ZeroVariance);
    }

    #[test]
    fn exact_line_never_panics() {
        let r = adf_test(&series((1..=50).map(f64::from).collect()));
        match r {
            Err(Error::DegenerateRegression) => {}
            Ok(a) => assert!(a.statistic.is_finite()),
            Err(e) => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn oscillating_series_is_stationary() {
        let xs: Vec<f64> = (0..60).map(|t| 10.0 + if t % 2 == 0 { 1.0 } else { -1.0 } + 0.01 * ((t * 7) % 5) as f64).collect();
        let a = adf_test(&series(xs)).unwrap();
        assert!(a.stationary, "{a:?}");
    }
}
