use serde::{Deserialize, Serialize};

use crate::dataset::DemandSeries;
use crate::error::{Error, Result};
use crate::scalar::{negligible_spread, Scalar};

/// Sample autocorrelation for lags `0..=max_lag`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcfResult<T: Scalar = f64> {
    pub max_lag: usize,
    /// `r[k]` for lag `k`; `r[0] == 1`.
    pub r: Vec<T>,
    /// `1.96 / sqrt(n)`, the 95% band under white noise.
    pub ci_halfwidth: T,
}

/// Biased estimator: lag-`k` cross products over the lag-0 sum of squares.
pub fn acf<T: Scalar>(series: &DemandSeries<T>, max_lag: usize) -> Result<AcfResult<T>> {
    let xs = &series.values;
    let n = xs.len();
    if n < max_lag + 2 {
        return Err(Error::TooShort {
            needed: max_lag + 2,
            available: n,
        });
    }
    if negligible_spread(xs) {
        return Err(Error::ZeroVariance);
    }
    let mean = xs.iter().copied().sum::<T>() / T::from_count(n);
    let dev: Vec<T> = xs.iter().map(|&x| x - mean).collect();
    let c0: T = dev.iter().map(|&d| d * d).sum();
    let mut r = Vec::with_capacity(max_lag + 1);
    r.push(T::one());
    for k in 1..=max_lag {
        let ck: T = dev[..n - k].iter().zip(&dev[k..]).map(|(&a, &b)| a * b).sum();
        r.push((ck / c0).max(-T::one()).min(T::one()));
    }
    Ok(AcfResult {
        max_lag,
        r,
        ci_halfwidth: T::lit(1.96) / T::from_count(n).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::month::MonthIndex;

    fn series(values: Vec<f64>) -> DemandSeries<f64> {
        DemandSeries::new("p", "t", MonthIndex::new(2015, 1).unwrap(), values)
    }

    #[test]
    fn alternating_lag_one() {
        let xs: Vec<f64> = (0..10).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let a = acf(&series(xs), 3).unwrap();
        assert_eq!(a.r[0], 1.0);
        assert!((a.r[1] + 0.9).abs() < 1e-12);
        assert!((a.r[2] - 0.8).abs() < 1e-12);
    }

    #[test]
    fn band_width() {
        let xs: Vec<f64> = (0..100).map(|i| f64::from(i % 7)).collect();
        assert!((acf(&series(xs), 5).unwrap().ci_halfwidth - 0.196).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        assert_eq!(acf(&series(vec![3.0; 10]), 2).unwrap_err(), Error::ZeroVariance);
        assert!(matches!(acf(&series(vec![1.0, 2.0, 3.0]), 2), Err(Error::TooShort { .. })));
    }
}
