use serde::{Deserialize, Serialize};

use crate::dataset::DemandSeries;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const PERIOD: usize = 12;

/// Additive decomposition `x = trend + seasonal + residual`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionResult<T: Scalar = f64> {
    /// Centered moving average; `None` for the first and last six months.
    pub trend: Vec<Option<T>>,
    /// Effect per calendar month, January first; sums to zero.
    pub seasonal_effects: Vec<T>,
    /// `seasonal_effects` laid out along the series.
    pub seasonal: Vec<T>,
    pub residual: Vec<Option<T>>,
    pub period: usize,
}

/// 2×12 centered moving average trend, per-calendar-month mean of the
/// detrended values re-centered to sum to zero, and the remainder.
pub fn decompose_additive<T: Scalar>(series: &DemandSeries<T>) -> Result<DecompositionResult<T>> {
    let xs = &series.values;
    let n = xs.len();
    if n < 2 * PERIOD {
        return Err(Error::TooShortForDecomposition);
    }
    let half = PERIOD / 2;
    let mut trend = vec![None; n];
    let edge = T::lit(0.5);
    let denom = T::from_count(PERIOD);
    for (t, slot) in trend.iter_mut().enumerate().take(n - half).skip(half) {
        let inner: T = xs[t + 1 - half..t + half].iter().copied().sum();
        *slot = Some((edge * xs[t - half] + inner + edge * xs[t + half]) / denom);
    }

    let calendar = |i: usize| (series.start.month0() + i) % PERIOD;
    let mut sums = [T::zero(); PERIOD];
    let mut counts = [0usize; PERIOD];
    for (i, tr) in trend.iter().enumerate() {
        if let Some(tr) = tr {
            sums[calendar(i)] = sums[calendar(i)] + (xs[i] - *tr);
            counts[calendar(i)] += 1;
        }
    }
    let raw: Vec<T> = sums
        .iter()
        .zip(&counts)
        .map(|(&s, &c)| s / T::from_count(c))
        .collect();
    let centre = raw.iter().copied().sum::<T>() / denom;
    let seasonal_effects: Vec<T> = raw.iter().map(|&e| e - centre).collect();

    let seasonal: Vec<T> = (0..n).map(|i| seasonal_effects[calendar(i)]).collect();
    let residual = trend
        .iter()
        .enumerate()
        .map(|(i, tr)| tr.map(|tr| xs[i] - tr - seasonal[i]))
        .collect();
    Ok(DecompositionResult {
        trend,
        seasonal_effects,
        seasonal,
        residual,
        period: PERIOD,
    })
}
