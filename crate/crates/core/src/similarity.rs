//! Z-normalized Euclidean similarity between demand histories.
//!
//! Series of different lengths are compared over their trailing
//! `min(len_a, len_b)` months, re-normalized over that window. Pairs whose
//! overlap is shorter than [`MIN_ALIGNED_MONTHS`] are excluded.

use std::borrow::Cow;
use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::DemandSeries;
use crate::error::{Error, Result};
use crate::mds::MdsPoint;
use crate::scalar::{negligible_spread, Scalar};

pub const MIN_ALIGNED_MONTHS: usize = 12;

/// Default number of similar series shown in the risk view.
pub const DEFAULT_NEIGHBORS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedSeries<T: Scalar = f64> {
    pub product_id: String,
    pub values: Vec<T>,
    pub source_mean: T,
    pub source_std: T,
    /// Zero variance input; `values` are then all zero.
    pub degenerate: bool,
}

fn normalize_values<T: Scalar>(xs: &[T]) -> (Vec<T>, T, T, bool) {
    let n = T::from_count(xs.len().max(1));
    let mean = xs.iter().copied().sum::<T>() / n;
    let std = (xs.iter().map(|&x| (x - mean) * (x - mean)).sum::<T>() / n).sqrt();
    let degenerate = negligible_spread(xs);
    let values = if degenerate {
        vec![T::zero(); xs.len()]
    } else {
        xs.iter().map(|&x| (x - mean) / std).collect()
    };
    (values, mean, if degenerate { T::zero() } else { std }, degenerate)
}

/// `(x − mean) / std` with the population standard deviation.
pub fn z_normalize<T: Scalar>(series: &DemandSeries<T>) -> NormalizedSeries<T> {
    let (values, source_mean, source_std, degenerate) = normalize_values(&series.values);
    NormalizedSeries {
        product_id: series.product_id.clone(),
        values,
        source_mean,
        source_std,
        degenerate,
    }
}

/// Straight Euclidean distance between equal-length normalized series.
pub fn euclidean_distance<T: Scalar>(a: &NormalizedSeries<T>, b: &NormalizedSeries<T>) -> Result<T> {
    if a.values.len() != b.values.len() {
        return Err(Error::LengthMismatch {
            id_a: a.product_id.clone(),
            id_b: b.product_id.clone(),
            len_a: a.values.len(),
            len_b: b.values.len(),
        });
    }
    Ok(raw_distance(&a.values, &b.values))
}

fn raw_distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum::<T>().sqrt()
}

fn trailing<T: Scalar>(s: &NormalizedSeries<T>, len: usize) -> Cow<'_, [T]> {
    if s.values.len() == len {
        Cow::Borrowed(&s.values)
    } else {
        Cow::Owned(normalize_values(&s.values[s.values.len() - len..]).0)
    }
}

/// Distance over the trailing common window.
pub fn aligned_distance<T: Scalar>(a: &NormalizedSeries<T>, b: &NormalizedSeries<T>) -> Result<T> {
    let len = a.values.len().min(b.values.len());
    if len < MIN_ALIGNED_MONTHS {
        return Err(Error::LengthMismatch {
            id_a: a.product_id.clone(),
            id_b: b.product_id.clone(),
            len_a: a.values.len(),
            len_b: b.values.len(),
        });
    }
    Ok(raw_distance(&trailing(a, len), &trailing(b, len)))
}

/// Symmetric pairwise distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix<T: Scalar = f64> {
    ids: Vec<String>,
    /// Row-major `n × n`.
    d: Vec<T>,
}

impl<T: Scalar> DistanceMatrix<T> {
    /// Builds from a full square matrix; checks symmetry, zero diagonal and
    /// finiteness.
    pub fn from_rows(ids: Vec<String>, rows: Vec<Vec<T>>) -> Result<Self> {
        let n = ids.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidConfig("distance matrix must be square and match ids".into()));
        }
        let d: Vec<T> = rows.into_iter().flatten().collect();
        if d.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("distance matrix entry".into()));
        }
        for i in 0..n {
            if d[i * n + i] != T::zero() {
                return Err(Error::InvalidConfig("distance matrix diagonal must be zero".into()));
            }
            for j in 0..i {
                if d[i * n + j] != d[j * n + i] || d[i * n + j] < T::zero() {
                    return Err(Error::InvalidConfig("distance matrix must be symmetric and non-negative".into()));
                }
            }
        }
        Ok(Self { ids, d })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.d[i * self.len() + j]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.d.chunks(self.len().max(1))
    }

    /// Candidates ordered by ascending distance to `target`, ties by id,
    /// skipping the target and anything in `exclude`.
    pub fn nearest(&self, target: &str, n: usize, exclude: &dyn Fn(&str) -> bool) -> Result<Vec<(String, T)>> {
        let t = self
            .index_of(target)
            .ok_or_else(|| Error::UnknownProduct(target.to_string()))?;
        let mut all: Vec<(String, T)> = (0..self.len())
            .filter(|&j| j != t && !exclude(&self.ids[j]))
            .map(|j| (self.ids[j].clone(), self.get(t, j)))
            .collect();
        sort_by_distance(&mut all);
        all.truncate(n);
        Ok(all)
    }
}

fn sort_by_distance<T: Scalar>(items: &mut [(String, T)]) {
    items.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal).then_with(|| a.0.cmp(&b.0)));
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcludedPair {
    pub id_a: String,
    pub id_b: String,
    pub reason: String,
}

/// Distance matrix over the series long enough to align, plus the pairs
/// left out. Rows are computed in parallel and assembled in input order.
pub fn distance_matrix<T: Scalar>(set: &[NormalizedSeries<T>]) -> Result<(DistanceMatrix<T>, Vec<ExcludedPair>)> {
    let kept: Vec<&NormalizedSeries<T>> = set.iter().filter(|s| s.values.len() >= MIN_ALIGNED_MONTHS).collect();
    let mut excluded = Vec::new();
    for (i, s) in set.iter().enumerate() {
        if s.values.len() >= MIN_ALIGNED_MONTHS {
            continue;
        }
        for (j, other) in set.iter().enumerate() {
            if j != i && (other.values.len() >= MIN_ALIGNED_MONTHS || j > i) {
                excluded.push(ExcludedPair {
                    id_a: s.product_id.clone(),
                    id_b: other.product_id.clone(),
                    reason: format!(
                        "overlap of {} months is below {MIN_ALIGNED_MONTHS}",
                        s.values.len().min(other.values.len())
                    ),
                });
            }
        }
    }
    if kept.len() < 2 {
        return Err(Error::TooFewSeries {
            needed: 2,
            available: kept.len(),
        });
    }
    let n = kept.len();
    let upper: Vec<Vec<T>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| aligned_distance(kept[i], kept[j]).expect("both series long enough"))
                .collect()
        })
        .collect();
    let mut d = vec![T::zero(); n * n];
    for (i, row) in upper.iter().enumerate() {
        for (off, &v) in row.iter().enumerate() {
            let j = i + 1 + off;
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    Ok((
        DistanceMatrix {
            ids: kept.iter().map(|s| s.product_id.clone()).collect(),
            d,
        },
        excluded,
    ))
}

/// The `n` candidates closest to `target_id`, ascending by distance, ties
/// by product id. Candidates that cannot be aligned with the target are
/// skipped.
pub fn nearest_similar<T: Scalar>(
    target_id: &str,
    candidates: &[NormalizedSeries<T>],
    n: usize,
) -> Result<Vec<(String, T)>> {
    if n == 0 {
        return Err(Error::InvalidConfig("neighbor count must be >= 1".into()));
    }
    let target = candidates
        .iter()
        .find(|c| c.product_id == target_id)
        .ok_or_else(|| Error::UnknownProduct(target_id.to_string()))?;
    let mut all: Vec<(String, T)> = candidates
        .iter()
        .filter(|c| c.product_id != target_id)
        .filter_map(|c| aligned_distance(target, c).ok().map(|d| (c.product_id.clone(), d)))
        .collect();
    sort_by_distance(&mut all);
    all.truncate(n);
    Ok(all)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    /// Demand still running into the target month.
    ToForecast,
    /// History ended earlier; forecast in a previous session.
    ForecastedBefore,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionPoint<T: Scalar = f64> {
    pub product_id: String,
    pub x: T,
    pub y: T,
    pub role: Role,
}

impl<T: Scalar> ProjectionPoint<T> {
    pub fn from_mds(point: MdsPoint<T>, role: Role) -> Self {
        Self {
            product_id: point.product_id,
            x: point.x,
            y: point.y,
            role,
        }
    }
}
