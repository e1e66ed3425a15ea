//! Ranking indicators over a product subset, weighted model ranking and
//! the abnormal-forecast flag.
//!
//! For every model the indicators are:
//! * mean accuracy over all of its backtest records in the subset,
//! * population variance of its per-month mean accuracy across the window,
//! * applicability: the number of products where the model's mean accuracy
//!   is among the `top_k` best models for that product.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::backtest::BacktestRecord;
use crate::dataset::DemandSeries;
use crate::error::{Error, Result};
use crate::models::ForecastResult;
use crate::month::MonthIndex;
use crate::scalar::{mean, population_variance, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorSummary<T: Scalar = f64> {
    pub model_id: String,
    pub mean_accuracy: T,
    pub accuracy_variance: T,
    pub applicability_count: usize,
    /// Products in the subset with at least one record for this model.
    pub product_count: usize,
}

/// One model's accuracy on one product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductModelStats<T: Scalar = f64> {
    pub mean_accuracy: T,
    pub accuracy_variance: T,
    pub months: usize,
}

/// Per (product, model) accuracy mean and population variance over months.
pub fn product_model_stats<T: Scalar>(
    records: &[BacktestRecord<T>],
) -> BTreeMap<(String, String), ProductModelStats<T>> {
    let mut grouped: BTreeMap<(&str, &str), Vec<(MonthIndex, T)>> = BTreeMap::new();
    for r in records {
        grouped
            .entry((r.product_id.as_str(), r.model_id.as_str()))
            .or_default()
            .push((r.month, r.accuracy));
    }
    grouped
        .into_iter()
        .map(|((p, m), mut accs)| {
            accs.sort_by_key(|&(month, _)| month);
            let values: Vec<T> = accs.iter().map(|&(_, a)| a).collect();
            let stats = ProductModelStats {
                mean_accuracy: mean(&values).expect("non-empty group"),
                accuracy_variance: population_variance(&values).expect("non-empty group"),
                months: values.len(),
            };
            ((p.to_string(), m.to_string()), stats)
        })
        .collect()
}

/// Models ordered best-first for one product: descending mean accuracy,
/// ties by ascending model id.
pub fn order_models_for_product<T: Scalar>(per_model: &mut [(String, T)]) {
    per_model.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then_with(|| a.0.cmp(&b.0)));
}

/// Indicators per model over `product_subset`, sorted by model id. Models
/// without records in the subset are omitted.
pub fn compute_indicators<T: Scalar>(
    records: &[BacktestRecord<T>],
    product_subset: &BTreeSet<String>,
    top_k: usize,
) -> Result<Vec<IndicatorSummary<T>>> {
    if product_subset.is_empty() {
        return Err(Error::EmptySelection);
    }
    // Canonical order so sums do not depend on the input order.
    let mut selected: Vec<&BacktestRecord<T>> =
        records.iter().filter(|r| product_subset.contains(&r.product_id)).collect();
    selected.sort_by(|a, b| {
        (a.model_id.as_str(), a.product_id.as_str(), a.month).cmp(&(b.model_id.as_str(), b.product_id.as_str(), b.month))
    });

    struct Acc<'a, T> {
        accuracies: Vec<T>,
        by_month: BTreeMap<MonthIndex, Vec<T>>,
        products: BTreeSet<&'a str>,
    }
    let mut per_model: BTreeMap<&str, Acc<T>> = BTreeMap::new();
    let mut per_product: BTreeMap<&str, BTreeMap<&str, Vec<T>>> = BTreeMap::new();
    for r in &selected {
        let acc = per_model.entry(r.model_id.as_str()).or_insert_with(|| Acc {
            accuracies: Vec::new(),
            by_month: BTreeMap::new(),
            products: BTreeSet::new(),
        });
        acc.accuracies.push(r.accuracy);
        acc.by_month.entry(r.month).or_default().push(r.accuracy);
        acc.products.insert(r.product_id.as_str());
        per_product
            .entry(r.product_id.as_str())
            .or_default()
            .entry(r.model_id.as_str())
            .or_default()
            .push(r.accuracy);
    }

    let mut credits: BTreeMap<&str, usize> = BTreeMap::new();
    for models in per_product.values() {
        let mut ranked: Vec<(String, T)> = models
            .iter()
            .map(|(m, accs)| (m.to_string(), mean(accs).expect("non-empty")))
            .collect();
        order_models_for_product(&mut ranked);
        for (model_id, _) in ranked.iter().take(top_k) {
            let key = per_model.get_key_value(model_id.as_str()).expect("model has records").0;
            *credits.entry(key).or_default() += 1;
        }
    }

    Ok(per_model
        .into_iter()
        .map(|(model_id, acc)| {
            let monthly: Vec<T> = acc.by_month.values().map(|v| mean(v).expect("non-empty")).collect();
            IndicatorSummary {
                model_id: model_id.to_string(),
                mean_accuracy: mean(&acc.accuracies).expect("non-empty"),
                accuracy_variance: population_variance(&monthly).expect("non-empty"),
                applicability_count: credits.get(model_id).copied().unwrap_or(0),
                product_count: acc.products.len(),
            }
        })
        .collect())
}

/// Slider weights; rescaled to sum to one before use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankingWeights<T: Scalar = f64> {
    pub w_accuracy: T,
    pub w_variance: T,
    pub w_applicability: T,
}

impl<T: Scalar> RankingWeights<T> {
    pub fn new(w_accuracy: T, w_variance: T, w_applicability: T) -> Self {
        Self {
            w_accuracy,
            w_variance,
            w_applicability,
        }
    }

    pub fn equal() -> Self {
        Self::new(T::one(), T::one(), T::one())
    }

    /// `[accuracy, variance, applicability]` summing to one.
    pub fn normalized(&self) -> Result<[T; 3]> {
        let w = [self.w_accuracy, self.w_variance, self.w_applicability];
        if w.iter().any(|v| !v.is_finite() || *v < T::zero()) {
            return Err(Error::InvalidConfig("ranking weights must be finite and >= 0".into()));
        }
        let total = w[0] + w[1] + w[2];
        if total <= T::zero() {
            return Err(Error::ZeroWeights);
        }
        Ok(w.map(|v| v / total))
    }
}

impl<T: Scalar> Default for RankingWeights<T> {
    fn default() -> Self {
        Self::equal()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedModel<T: Scalar = f64> {
    pub model_id: String,
    pub score: T,
    pub rank: usize,
    pub in_top_k: bool,
    pub summary: IndicatorSummary<T>,
}

/// Min-max scaling over the column; a constant column maps to 0.5.
fn min_max<T: Scalar>(values: &[T]) -> Vec<T> {
    let lo = values.iter().copied().fold(T::infinity(), T::min);
    let hi = values.iter().copied().fold(T::neg_infinity(), T::max);
    if hi > lo {
        values.iter().map(|&v| (v - lo) / (hi - lo)).collect()
    } else {
        vec![T::lit(0.5); values.len()]
    }
}

/// Weighted score per model, ranks 1..M by descending score; ties by
/// higher mean accuracy, then model id.
pub fn rank_models<T: Scalar>(
    summaries: &[IndicatorSummary<T>],
    weights: &RankingWeights<T>,
    top_k: usize,
) -> Result<Vec<RankedModel<T>>> {
    if summaries.is_empty() {
        return Err(Error::EmptySelection);
    }
    let [wa, wv, wp] = weights.normalized()?;
    let acc = min_max(&summaries.iter().map(|s| s.mean_accuracy).collect::<Vec<_>>());
    let var = min_max(&summaries.iter().map(|s| s.accuracy_variance).collect::<Vec<_>>());
    let app = min_max(
        &summaries
            .iter()
            .map(|s| T::from_count(s.applicability_count))
            .collect::<Vec<_>>(),
    );
    let mut scored: Vec<(T, &IndicatorSummary<T>)> = summaries
        .iter()
        .enumerate()
        .map(|(i, s)| (wa * acc[i] + wv * (T::one() - var[i]) + wp * app[i], s))
        .collect();
    scored.sort_by(|(sa, a), (sb, b)| {
        sb.partial_cmp(sa)
            .unwrap_or(Ordering::Equal)
            .then_with(|| b.mean_accuracy.partial_cmp(&a.mean_accuracy).unwrap_or(Ordering::Equal))
            .then_with(|| a.model_id.cmp(&b.model_id))
    });
    Ok(scored
        .into_iter()
        .enumerate()
        .map(|(i, (score, s))| RankedModel {
            model_id: s.model_id.clone(),
            score: score.max(T::zero()).min(T::one()),
            rank: i + 1,
            in_top_k: i < top_k,
            summary: s.clone(),
        })
        .collect())
}

/// True when the forecast exceeds `multiplier` times the historical
/// maximum. An all-zero history flags any positive forecast.
pub fn flag_abnormal<T: Scalar>(forecast: &ForecastResult<T>, history: &DemandSeries<T>, multiplier: T) -> Result<bool> {
    let max = history
        .values
        .iter()
        .copied()
        .reduce(T::max)
        .ok_or(Error::EmptyHistory)?;
    Ok(forecast.value > multiplier * max)
}
