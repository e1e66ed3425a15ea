//! Rolling-origin backtests: for each product, model and month of the
//! trailing window, fit on the history before that month, forecast it and
//! score the forecast against the realized demand.

use serde::{Deserialize, Serialize};

use rayon::prelude::*;

use crate::dataset::{slice_history, Dataset, DemandSeries};
use crate::error::{Error, Result};
use crate::models::{fit, forecast_one, ForecastResult, ModelSpec};
use crate::month::MonthIndex;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestConfig {
    pub target_month: MonthIndex,
    #[serde(default = "defaults::window_w")]
    pub window_w: usize,
    #[serde(default = "defaults::top_k")]
    pub top_k: usize,
    #[serde(default = "defaults::abnormal_multiplier")]
    pub abnormal_multiplier: f64,
    #[serde(default = "defaults::accuracy_floor_epsilon")]
    pub accuracy_floor_epsilon: f64,
}

mod defaults {
    pub fn window_w() -> usize {
        10
    }
    pub fn top_k() -> usize {
        5
    }
    pub fn abnormal_multiplier() -> f64 {
        3.0
    }
    pub fn accuracy_floor_epsilon() -> f64 {
        1.0
    }
}

impl BacktestConfig {
    pub fn new(target_month: MonthIndex) -> Self {
        Self {
            target_month,
            window_w: defaults::window_w(),
            top_k: defaults::top_k(),
            abnormal_multiplier: defaults::abnormal_multiplier(),
            accuracy_floor_epsilon: defaults::accuracy_floor_epsilon(),
        }
    }

    /// Checks field ranges against a registry of `model_count` models.
    pub fn check(&self, model_count: usize) -> Result<()> {
        if self.window_w == 0 {
            return Err(Error::InvalidConfig("window_w must be >= 1".into()));
        }
        if self.top_k == 0 || self.top_k > model_count {
            return Err(Error::InvalidConfig(format!(
                "top_k = {} must lie in 1..={model_count}",
                self.top_k
            )));
        }
        if !(self.abnormal_multiplier > 0.0 && self.abnormal_multiplier.is_finite()) {
            return Err(Error::InvalidConfig("abnormal_multiplier must be positive".into()));
        }
        if !(self.accuracy_floor_epsilon > 0.0 && self.accuracy_floor_epsilon.is_finite()) {
            return Err(Error::InvalidConfig("accuracy_floor_epsilon must be positive".into()));
        }
        Ok(())
    }

    /// Months scored by the backtest, oldest first.
    pub fn window_months(&self) -> Vec<MonthIndex> {
        (1..=self.window_w)
            .rev()
            .map(|back| self.target_month.add_months(-(back as i64)))
            .collect()
    }
}

/// `max(0, 1 − |forecast − actual| / max(actual, epsilon))`.
pub fn accuracy<T: Scalar>(forecast: T, actual: T, epsilon: T) -> T {
    let rel = (forecast - actual).abs() / actual.max(epsilon);
    (T::one() - rel).max(T::zero())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestRecord<T: Scalar = f64> {
    pub product_id: String,
    pub model_id: String,
    pub month: MonthIndex,
    pub forecast: T,
    pub actual: T,
    pub accuracy: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestOutput<T: Scalar = f64> {
    /// Ordered by product id, then registry order, then month.
    pub records: Vec<BacktestRecord<T>>,
    /// Next-month forecasts for products whose history reaches the month
    /// before the target.
    pub target_forecasts: Vec<ForecastResult<T>>,
}

/// One model's backtest on one product. Months where the model cannot be
/// fitted (or has no actual) are skipped.
pub fn backtest_series<T: Scalar>(
    series: &DemandSeries<T>,
    spec: &ModelSpec,
    config: &BacktestConfig,
) -> (Vec<BacktestRecord<T>>, Option<ForecastResult<T>>) {
    let eps = T::lit(config.accuracy_floor_epsilon);
    let predict = |cutoff: MonthIndex| -> Option<ForecastResult<T>> {
        let history = slice_history(series, cutoff).ok()?;
        if history.end().succ() != cutoff {
            return None;
        }
        let model = fit(spec, &history).ok()?;
        forecast_one(&model, &history).ok()
    };

    let records = config
        .window_months()
        .into_iter()
        .filter_map(|month| {
            let actual = series.value_at(month)?;
            let f = predict(month)?;
            Some(BacktestRecord {
                product_id: series.product_id.clone(),
                model_id: spec.model_id.clone(),
                month,
                forecast: f.value,
                actual,
                accuracy: accuracy(f.value, actual, eps),
            })
        })
        .collect();
    (records, predict(config.target_month))
}

/// Runs every model on every product. Work is spread over the rayon pool;
/// the output order does not depend on scheduling.
pub fn run_backtest<T: Scalar>(
    dataset: &Dataset<T>,
    specs: &[ModelSpec],
    config: &BacktestConfig,
) -> Result<BacktestOutput<T>> {
    if specs.is_empty() {
        return Err(Error::NoModels);
    }
    for s in specs {
        s.check()?;
    }
    config.check(specs.len())?;
    let target = config.target_month;
    if !dataset.iter().any(|s| !s.is_empty() && s.start < target) {
        return Err(Error::NoUsableHistory(target.to_string()));
    }
    if let Some(end) = dataset.global_end() {
        if target > end.succ() {
            return Err(Error::InvalidConfig(format!(
                "target month {target} is past the month after the data ends ({end})"
            )));
        }
    }

    let tasks: Vec<(&DemandSeries<T>, &ModelSpec)> =
        dataset.iter().flat_map(|s| specs.iter().map(move |m| (s, m))).collect();
    let results: Vec<_> = tasks
        .par_iter()
        .map(|(series, spec)| backtest_series(series, spec, config))
        .collect();

    let mut out = BacktestOutput {
        records: Vec::new(),
        target_forecasts: Vec::new(),
    };
    for (records, target_forecast) in results {
        out.records.extend(records);
        out.target_forecasts.extend(target_forecast);
    }
    Ok(out)
}

/// One JSON object per line.
pub fn records_to_jsonl<T: Scalar + Serialize>(records: &[BacktestRecord<T>]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    out
}

pub fn records_from_jsonl<T: Scalar + serde::de::DeserializeOwned>(text: &str) -> Result<Vec<BacktestRecord<T>>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::MalformedInput(format!("records line {}: {e}", i + 1)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::RegistryConfig;

    fn m(y: i32, mo: u32) -> MonthIndex {
        MonthIndex::new(y, mo).unwrap()
    }

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(100.0, 100.0, 1.0), 1.0);
        assert!((accuracy(110.0_f64, 100.0, 1.0) - 0.9).abs() < 1e-15);
        assert_eq!(accuracy(0.0, 100.0, 1.0), 0.0);
        assert_eq!(accuracy(300.0, 100.0, 1.0), 0.0);
        // Zero actual uses epsilon as the denominator.
        assert_eq!(accuracy(0.5, 0.0, 1.0), 0.5);
        assert_eq!(accuracy(0.0_f32, 0.0, 1.0), 1.0);
    }

    #[test]
    fn window_months_precede_target() {
        let mut c = BacktestConfig::new(m(2016, 3));
        c.window_w = 3;
        assert_eq!(c.window_months(), vec![m(2015, 12), m(2016, 1), m(2016, 2)]);
    }

    #[test]
    fn config_json_defaults() {
        let c: BacktestConfig = serde_json::from_str(r#"{"target_month":"2018-12"}"#).unwrap();
        assert_eq!(c, BacktestConfig::new(m(2018, 12)));
        assert!(c.check(9).is_ok());
        assert!(BacktestConfig { top_k: 10, ..c.clone() }.check(9).is_err());
        assert!(BacktestConfig { window_w: 0, ..c }.check(9).is_err());
    }

    fn dataset(n_products: usize, len: usize) -> Dataset<f64> {
        let series = (0..n_products).map(|p| {
            let values = (0..len).map(|t| 10.0 + ((t * (p + 3)) % 7) as f64).collect();
            DemandSeries::new(format!("p{p}"), "t", m(2015, 1), values)
        });
        Dataset::from_series(series).unwrap()
    }

    #[test]
    fn record_counts_are_products_models_months() {
        let specs: Vec<_> = RegistryConfig::default_v1()
            .models
            .into_iter()
            .filter(|s| ["naive", "drift", "ses", "holt"].contains(&s.model_id.as_str()))
            .collect();
        let d = dataset(3, 30);
        let mut c = BacktestConfig::new(m(2017, 7));
        c.top_k = 4;
        let out = run_backtest(&d, &specs, &c).unwrap();
        assert_eq!(out.records.len(), 120);
        assert_eq!(out.target_forecasts.len(), 12);
        assert!(out.target_forecasts.iter().all(|f| f.target_month == m(2017, 7)));
    }

    #[test]
    fn young_product_only_gets_months_with_history() {
        let young = DemandSeries::new("young", "t", m(2016, 10), vec![5.0, 6.0, 7.0, 8.0, 9.0]);
        let d = Dataset::from_series([young]).unwrap();
        let specs = vec![ModelSpec::new("naive", crate::models::ModelFamily::Classical)];
        let mut c = BacktestConfig::new(m(2017, 3));
        c.top_k = 1;
        let out = run_backtest(&d, &specs, &c).unwrap();
        // Months 2016-11 .. 2017-02 have a non-empty history before them.
        let months: Vec<_> = out.records.iter().map(|r| r.month).collect();
        assert_eq!(months, vec![m(2016, 11), m(2016, 12), m(2017, 1), m(2017, 2)]);
    }

    #[test]
    fn errors_for_empty_models_and_early_target() {
        let d = dataset(1, 20);
        let specs = RegistryConfig::default_v1().models;
        assert_eq!(
            run_backtest(&d, &[], &BacktestConfig::new(m(2016, 9))).unwrap_err(),
            Error::NoModels
        );
        assert!(matches!(
            run_backtest(&d, &specs, &BacktestConfig::new(m(2015, 1))),
            Err(Error::NoUsableHistory(_))
        ));
        assert!(run_backtest(&d, &specs, &BacktestConfig::new(m(2019, 1))).is_err());
    }

    #[test]
    fn jsonl_round_trip() {
        let r = BacktestRecord {
            product_id: "p".into(),
            model_id: "naive".into(),
            month: m(2018, 1),
            forecast: 1.5,
            actual: 2.0,
            accuracy: 0.75,
        };
        let text = records_to_jsonl(&[r.clone(), r.clone()]);
        assert_eq!(text.lines().count(), 2);
        assert_eq!(records_from_jsonl::<f64>(&text).unwrap(), vec![r.clone(), r]);
        assert!(records_from_jsonl::<f64>("{bad").is_err());
    }
}
