//! One-step-ahead monthly forecasting models behind a uniform fit/forecast
//! contract, plus the JSON model registry.
//!
//! Fitting estimates parameters from a history; forecasting re-applies those
//! parameters to a history that is the fitted one or an extension of it.

mod knn;
mod regression;
mod smoothing;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::DemandSeries;
use crate::error::{Error, Result};
use crate::month::MonthIndex;
use crate::scalar::Scalar;

/// Registry shipped with the crate.
pub const DEFAULT_REGISTRY_JSON: &str = include_str!("../../registry/default_models.v1.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFamily {
    Classical,
    MachineLearning,
}

/// Implemented forecasting algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Naive,
    SeasonalNaive,
    Drift,
    Ses,
    Holt,
    HoltWintersAdditive,
    Ar,
    KnnLag,
    RidgeLag,
}

impl ModelKind {
    pub fn is_seasonal(self) -> bool {
        matches!(self, ModelKind::SeasonalNaive | ModelKind::HoltWintersAdditive)
    }

    fn allowed_hyperparameters(self) -> &'static [&'static str] {
        match self {
            ModelKind::Naive | ModelKind::Drift => &[],
            ModelKind::SeasonalNaive => &["period"],
            ModelKind::Ses => &["alpha"],
            ModelKind::Holt => &["alpha", "beta"],
            ModelKind::HoltWintersAdditive => &["alpha", "beta", "gamma", "period"],
            ModelKind::Ar => &["p"],
            ModelKind::KnnLag => &["lags", "neighbors"],
            ModelKind::RidgeLag => &["lags", "penalty"],
        }
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "naive" => ModelKind::Naive,
            "snaive" | "snaive12" => ModelKind::SeasonalNaive,
            "drift" => ModelKind::Drift,
            "ses" => ModelKind::Ses,
            "holt" => ModelKind::Holt,
            "hw_add" => ModelKind::HoltWintersAdditive,
            "ar" => ModelKind::Ar,
            "knn_lag" => ModelKind::KnnLag,
            "ridge_lag" => ModelKind::RidgeLag,
            other => return Err(Error::UnknownModel(other.to_string())),
        })
    }
}

/// A configured model. `kind` defaults to `model_id`, so `"ses"` needs no
/// separate kind while `"ar3"` can declare `"kind": "ar"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub model_id: String,
    pub family: ModelFamily,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default)]
    pub hyperparameters: BTreeMap<String, f64>,
    #[serde(default)]
    pub display_color_key: u32,
}

impl ModelSpec {
    pub fn new(model_id: impl Into<String>, family: ModelFamily) -> Self {
        Self {
            model_id: model_id.into(),
            family,
            kind: None,
            hyperparameters: BTreeMap::new(),
            display_color_key: 0,
        }
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.hyperparameters.insert(name.to_string(), value);
        self
    }

    pub fn kind(&self) -> Result<ModelKind> {
        self.kind.as_deref().unwrap_or(&self.model_id).parse()
    }

    fn param(&self, name: &str) -> Option<f64> {
        self.hyperparameters.get(name).copied()
    }

    fn int_param(&self, name: &str, default: usize, range: std::ops::RangeInclusive<usize>) -> Result<usize> {
        match self.param(name) {
            None => Ok(default),
            Some(v) if v.fract() == 0.0 && v >= *range.start() as f64 && v <= *range.end() as f64 => Ok(v as usize),
            Some(v) => Err(self.bad_param(name, v, &format!("an integer in {}..={}", range.start(), range.end()))),
        }
    }

    fn unit_param(&self, name: &str) -> Result<Option<f64>> {
        match self.param(name) {
            None => Ok(None),
            Some(v) if v > 0.0 && v <= 1.0 => Ok(Some(v)),
            Some(v) => Err(self.bad_param(name, v, "in (0, 1]")),
        }
    }

    fn bad_param(&self, name: &str, v: f64, expected: &str) -> Error {
        Error::InvalidConfig(format!("{}: {name} = {v} must be {expected}", self.model_id))
    }

    /// Checks the kind and hyperparameter names and ranges.
    pub fn check(&self) -> Result<ModelKind> {
        let kind = self.kind()?;
        let allowed = kind.allowed_hyperparameters();
        if let Some(name) = self.hyperparameters.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::InvalidConfig(format!("{}: unknown hyperparameter {name:?}", self.model_id)));
        }
        Params::resolve(self)?;
        Ok(kind)
    }

    /// Shortest history `fit` accepts.
    pub fn min_history(&self) -> Result<usize> {
        let kind = self.kind()?;
        Ok(Params::resolve(self)?.min_history(kind))
    }
}

/// Hyperparameters resolved against defaults.
#[derive(Debug, Clone, Copy)]
struct Params {
    alpha: Option<f64>,
    beta: Option<f64>,
    gamma: Option<f64>,
    period: usize,
    order: usize,
    lags: usize,
    neighbors: usize,
    penalty: f64,
}

impl Params {
    fn resolve(spec: &ModelSpec) -> Result<Self> {
        let penalty = spec.param("penalty").unwrap_or(1.0);
        if !(penalty >= 0.0 && penalty.is_finite()) {
            return Err(spec.bad_param("penalty", penalty, "finite and >= 0"));
        }
        Ok(Self {
            alpha: spec.unit_param("alpha")?,
            beta: spec.unit_param("beta")?,
            gamma: spec.unit_param("gamma")?,
            period: spec.int_param("period", 12, 2..=24)?,
            order: spec.int_param("p", 6, 1..=24)?,
            lags: spec.int_param("lags", 12, 1..=36)?,
            neighbors: spec.int_param("neighbors", 3, 1..=50)?,
            penalty,
        })
    }

    fn min_history(&self, kind: ModelKind) -> usize {
        match kind {
            ModelKind::Naive => 1,
            ModelKind::Drift | ModelKind::Ses | ModelKind::Holt => 2,
            ModelKind::SeasonalNaive | ModelKind::HoltWintersAdditive => 2 * self.period,
            // At least `order + 2` regression rows.
            ModelKind::Ar => 2 * self.order + 2,
            ModelKind::KnnLag | ModelKind::RidgeLag => 2 * self.lags + 2,
        }
    }
}

/// Registry configuration file contents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegistryConfig {
    #[serde(default)]
    pub version: Option<u32>,
    #[serde(default = "default_true")]
    pub include_seasonal: bool,
    pub models: Vec<ModelSpec>,
}

fn default_true() -> bool {
    true
}

impl RegistryConfig {
    /// The versioned default registry (nine models).
    pub fn default_v1() -> Self {
        serde_json::from_str(DEFAULT_REGISTRY_JSON).expect("bundled registry parses")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(format!("registry: {e}")))
    }
}

impl Default for RegistryConfig {
    fn default() -> Self {
        Self::default_v1()
    }
}

/// Validated model list in registry order.
pub fn list_models(config: &RegistryConfig) -> Result<Vec<ModelSpec>> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(config.models.len());
    for spec in &config.models {
        if !seen.insert(spec.model_id.as_str()) {
            return Err(Error::DuplicateModel(spec.model_id.clone()));
        }
        let kind = spec.check()?;
        if kind.is_seasonal() && !config.include_seasonal {
            continue;
        }
        out.push(spec.clone());
    }
    Ok(out)
}

/// Model-specific fitted parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FittedState<T: Scalar> {
    Naive { last: T },
    SeasonalNaive { period: usize },
    Drift { slope: T },
    Ses { alpha: T, level: T },
    Holt { alpha: T, beta: T, level: T, trend: T },
    HoltWinters {
        alpha: T,
        beta: T,
        gamma: T,
        level: T,
        trend: T,
        /// Seasonal terms for the next `period` months, next month first.
        season: Vec<T>,
    },
    Ar { intercept: T, coef: Vec<T> },
    Knn { lags: usize, neighbors: usize },
    Ridge { intercept: T, coef: Vec<T> },
    /// Regression on a degenerate design; forecasts the last value.
    NaiveFallback { reason: String },
}

impl<T: Scalar> FittedState<T> {
    pub fn is_fallback(&self) -> bool {
        matches!(self, FittedState::NaiveFallback { .. })
    }

    fn is_finite(&self) -> bool {
        let all = |v: &[T]| v.iter().all(|x| x.is_finite());
        match self {
            FittedState::Naive { last } => last.is_finite(),
            FittedState::Drift { slope } => slope.is_finite(),
            FittedState::Ses { alpha, level } => all(&[*alpha, *level]),
            FittedState::Holt { alpha, beta, level, trend } => all(&[*alpha, *beta, *level, *trend]),
            FittedState::HoltWinters {
                alpha,
                beta,
                gamma,
                level,
                trend,
                season,
            } => all(&[*alpha, *beta, *gamma, *level, *trend]) && all(season),
            FittedState::Ar { intercept, coef } | FittedState::Ridge { intercept, coef } => {
                intercept.is_finite() && all(coef)
            }
            FittedState::SeasonalNaive { .. } | FittedState::Knn { .. } | FittedState::NaiveFallback { .. } => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel<T: Scalar = f64> {
    pub spec: ModelSpec,
    pub product_id: String,
    pub state: FittedState<T>,
    pub training_span: (MonthIndex, MonthIndex),
}

impl<T: Scalar> FittedModel<T> {
    fn training_len(&self) -> usize {
        self.training_span.1.months_since(self.training_span.0) as usize + 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastResult<T: Scalar = f64> {
    pub product_id: String,
    pub target_month: MonthIndex,
    pub model_id: String,
    pub value: T,
}

fn is_constant<T: Scalar>(xs: &[T]) -> bool {
    xs.iter().all(|&x| x == xs[0])
}

/// Estimates the model's parameters on `history`.
pub fn fit<T: Scalar>(spec: &ModelSpec, history: &DemandSeries<T>) -> Result<FittedModel<T>> {
    let kind = spec.check()?;
    let p = Params::resolve(spec)?;
    let needed = p.min_history(kind);
    let xs = &history.values;
    if xs.len() < needed {
        return Err(Error::InsufficientHistory {
            model: spec.model_id.clone(),
            needed,
            available: xs.len(),
        });
    }
    if let Some(i) = xs.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite(format!("{} at index {i}", history.product_id)));
    }
    let n = xs.len();
    let state = match kind {
        ModelKind::Naive => FittedState::Naive { last: xs[n - 1] },
        ModelKind::SeasonalNaive => FittedState::SeasonalNaive { period: p.period },
        ModelKind::Drift => FittedState::Drift {
            slope: (xs[n - 1] - xs[0]) / T::from_count(n - 1),
        },
        ModelKind::Ses => smoothing::fit_ses(xs, p.alpha.map(T::lit)),
        ModelKind::Holt => smoothing::fit_holt(xs, p.alpha.map(T::lit), p.beta.map(T::lit)),
        ModelKind::HoltWintersAdditive => {
            smoothing::fit_holt_winters(xs, p.period, p.alpha.map(T::lit), p.beta.map(T::lit), p.gamma.map(T::lit))
        }
        ModelKind::Ar => {
            if is_constant(xs) {
                fallback("constant history")
            } else {
                regression::fit_ar(xs, p.order).unwrap_or_else(|_| fallback("singular design matrix"))
            }
        }
        ModelKind::RidgeLag => {
            if is_constant(xs) {
                fallback("constant history")
            } else {
                regression::fit_ridge(xs, p.lags, T::lit(p.penalty)).unwrap_or_else(|_| fallback("singular design matrix"))
            }
        }
        ModelKind::KnnLag => FittedState::Knn {
            lags: p.lags,
            neighbors: p.neighbors,
        },
    };
    if !state.is_finite() {
        return Err(Error::NonFinite(format!("{} fitted on {}", spec.model_id, history.product_id)));
    }
    Ok(FittedModel {
        spec: spec.clone(),
        product_id: history.product_id.clone(),
        state,
        training_span: (history.start, history.end()),
    })
}

fn fallback<T: Scalar>(reason: &str) -> FittedState<T> {
    FittedState::NaiveFallback { reason: reason.to_string() }
}

/// Forecast for the month after `history` ends, clamped at zero.
pub fn forecast_one<T: Scalar>(model: &FittedModel<T>, history: &DemandSeries<T>) -> Result<ForecastResult<T>> {
    if history.product_id != model.product_id {
        return Err(Error::HistoryMismatch(format!(
            "model fitted on {:?}, history is {:?}",
            model.product_id, history.product_id
        )));
    }
    if history.start != model.training_span.0 || history.len() < model.training_len() {
        return Err(Error::HistoryMismatch(format!(
            "history {}..{} does not cover training span {}..{}",
            history.start,
            history.end(),
            model.training_span.0,
            model.training_span.1
        )));
    }
    let xs = &history.values;
    let n = xs.len();
    let raw = match &model.state {
        FittedState::Naive { .. } | FittedState::NaiveFallback { .. } => xs[n - 1],
        FittedState::SeasonalNaive { period } => xs[n - period],
        FittedState::Drift { slope } => xs[n - 1] + *slope,
        FittedState::Ses { alpha, .. } => smoothing::ses_forecast(xs, *alpha),
        FittedState::Holt { alpha, beta, .. } => smoothing::holt_forecast(xs, *alpha, *beta),
        FittedState::HoltWinters {
            alpha,
            beta,
            gamma,
            season,
            ..
        } => smoothing::holt_winters_forecast(xs, season.len(), *alpha, *beta, *gamma),
        FittedState::Ar { intercept, coef } | FittedState::Ridge { intercept, coef } => {
            regression::apply_lags(xs, *intercept, coef)
        }
        FittedState::Knn { lags, neighbors } => knn::knn_forecast(xs, *lags, *neighbors),
    };
    if !raw.is_finite() {
        return Err(Error::NonFinite(format!(
            "{} forecast for {}",
            model.spec.model_id, history.product_id
        )));
    }
    Ok(ForecastResult {
        product_id: history.product_id.clone(),
        target_month: history.end().succ(),
        model_id: model.spec.model_id.clone(),
        value: raw.max(T::zero()),
    })
}

impl fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelFamily::Classical => "classical",
            ModelFamily::MachineLearning => "machine_learning",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(values: Vec<f64>) -> DemandSeries<f64> {
        DemandSeries::new("p", "t", MonthIndex::new(2015, 1).unwrap(), values)
    }

    fn spec(id: &str) -> ModelSpec {
        RegistryConfig::default_v1()
            .models
            .into_iter()
            .find(|m| m.model_id == id)
            .unwrap()
    }

    fn one(id: &str, values: Vec<f64>) -> f64 {
        let h = series(values);
        let m = fit(&spec(id), &h).unwrap();
        forecast_one(&m, &h).unwrap().value
    }

    #[test]
    fn default_registry_order() {
        let ids: Vec<_> = list_models(&RegistryConfig::default_v1())
            .unwrap()
            .into_iter()
            .map(|m| m.model_id)
            .collect();
        assert_eq!(
            ids,
            ["naive", "snaive12", "drift", "ses", "holt", "hw_add", "ar", "knn_lag", "ridge_lag"]
        );
    }

    #[test]
    fn seasonal_models_can_be_disabled() {
        let mut cfg = RegistryConfig::default_v1();
        cfg.include_seasonal = false;
        let ids: Vec<_> = list_models(&cfg).unwrap().into_iter().map(|m| m.model_id).collect();
        assert_eq!(ids.len(), 7);
        assert!(!ids.iter().any(|i| i == "snaive12" || i == "hw_add"));
    }

    #[test]
    fn duplicate_and_unknown_ids() {
        let cfg = RegistryConfig {
            version: None,
            include_seasonal: true,
            models: vec![spec("ses"), spec("ses").with_param("alpha", 0.5)],
        };
        assert_eq!(list_models(&cfg), Err(Error::DuplicateModel("ses".into())));
        let cfg = RegistryConfig {
            version: None,
            include_seasonal: true,
            models: vec![ModelSpec::new("myarimax", ModelFamily::Classical)],
        };
        assert_eq!(list_models(&cfg), Err(Error::UnknownModel("myarimax".into())));
    }

    #[test]
    fn hyperparameter_ranges() {
        assert!(spec("ses").with_param("alpha", 0.0).check().is_err());
        assert!(spec("ses").with_param("alpha", 1.5).check().is_err());
        assert!(spec("ses").with_param("beta", 0.5).check().is_err());
        assert!(spec("ar").with_param("p", 2.5).check().is_err());
        assert!(spec("ridge_lag").with_param("penalty", -1.0).check().is_err());
        let mut ar3 = ModelSpec::new("ar3", ModelFamily::Classical).with_param("p", 3.0);
        ar3.kind = Some("ar".into());
        assert_eq!(ar3.check().unwrap(), ModelKind::Ar);
        assert_eq!(ar3.min_history().unwrap(), 8);
    }

    #[test]
    fn naive_carries_last_value() {
        let h = series(vec![5.0, 5.0, 5.0]);
        let m = fit(&spec("naive"), &h).unwrap();
        assert_eq!(m.state, FittedState::Naive { last: 5.0 });
        assert_eq!(forecast_one(&m, &h).unwrap().value, 5.0);
        assert_eq!(forecast_one(&m, &h).unwrap().target_month, MonthIndex::new(2015, 4).unwrap());
    }

    #[test]
    fn drift_extrapolates_line() {
        assert_eq!(one("drift", vec![0.0, 2.0, 4.0, 6.0]), 8.0);
    }

    #[test]
    fn seasonal_naive_repeats_pattern() {
        let pattern: Vec<f64> = (1..=12).map(f64::from).collect();
        let xs = [pattern.clone(), pattern].concat();
        assert_eq!(one("snaive12", xs), 1.0);
    }

    #[test]
    fn insufficient_history_errors() {
        for (id, n) in [("naive", 0), ("drift", 1), ("snaive12", 23), ("hw_add", 23), ("ar", 13), ("knn_lag", 25)] {
            let err = fit(&spec(id), &series(vec![1.0; n])).unwrap_err();
            assert!(matches!(err, Error::InsufficientHistory { .. }), "{id}: {err:?}");
        }
    }

    #[test]
    fn regression_models_fall_back_on_constant_history() {
        for id in ["ar", "ridge_lag"] {
            let h = series(vec![4.0; 30]);
            let m = fit(&spec(id), &h).unwrap();
            assert!(m.state.is_fallback(), "{id}");
            assert_eq!(forecast_one(&m, &h).unwrap().value, 4.0);
        }
    }

    #[test]
    fn negative_forecasts_clamped() {
        assert_eq!(one("drift", vec![10.0, 5.0, 0.0]), 0.0);
    }

    #[test]
    fn forecast_rejects_foreign_or_short_history() {
        let h = series((0..30).map(f64::from).collect());
        let m = fit(&spec("ses"), &h).unwrap();
        let mut other = h.clone();
        other.product_id = "q".into();
        assert!(forecast_one(&m, &other).is_err());
        let short = h.with_values(h.start, h.values[..20].to_vec());
        assert!(forecast_one(&m, &short).is_err());
        // An extension is fine.
        let longer = h.with_values(h.start, (0..31).map(f64::from).collect());
        assert_eq!(
            forecast_one(&m, &longer).unwrap().target_month,
            MonthIndex::new(2017, 8).unwrap()
        );
    }

    #[test]
    fn fitted_state_json_is_tagged() {
        let h = series(vec![1.0, 2.0, 3.0]);
        let m = fit(&spec("drift"), &h).unwrap();
        let v = serde_json::to_value(&m.state).unwrap();
        assert_eq!(v["type"], "drift");
        assert_eq!(v["slope"], 1.0);
    }

    #[test]
    fn every_default_model_runs_in_f32() {
        let xs: Vec<f32> = (0..40).map(|i| 10.0 + (i % 12) as f32 + 0.3 * i as f32).collect();
        let h = DemandSeries::new("p", "t", MonthIndex::new(2015, 1).unwrap(), xs);
        for s in list_models(&RegistryConfig::default_v1()).unwrap() {
            let m = fit(&s, &h).unwrap();
            let f = forecast_one(&m, &h).unwrap();
            assert!(f.value.is_finite() && f.value >= 0.0, "{}", s.model_id);
        }
    }
}
