//! Risk-relevant properties of one demand history: trend and seasonality
//! (additive decomposition), autocorrelation and stationarity.

mod acf;
mod adf;
mod decompose;
mod mackinnon;

pub use acf::{acf, AcfResult};
pub use adf::{adf_test, max_lag_order, AdfResult, MIN_ADF_LENGTH, SIGNIFICANCE};
pub use decompose::{decompose_additive, DecompositionResult, PERIOD};

use serde::{Deserialize, Serialize};

use crate::dataset::DemandSeries;
use crate::scalar::Scalar;

/// Largest ACF lag reported by [`extract_properties`].
pub const DEFAULT_ACF_MAX_LAG: usize = 24;

/// A property that was computed, or the reason it could not be.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Component<V> {
    Computed { value: V },
    Absent { reason: String },
}

impl<V> Component<V> {
    fn from_result(r: crate::Result<V>) -> Self {
        match r {
            Ok(value) => Component::Computed { value },
            Err(e) => Component::Absent { reason: e.to_string() },
        }
    }

    pub fn value(&self) -> Option<&V> {
        match self {
            Component::Computed { value } => Some(value),
            Component::Absent { .. } => None,
        }
    }

    pub fn reason(&self) -> Option<&str> {
        match self {
            Component::Computed { .. } => None,
            Component::Absent { reason } => Some(reason),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesProperties<T: Scalar = f64> {
    pub product_id: String,
    pub decomposition: Component<DecompositionResult<T>>,
    pub acf: Component<AcfResult<T>>,
    pub adf: Component<AdfResult<T>>,
}

/// Runs every sub-analysis; ones whose preconditions fail are reported
/// absent with a reason instead of failing the whole extraction.
pub fn extract_properties<T: Scalar>(series: &DemandSeries<T>) -> SeriesProperties<T> {
    let max_lag = DEFAULT_ACF_MAX_LAG.min(series.len().saturating_sub(2));
    SeriesProperties {
        product_id: series.product_id.clone(),
        decomposition: Component::from_result(decompose_additive(series)),
        acf: Component::from_result(acf(series, max_lag)),
        adf: Component::from_result(adf_test(series)),
    }
}

/// Exchange layout: explicit nulls for absent parts, with reasons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertiesView<T: Scalar = f64> {
    pub product_id: String,
    pub trend: Option<Vec<Option<T>>>,
    pub seasonal_effects: Option<Vec<T>>,
    pub acf: Option<AcfView<T>>,
    pub adf: Option<AdfView<T>>,
    pub reasons: AbsentReasons,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcfView<T: Scalar = f64> {
    pub r: Vec<T>,
    pub ci: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfView<T: Scalar = f64> {
    pub stat: T,
    pub p: T,
    pub stationary: bool,
    pub lag_order: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbsentReasons {
    pub decomposition: Option<String>,
    pub acf: Option<String>,
    pub adf: Option<String>,
}

impl<T: Scalar> SeriesProperties<T> {
    pub fn view(&self) -> PropertiesView<T> {
        let dec = self.decomposition.value();
        PropertiesView {
            product_id: self.product_id.clone(),
            trend: dec.map(|d| d.trend.clone()),
            seasonal_effects: dec.map(|d| d.seasonal_effects.clone()),
            acf: self.acf.value().map(|a| AcfView {
                r: a.r.clone(),
                ci: a.ci_halfwidth,
            }),
            adf: self.adf.value().map(|a| AdfView {
                stat: a.statistic,
                p: a.p_value,
                stationary: a.stationary,
                lag_order: a.lag_order,
            }),
            reasons: AbsentReasons {
                decomposition: self.decomposition.reason().map(str::to_string),
                acf: self.acf.reason().map(str::to_string),
                adf: self.adf.reason().map(str::to_string),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::month::MonthIndex;

    fn series(values: Vec<f64>) -> DemandSeries<f64> {
        DemandSeries::new("p", "t", MonthIndex::new(2015, 1).unwrap(), values)
    }

    fn rich(n: usize) -> Vec<f64> {
        (0..n)
            .map(|t| 50.0 + 0.4 * t as f64 + 6.0 * ((t % 12) as f64 - 5.5).abs() + ((t * 37) % 11) as f64)
            .collect()
    }

    #[test]
    fn rich_series_has_everything() {
        let p = extract_properties(&series(rich(48)));
        assert!(p.decomposition.value().is_some());
        assert!(p.acf.value().is_some());
        assert!(p.adf.value().is_some(), "{:?}", p.adf);
        assert_eq!(p.acf.value().unwrap().max_lag, 24);
    }

    #[test]
    fn short_series_skips_decomposition() {
        let p = extract_properties(&series(rich(18)));
        assert_eq!(p.decomposition.reason(), Some("series too short for seasonal decomposition"));
        assert!(p.acf.value().is_some());
        // ADF needs 20 points, so it is attempted and reported absent.
        assert!(p.adf.reason().unwrap().contains("too short"));
    }

    #[test]
    fn constant_series_reasons() {
        let p = extract_properties(&series(vec![3.0; 30]));
        assert_eq!(p.acf.reason(), Some("zero variance"));
        assert_eq!(p.adf.reason(), Some("zero variance"));
        assert!(p.decomposition.value().is_some());
    }

    #[test]
    fn view_uses_nulls() {
        let p = extract_properties(&series(vec![1.0]));
        let v = serde_json::to_value(p.view()).unwrap();
        assert!(v["trend"].is_null() && v["acf"].is_null() && v["adf"].is_null());
        assert!(v["reasons"]["acf"].is_string());
        let p = extract_properties(&series(rich(30)));
        let v = serde_json::to_value(p.view()).unwrap();
        assert!(v["trend"][0].is_null());
        assert!(v["trend"][6].is_number());
        assert_eq!(v["seasonal_effects"].as_array().unwrap().len(), 12);
    }
}
