//! Model-selection analytics for monthly product demand forecasting.
//!
//! The crate backtests a zoo of one-step-ahead forecasting models per
//! product, ranks them under user-weighted indicators, projects demand
//! histories into 2-D for cluster selection, and extracts per-series
//! diagnostics (trend, seasonality, autocorrelation, stationarity).
//!
//! Every analytic is generic over [`Scalar`] (`f32` or `f64`). The
//! `*64`/`*32` aliases at the crate root fix the scalar type.

pub mod backtest;
pub mod dataset;
pub mod error;
pub mod linalg;
pub mod mds;
pub mod models;
pub mod month;
pub mod properties;
pub mod ranking;
pub mod scalar;
pub mod similarity;

pub use backtest::{accuracy, run_backtest, BacktestConfig, BacktestOutput, BacktestRecord};
pub use dataset::{parse_dataset, slice_history, validate, Dataset, DemandSeries, ValidationReport};
pub use error::{Error, Result};
pub use mds::mds_project;
pub use models::{fit, forecast_one, list_models, FittedModel, ForecastResult, ModelSpec, RegistryConfig};
pub use month::MonthIndex;
pub use properties::{acf, adf_test, decompose_additive, extract_properties, SeriesProperties};
pub use ranking::{compute_indicators, flag_abnormal, rank_models, IndicatorSummary, RankedModel, RankingWeights};
pub use scalar::Scalar;
pub use similarity::{distance_matrix, euclidean_distance, nearest_similar, z_normalize, DistanceMatrix, NormalizedSeries, ProjectionPoint, Role};

pub type DemandSeries64 = DemandSeries<f64>;
pub type DemandSeries32 = DemandSeries<f32>;
pub type Dataset64 = Dataset<f64>;
pub type Dataset32 = Dataset<f32>;
pub type FittedModel64 = FittedModel<f64>;
pub type FittedModel32 = FittedModel<f32>;
pub type ForecastResult64 = ForecastResult<f64>;
pub type ForecastResult32 = ForecastResult<f32>;
pub type BacktestRecord64 = BacktestRecord<f64>;
pub type BacktestRecord32 = BacktestRecord<f32>;
pub type IndicatorSummary64 = IndicatorSummary<f64>;
pub type IndicatorSummary32 = IndicatorSummary<f32>;
pub type RankedModel64 = RankedModel<f64>;
pub type RankedModel32 = RankedModel<f32>;
pub type NormalizedSeries64 = NormalizedSeries<f64>;
pub type NormalizedSeries32 = NormalizedSeries<f32>;
pub type DistanceMatrix64 = DistanceMatrix<f64>;
pub type DistanceMatrix32 = DistanceMatrix<f32>;
pub type SeriesProperties64 = SeriesProperties<f64>;
pub type SeriesProperties32 = SeriesProperties<f32>;
