//! Response bodies, shaped after the views that consume them.

use serde::{Deserialize, Serialize};
use workbench_core::properties::PropertiesView;
use workbench_core::{MonthIndex, ModelSpec, ProjectionPoint, RankedModel, RankingWeights, Role};

/// Number of bins in the accuracy histogram of non-top-k models.
pub const HISTOGRAM_BINS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionCreated {
    pub session_id: String,
    pub target_month: MonthIndex,
    pub product_count: usize,
    pub eligible_count: usize,
    pub record_count: usize,
    pub validation: ValidationSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationSummary {
    pub error_count: usize,
    pub warning_count: usize,
    pub rejected_products: Vec<String>,
    /// Products left out of the projection (history too short to align).
    pub excluded_from_projection: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionPayload {
    pub target_month: MonthIndex,
    pub points: Vec<ProjectionPoint<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingPayload {
    pub top_k: usize,
    pub cluster_size: usize,
    pub weights: RankingWeights<f64>,
    pub ranking: Vec<RankedModel<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterPayload {
    #[serde(flatten)]
    pub ranking: RankingPayload,
    pub products: Vec<ProductPanel>,
}

/// One product in the selected cluster, with the global top-k models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductPanel {
    pub product_id: String,
    pub role: Role,
    pub models: Vec<PanelModel>,
    pub other_models: AccuracyHistogram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelModel {
    pub model_id: String,
    pub rank: usize,
    /// `None` when the model has no backtest records for this product.
    pub mean_accuracy: Option<f64>,
    pub accuracy_variance: Option<f64>,
    /// Forecast for the target month, when the product has one.
    pub forecast: Option<f64>,
    pub abnormal: bool,
}

/// Per-product mean accuracies of the models outside the top k, binned
/// over `[0, 1]` in equal-width bins (the last bin includes 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyHistogram {
    pub counts: Vec<usize>,
    pub model_count: usize,
}

impl AccuracyHistogram {
    pub fn from_accuracies(values: &[f64]) -> Self {
        let mut counts = vec![0; HISTOGRAM_BINS];
        for &v in values {
            let bin = ((v.clamp(0.0, 1.0) * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1);
            counts[bin] += 1;
        }
        Self {
            counts,
            model_count: values.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductDetail {
    pub product_id: String,
    pub product_type: String,
    pub role: Role,
    pub target_month: MonthIndex,
    pub history_start: MonthIndex,
    pub history: Vec<f64>,
    /// Backtest window, shared by every model row.
    pub months: Vec<MonthIndex>,
    pub actual: Vec<Option<f64>>,
    pub models: Vec<DetailModel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetailModel {
    pub model_id: String,
    pub rank: usize,
    pub accuracy: Vec<Option<f64>>,
    pub forecast: Vec<Option<f64>>,
    pub target_forecast: Option<f64>,
    pub abnormal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelPerformance {
    pub model_id: String,
    pub mean_accuracy: Option<f64>,
    pub accuracy_variance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskFocus {
    pub product_id: String,
    pub properties: PropertiesView<f64>,
    pub per_model: Vec<ModelPerformance>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskRow {
    pub product_id: String,
    pub distance_to_focus: f64,
    pub properties: PropertiesView<f64>,
    pub per_model: Vec<ModelPerformance>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskPayload {
    pub focus: RiskFocus,
    /// Ascending by distance to the focus product.
    pub rows: Vec<RiskRow>,
    pub removed: Vec<String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEntry {
    #[serde(flatten)]
    pub spec: ModelSpec,
    pub rank: Option<usize>,
    pub in_top_k: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelsPayload {
    pub top_k: usize,
    /// Registry order.
    pub models: Vec<ModelEntry>,
}
