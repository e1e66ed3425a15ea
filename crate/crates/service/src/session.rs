//! Analysis sessions: analytics computed once at creation, plus the small
//! mutable selection state (cluster, weights, removals) the views steer.
//!
//! Every response is a pure function of the creation request and the
//! ordered mutation log, so a [`Snapshot`] replays to identical output.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use workbench_core::properties::PropertiesView;
use workbench_core::ranking::{product_model_stats, ProductModelStats};
use workbench_core::similarity::MIN_ALIGNED_MONTHS;
use workbench_core::{
    compute_indicators, distance_matrix, extract_properties, flag_abnormal, list_models, mds_project, nearest_similar,
    parse_dataset, rank_models, run_backtest, slice_history, z_normalize, BacktestConfig, BacktestRecord, Dataset,
    ForecastResult, IndicatorSummary, ModelSpec, MonthIndex, NormalizedSeries, ProjectionPoint, RankedModel,
    RankingWeights, RegistryConfig, Role, ValidationReport,
};

use crate::error::ApiError;
use crate::payloads::*;

/// Backtest settings supplied at session creation; unset fields take the
/// defaults, and the target month defaults to the month after the data.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_month: Option<MonthIndex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_w: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top_k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abnormal_multiplier: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy_floor_epsilon: Option<f64>,
}

impl ConfigOverrides {
    pub fn resolve(&self, default_target: MonthIndex) -> BacktestConfig {
        let mut c = BacktestConfig::new(self.target_month.unwrap_or(default_target));
        if let Some(v) = self.window_w {
            c.window_w = v;
        }
        if let Some(v) = self.top_k {
            c.top_k = v;
        }
        if let Some(v) = self.abnormal_multiplier {
            c.abnormal_multiplier = v;
        }
        if let Some(v) = self.accuracy_floor_epsilon {
            c.accuracy_floor_epsilon = v;
        }
        c
    }
}

/// Body of `POST /sessions`. Exactly one of `dataset_path` and
/// `dataset_csv` must be given.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset_csv: Option<String>,
    #[serde(default)]
    pub config: ConfigOverrides,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<RankingWeights<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub registry: Option<RegistryConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Mutation {
    SetCluster {
        product_ids: Vec<String>,
    },
    SetWeights {
        weights: RankingWeights<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        top_k: Option<usize>,
    },
    RemoveSimilar {
        focus: String,
        removed: String,
        n: usize,
    },
}

/// Everything needed to rebuild a session elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub version: u32,
    pub request: CreateSession,
    pub mutations: Vec<Mutation>,
}

pub const SNAPSHOT_VERSION: u32 = 1;

type PairKey = (String, String);

/// Immutable analytics shared by all requests of a session.
#[derive(Debug)]
pub struct Analytics {
    pub dataset: Dataset<f64>,
    pub report: ValidationReport,
    pub specs: Vec<ModelSpec>,
    pub config: BacktestConfig,
    pub records: Vec<BacktestRecord<f64>>,
    /// Records are grouped by product; the span of each product's run.
    record_spans: BTreeMap<String, std::ops::Range<usize>>,
    target_forecasts: BTreeMap<PairKey, f64>,
    stats: BTreeMap<PairKey, ProductModelStats<f64>>,
    normalized: Vec<NormalizedSeries<f64>>,
    projection: Vec<ProjectionPoint<f64>>,
    excluded_from_projection: Vec<String>,
    properties: BTreeMap<String, PropertiesView<f64>>,
    roles: BTreeMap<String, Role>,
}

fn load_csv(request: &CreateSession) -> Result<String, ApiError> {
    match (&request.dataset_path, &request.dataset_csv) {
        (Some(path), None) => std::fs::read_to_string(path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                ApiError::not_found(format!("dataset file {path:?} does not exist"))
            } else {
                ApiError::unprocessable("unreadable_dataset", format!("cannot read {path:?}: {e}"))
            }
        }),
        (None, Some(text)) => Ok(text.clone()),
        _ => Err(ApiError::unprocessable(
            "invalid_request",
            "give exactly one of dataset_path and dataset_csv",
        )),
    }
}

impl Analytics {
    pub fn build(request: &CreateSession) -> Result<Self, ApiError> {
        let text = load_csv(request)?;
        let (dataset, report) = parse_dataset::<f64>(&text)?;
        if dataset.is_empty() {
            return Err(
                ApiError::unprocessable("no_valid_products", "the dataset contains no valid products").with_details(json!({
                    "error_count": report.errors.len(),
                    "rejected_products": report.rejected_products(),
                    "errors": report.errors.iter().take(20).collect::<Vec<_>>(),
                })),
            );
        }
        let registry = request.registry.clone().unwrap_or_else(RegistryConfig::default_v1);
        let specs = list_models(&registry)?;
        let end = dataset.global_end().expect("non-empty dataset has an end");
        let config = request.config.resolve(end.succ());
        config.check(specs.len())?;
        let output = run_backtest(&dataset, &specs, &config)?;

        let target = config.target_month;
        let target_forecasts = output
            .target_forecasts
            .iter()
            .map(|f| ((f.product_id.clone(), f.model_id.clone()), f.value))
            .collect();
        let stats = product_model_stats(&output.records);
        let mut record_spans: BTreeMap<String, std::ops::Range<usize>> = BTreeMap::new();
        for (i, r) in output.records.iter().enumerate() {
            record_spans.entry(r.product_id.clone()).or_insert(i..i).end = i + 1;
        }

        let roles: BTreeMap<String, Role> = dataset
            .iter()
            .map(|s| {
                let last_needed = target.pred();
                let role = if s.start <= last_needed && last_needed <= s.end() {
                    Role::ToForecast
                } else {
                    Role::ForecastedBefore
                };
                (s.product_id.clone(), role)
            })
            .collect();

        let normalized: Vec<NormalizedSeries<f64>> = dataset.iter().map(z_normalize).collect();
        let eligible: Vec<NormalizedSeries<f64>> = normalized
            .iter()
            .filter(|s| s.values.len() >= MIN_ALIGNED_MONTHS)
            .cloned()
            .collect();
        let projection = match eligible.len() {
            0 => Vec::new(),
            1 => vec![ProjectionPoint {
                product_id: eligible[0].product_id.clone(),
                x: 0.0,
                y: 0.0,
                role: roles[&eligible[0].product_id],
            }],
            _ => {
                let (dm, _) = distance_matrix(&eligible)?;
                mds_project(&dm)?
                    .into_iter()
                    .map(|p| {
                        let role = roles[&p.product_id];
                        ProjectionPoint::from_mds(p, role)
                    })
                    .collect()
            }
        };
        let in_projection: BTreeSet<&str> = projection.iter().map(|p| p.product_id.as_str()).collect();
        let excluded_from_projection = dataset
            .product_ids()
            .filter(|id| !in_projection.contains(id))
            .map(str::to_string)
            .collect();

        let series: Vec<_> = dataset.iter().collect();
        let properties = series
            .par_iter()
            .map(|s| (s.product_id.clone(), extract_properties(s).view()))
            .collect::<Vec<_>>()
            .into_iter()
            .collect();

        Ok(Self {
            dataset,
            report,
            specs,
            config,
            records: output.records,
            record_spans,
            target_forecasts,
            stats,
            normalized,
            projection,
            excluded_from_projection,
            properties,
            roles,
        })
    }

    fn require_product(&self, product_id: &str) -> Result<(), ApiError> {
        if self.dataset.get(product_id).is_some() {
            Ok(())
        } else {
            Err(ApiError::not_found(format!("unknown product {product_id:?}")))
        }
    }

    fn performance(&self, product_id: &str, model_id: &str) -> ModelPerformance {
        let s = self.stats.get(&(product_id.to_string(), model_id.to_string()));
        ModelPerformance {
            model_id: model_id.to_string(),
            mean_accuracy: s.map(|s| s.mean_accuracy),
            accuracy_variance: s.map(|s| s.accuracy_variance),
        }
    }

    /// Target-month forecast and whether it breaches the abnormal threshold.
    fn target_forecast(&self, product_id: &str, model_id: &str) -> (Option<f64>, bool) {
        let Some(&value) = self.target_forecasts.get(&(product_id.to_string(), model_id.to_string())) else {
            return (None, false);
        };
        let series = self.dataset.get(product_id).expect("forecast for a known product");
        let abnormal = slice_history(series, self.config.target_month)
            .and_then(|history| {
                let f = ForecastResult {
                    product_id: product_id.to_string(),
                    target_month: self.config.target_month,
                    model_id: model_id.to_string(),
                    value,
                };
                flag_abnormal(&f, &history, self.config.abnormal_multiplier)
            })
            .unwrap_or(false);
        (Some(value), abnormal)
    }
}

#[derive(Debug)]
pub struct Session {
    pub id: String,
    request: CreateSession,
    analytics: Arc<Analytics>,
    weights: RankingWeights<f64>,
    top_k: usize,
    cluster: BTreeSet<String>,
    removed: BTreeMap<String, BTreeSet<String>>,
    summaries: Vec<IndicatorSummary<f64>>,
    log: Vec<Mutation>,
}

impl Session {
    /// Parses, validates and analyzes the dataset. The initial cluster is
    /// the whole dataset.
    pub fn create(id: impl Into<String>, request: CreateSession) -> Result<Self, ApiError> {
        let analytics = Arc::new(Analytics::build(&request)?);
        let weights = request.weights.unwrap_or_default();
        weights.normalized()?;
        let cluster: BTreeSet<String> = analytics.dataset.product_ids().map(str::to_string).collect();
        let top_k = analytics.config.top_k;
        let summaries = compute_indicators(&analytics.records, &cluster, top_k)?;
        Ok(Self {
            id: id.into(),
            request,
            analytics,
            weights,
            top_k,
            cluster,
            removed: BTreeMap::new(),
            summaries,
            log: Vec::new(),
        })
    }

    /// Rebuilds a session and replays its mutation log.
    pub fn restore(id: impl Into<String>, snapshot: Snapshot) -> Result<Self, ApiError> {
        if snapshot.version != SNAPSHOT_VERSION {
            return Err(ApiError::unprocessable(
                "unsupported_snapshot",
                format!("snapshot version {} is not supported", snapshot.version),
            ));
        }
        let mut session = Self::create(id, snapshot.request)?;
        for m in snapshot.mutations {
            session.apply(m)?;
        }
        Ok(session)
    }

    pub fn apply(&mut self, mutation: Mutation) -> Result<(), ApiError> {
        match mutation {
            Mutation::SetCluster { product_ids } => self.set_cluster(product_ids).map(drop),
            Mutation::SetWeights { weights, top_k } => self.set_weights(weights, top_k).map(drop),
            Mutation::RemoveSimilar { focus, removed, n } => self.remove_similar(&focus, &removed, n).map(drop),
        }
    }

    pub fn analytics(&self) -> &Analytics {
        &self.analytics
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            version: SNAPSHOT_VERSION,
            request: self.request.clone(),
            mutations: self.log.clone(),
        }
    }

    pub fn created(&self) -> SessionCreated {
        let a = &self.analytics;
        SessionCreated {
            session_id: self.id.clone(),
            target_month: a.config.target_month,
            product_count: a.dataset.len(),
            eligible_count: a.projection.len(),
            record_count: a.records.len(),
            validation: ValidationSummary {
                error_count: a.report.errors.len(),
                warning_count: a.report.warnings.len(),
                rejected_products: a.report.rejected_products().into_iter().map(str::to_string).collect(),
                excluded_from_projection: a.excluded_from_projection.clone(),
            },
        }
    }

    pub fn projection(&self) -> ProjectionPayload {
        ProjectionPayload {
            target_month: self.analytics.config.target_month,
            points: self.analytics.projection.clone(),
        }
    }

    fn ranked(&self) -> Result<Vec<RankedModel<f64>>, ApiError> {
        if self.summaries.is_empty() {
            return Ok(Vec::new());
        }
        Ok(rank_models(&self.summaries, &self.weights, self.top_k)?)
    }

    pub fn ranking(&self) -> Result<RankingPayload, ApiError> {
        Ok(RankingPayload {
            top_k: self.top_k,
            cluster_size: self.cluster.len(),
            weights: self.weights,
            ranking: self.ranked()?,
        })
    }

    fn top_models(&self) -> Result<Vec<RankedModel<f64>>, ApiError> {
        Ok(self.ranked()?.into_iter().filter(|m| m.in_top_k).collect())
    }

    pub fn set_cluster(&mut self, product_ids: Vec<String>) -> Result<ClusterPayload, ApiError> {
        let cluster: BTreeSet<String> = product_ids.iter().cloned().collect();
        if cluster.is_empty() {
            return Err(ApiError::unprocessable("empty_selection", "empty selection"));
        }
        let unknown: Vec<&String> = cluster.iter().filter(|id| self.analytics.dataset.get(id).is_none()).collect();
        if !unknown.is_empty() {
            return Err(ApiError::unprocessable("unknown_products", "selection contains unknown products")
                .with_details(json!({ "unknown": unknown })));
        }
        self.summaries = compute_indicators(&self.analytics.records, &cluster, self.top_k)?;
        self.cluster = cluster;
        self.log.push(Mutation::SetCluster { product_ids });
        self.cluster_payload()
    }

    pub fn cluster_payload(&self) -> Result<ClusterPayload, ApiError> {
        let a = &self.analytics;
        let ranking = self.ranking()?;
        let top: Vec<&RankedModel<f64>> = ranking.ranking.iter().filter(|m| m.in_top_k).collect();
        let products = self
            .cluster
            .iter()
            .map(|pid| {
                let models = top
                    .iter()
                    .map(|m| {
                        let perf = a.performance(pid, &m.model_id);
                        let (forecast, abnormal) = a.target_forecast(pid, &m.model_id);
                        PanelModel {
                            model_id: m.model_id.clone(),
                            rank: m.rank,
                            mean_accuracy: perf.mean_accuracy,
                            accuracy_variance: perf.accuracy_variance,
                            forecast,
                            abnormal,
                        }
                    })
                    .collect();
                let others: Vec<f64> = a
                    .specs
                    .iter()
                    .filter(|s| !top.iter().any(|m| m.model_id == s.model_id))
                    .filter_map(|s| a.performance(pid, &s.model_id).mean_accuracy)
                    .collect();
                ProductPanel {
                    product_id: pid.clone(),
                    role: a.roles[pid],
                    models,
                    other_models: AccuracyHistogram::from_accuracies(&others),
                }
            })
            .collect();
        Ok(ClusterPayload { ranking, products })
    }

    /// Re-ranks under new weights. Backtests are reused; indicators are
    /// recomputed only when `top_k` changes (applicability depends on it).
    pub fn set_weights(&mut self, weights: RankingWeights<f64>, top_k: Option<usize>) -> Result<RankingPayload, ApiError> {
        weights.normalized()?;
        let k = top_k.unwrap_or(self.top_k);
        let models = self.analytics.specs.len();
        if k == 0 || k > models {
            return Err(ApiError::unprocessable(
                "invalid_config",
                format!("top_k = {k} must lie in 1..={models}"),
            ));
        }
        if k != self.top_k {
            self.summaries = compute_indicators(&self.analytics.records, &self.cluster, k)?;
            self.top_k = k;
        }
        self.weights = weights;
        self.log.push(Mutation::SetWeights { weights, top_k });
        self.ranking()
    }

    pub fn product_detail(&self, product_id: &str) -> Result<ProductDetail, ApiError> {
        let a = &self.analytics;
        a.require_product(product_id)?;
        let series = a.dataset.get(product_id).expect("checked above");
        let months = a.config.window_months();
        let own = a.record_spans.get(product_id).map_or(&[][..], |span| &a.records[span.clone()]);
        let column = |model_id: &str| -> Vec<Option<&BacktestRecord<f64>>> {
            months
                .iter()
                .map(|m| own.iter().find(|r| r.model_id == model_id && r.month == *m))
                .collect()
        };
        let models = self
            .top_models()?
            .into_iter()
            .map(|m| {
                let col = column(&m.model_id);
                let (target_forecast, abnormal) = a.target_forecast(product_id, &m.model_id);
                DetailModel {
                    model_id: m.model_id.clone(),
                    rank: m.rank,
                    accuracy: col.iter().map(|r| r.map(|r| r.accuracy)).collect(),
                    forecast: col.iter().map(|r| r.map(|r| r.forecast)).collect(),
                    target_forecast,
                    abnormal,
                }
            })
            .collect();
        Ok(ProductDetail {
            product_id: product_id.to_string(),
            product_type: series.product_type.clone(),
            role: a.roles[product_id],
            target_month: a.config.target_month,
            history_start: series.start,
            history: series.values.clone(),
            actual: months.iter().map(|m| series.value_at(*m)).collect(),
            months,
            models,
        })
    }

    /// The `n` nearest similar products not removed for this focus.
    fn similar(&self, focus: &str, n: usize) -> Result<Vec<(String, f64)>, ApiError> {
        let a = &self.analytics;
        a.require_product(focus)?;
        if n == 0 {
            return Err(ApiError::unprocessable("invalid_config", "n must be >= 1"));
        }
        let removed = self.removed.get(focus);
        Ok(nearest_similar(focus, &a.normalized, usize::MAX)?
            .into_iter()
            .filter(|(id, _)| removed.is_none_or(|r| !r.contains(id)))
            .take(n)
            .collect())
    }

    pub fn risk_view(&self, focus: &str, n: usize) -> Result<RiskPayload, ApiError> {
        self.risk_payload(focus, n, Vec::new())
    }

    fn risk_payload(&self, focus: &str, n: usize, warnings: Vec<String>) -> Result<RiskPayload, ApiError> {
        let a = &self.analytics;
        let similar = self.similar(focus, n)?;
        let top = self.top_models()?;
        let per_model = |pid: &str| top.iter().map(|m| a.performance(pid, &m.model_id)).collect::<Vec<_>>();
        Ok(RiskPayload {
            focus: RiskFocus {
                product_id: focus.to_string(),
                properties: a.properties[focus].clone(),
                per_model: per_model(focus),
            },
            rows: similar
                .into_iter()
                .map(|(pid, d)| RiskRow {
                    properties: a.properties[&pid].clone(),
                    per_model: per_model(&pid),
                    product_id: pid,
                    distance_to_focus: d,
                })
                .collect(),
            removed: self
                .removed
                .get(focus)
                .map(|r| r.iter().cloned().collect())
                .unwrap_or_default(),
            warnings,
        })
    }

    /// Hides `removed` from the focus product's similar list; the next
    /// nearest candidate backfills. Ids not currently listed are ignored
    /// with a warning.
    pub fn remove_similar(&mut self, focus: &str, removed: &str, n: usize) -> Result<RiskPayload, ApiError> {
        if focus == removed {
            return Err(ApiError::unprocessable(
                "invalid_removal",
                "the focus product cannot be removed from its own similar list",
            ));
        }
        let listed = self.similar(focus, n)?;
        if !listed.iter().any(|(id, _)| id == removed) {
            let warning = format!("{removed:?} is not in the similar list of {focus:?}; nothing removed");
            return self.risk_payload(focus, n, vec![warning]);
        }
        self.removed
            .entry(focus.to_string())
            .or_default()
            .insert(removed.to_string());
        self.log.push(Mutation::RemoveSimilar {
            focus: focus.to_string(),
            removed: removed.to_string(),
            n,
        });
        self.risk_payload(focus, n, Vec::new())
    }

    pub fn models(&self) -> Result<ModelsPayload, ApiError> {
        let ranked = self.ranked()?;
        Ok(ModelsPayload {
            top_k: self.top_k,
            models: self
                .analytics
                .specs
                .iter()
                .map(|spec| {
                    let r = ranked.iter().find(|m| m.model_id == spec.model_id);
                    ModelEntry {
                        spec: spec.clone(),
                        rank: r.map(|m| m.rank),
                        in_top_k: r.is_some_and(|m| m.in_top_k),
                    }
                })
                .collect(),
        })
    }
}
