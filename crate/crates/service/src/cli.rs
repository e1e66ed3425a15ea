//! Batch verbs: `ingest`, `backtest`, `rank`, `properties` and `serve`.
//!
//! Exit codes: 0 success, 1 invalid input, 2 runtime failure.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use workbench_core::backtest::{records_from_jsonl, records_to_jsonl};
use workbench_core::{
    compute_indicators, extract_properties, list_models, parse_dataset, rank_models, run_backtest, validate,
    BacktestConfig, Dataset, RankingWeights, RegistryConfig,
};

use crate::api::{self, AppState};
use crate::session::{ConfigOverrides, CreateSession, Session};

#[derive(Debug, Parser)]
#[command(name = "workbench", version, about = "Demand-forecast model selection workbench")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate a demand CSV into a dataset snapshot (JSON).
    Ingest {
        /// CSV with columns product_id, product_type, month, demand.
        input: PathBuf,
        /// Snapshot destination; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Backtest every registered model on a dataset; writes JSON lines.
    Backtest {
        /// Dataset snapshot (.json) or CSV.
        dataset: PathBuf,
        /// Backtest config JSON; the target month defaults to the month
        /// after the data ends.
        #[arg(short, long)]
        config: Option<PathBuf>,
        /// Model registry JSON; the built-in registry when omitted.
        #[arg(short, long)]
        registry: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Rank models from backtest records; writes a JSON leaderboard.
    Rank {
        /// Backtest records (JSON lines).
        records: PathBuf,
        /// Weights JSON {w_accuracy, w_variance, w_applicability}; equal
        /// weights when omitted.
        #[arg(short, long)]
        weights: Option<PathBuf>,
        #[arg(short = 'k', long, default_value_t = 5)]
        top_k: usize,
        /// Restrict to these products (comma separated); all by default.
        #[arg(short, long, value_delimiter = ',')]
        products: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Trend, seasonality, autocorrelation and stationarity per series.
    Properties {
        dataset: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Start the HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// CSV to open as an initial session.
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// Backtest config JSON for the initial session.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl From<workbench_core::Error> for CliError {
    fn from(e: workbench_core::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))
}

fn write_out(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    let result = match output {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    result.map_err(|e| CliError::Runtime(format!("cannot write output: {e}")))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("payload serializes");
    s.push('\n');
    s
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// Loads a snapshot written by `ingest`, or parses a CSV directly.
fn load_dataset(path: &Path) -> Result<Dataset<f64>, CliError> {
    let text = read(path)?;
    let dataset = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        let (dataset, report) = parse_dataset::<f64>(&text)?;
        if !report.errors.is_empty() {
            tracing::warn!(rejected = report.rejected_products().len(), "rows rejected while parsing");
        }
        dataset
    } else {
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?
    };
    let report = validate(&dataset);
    if !report.errors.is_empty() {
        return Err(CliError::Validation(format!(
            "dataset failed validation: {}",
            serde_json::to_string(&report.errors).expect("report serializes")
        )));
    }
    Ok(dataset)
}

fn backtest_config(path: Option<&Path>, dataset: &Dataset<f64>) -> Result<BacktestConfig, CliError> {
    let overrides: ConfigOverrides = match path {
        Some(p) => parse_json(p)?,
        None => ConfigOverrides::default(),
    };
    let end = dataset
        .global_end()
        .ok_or_else(|| CliError::Validation("dataset is empty".into()))?;
    Ok(overrides.resolve(end.succ()))
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Ingest { input, output } => {
            let (dataset, report) = parse_dataset::<f64>(&read(&input)?)?;
            write_out(output.as_deref(), &to_json(&dataset))?;
            eprintln!("{}", serde_json::to_string(&report).expect("report serializes"));
            if report.errors.is_empty() {
                Ok(())
            } else {
                Err(CliError::Validation(format!(
                    "{} row errors; {} products rejected",
                    report.errors.len(),
                    report.rejected_products().len()
                )))
            }
        }
        Command::Backtest {
            dataset,
            config,
            registry,
            output,
        } => {
            let dataset = load_dataset(&dataset)?;
            let registry = match registry {
                Some(p) => RegistryConfig::from_json(&read(&p)?)?,
                None => RegistryConfig::default_v1(),
            };
            let specs = list_models(&registry)?;
            let config = backtest_config(config.as_deref(), &dataset)?;
            let out = run_backtest(&dataset, &specs, &config)?;
            write_out(output.as_deref(), &records_to_jsonl(&out.records))
        }
        Command::Rank {
            records,
            weights,
            top_k,
            products,
            output,
        } => {
            let records = records_from_jsonl::<f64>(&read(&records)?)?;
            let weights: RankingWeights<f64> = match weights {
                Some(p) => parse_json(&p)?,
                None => RankingWeights::equal(),
            };
            let subset: BTreeSet<String> = if products.is_empty() {
                records.iter().map(|r| r.product_id.clone()).collect()
            } else {
                products.into_iter().collect()
            };
            let summaries = compute_indicators(&records, &subset, top_k)?;
            let ranked = rank_models(&summaries, &weights, top_k)?;
            write_out(output.as_deref(), &to_json(&ranked))
        }
        Command::Properties { dataset, output } => {
            let dataset = load_dataset(&dataset)?;
            let views: Vec<_> = dataset.iter().map(|s| extract_properties(s).view()).collect();
            write_out(output.as_deref(), &to_json(&views))
        }
        Command::Serve {
            port,
            host,
            dataset,
            config,
        } => serve(&host, port, dataset, config),
    }
}

fn serve(host: &str, port: u16, dataset: Option<PathBuf>, config: Option<PathBuf>) -> Result<(), CliError> {
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Runtime(e.to_string()))?;
    runtime.block_on(async {
        let state = AppState::default();
        if let Some(path) = dataset {
            let overrides: ConfigOverrides = match &config {
                Some(p) => parse_json(p)?,
                None => ConfigOverrides::default(),
            };
            let request = CreateSession {
                dataset_path: Some(path.display().to_string()),
                config: overrides,
                ..CreateSession::default()
            };
            let session = api::build_session(move |id| Session::create(id, request))
                .await
                .map_err(|e| CliError::Validation(e.to_string()))?;
            let id = state.insert(session).await;
            println!("session {id}");
        }
        let listener = tokio::net::TcpListener::bind((host, port))
            .await
            .map_err(|e| CliError::Runtime(format!("cannot bind {host}:{port}: {e}")))?;
        tracing::info!(%host, port, "listening");
        api::serve(listener, state)
            .await
            .map_err(|e| CliError::Runtime(e.to_string()))
    })
}
