//! Monthly demand datasets: CSV ingestion, validation and history slicing.
//!
//! A dataset maps product ids to gap-free monthly series. Interior months
//! missing from the input are filled with zero demand and reported as a
//! warning; rows that cannot be read are reported as errors and cause the
//! whole product to be rejected so nothing is silently patched over.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::month::MonthIndex;
use crate::scalar::Scalar;

/// Series shorter than this many months get a "short history" warning.
pub const SHORT_HISTORY_MONTHS: usize = 24;

pub const CSV_HEADER: [&str; 4] = ["product_id", "product_type", "month", "demand"];

/// One product's contiguous monthly demand history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandSeries<T: Scalar = f64> {
    pub product_id: String,
    pub product_type: String,
    pub start: MonthIndex,
    pub values: Vec<T>,
}

impl<T: Scalar> DemandSeries<T> {
    pub fn new(
        product_id: impl Into<String>,
        product_type: impl Into<String>,
        start: MonthIndex,
        values: Vec<T>,
    ) -> Self {
        Self {
            product_id: product_id.into(),
            product_type: product_type.into(),
            start,
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Last month covered; equals `start` for an empty series.
    pub fn end(&self) -> MonthIndex {
        self.start.add_months(self.len().saturating_sub(1) as i64)
    }

    pub fn month_at(&self, index: usize) -> MonthIndex {
        self.start.add_months(index as i64)
    }

    pub fn index_of(&self, month: MonthIndex) -> Option<usize> {
        let offset = month.months_since(self.start);
        (offset >= 0 && (offset as usize) < self.len()).then_some(offset as usize)
    }

    pub fn value_at(&self, month: MonthIndex) -> Option<T> {
        self.index_of(month).map(|i| self.values[i])
    }

    pub fn last(&self) -> Option<T> {
        self.values.last().copied()
    }

    /// Same identity, different values and start.
    pub fn with_values(&self, start: MonthIndex, values: Vec<T>) -> Self {
        Self {
            product_id: self.product_id.clone(),
            product_type: self.product_type.clone(),
            start,
            values,
        }
    }
}

/// The prefix of `series` strictly before `cutoff`.
pub fn slice_history<T: Scalar>(series: &DemandSeries<T>, cutoff: MonthIndex) -> Result<DemandSeries<T>> {
    let available = cutoff.months_since(series.start);
    if available <= 0 || series.is_empty() {
        return Err(Error::EmptyHistory);
    }
    let n = (available as usize).min(series.len());
    Ok(series.with_values(series.start, series.values[..n].to_vec()))
}

/// Products keyed by id, with the overall covered span.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "DatasetRepr<T>", try_from = "DatasetRepr<T>")]
pub struct Dataset<T: Scalar = f64> {
    series: BTreeMap<String, DemandSeries<T>>,
    global_start: Option<MonthIndex>,
    global_end: Option<MonthIndex>,
}

/// Canonical JSON layout: series as an ordered array of objects.
#[derive(Serialize, Deserialize)]
struct DatasetRepr<T: Scalar> {
    global_start: Option<MonthIndex>,
    global_end: Option<MonthIndex>,
    series: Vec<DemandSeries<T>>,
}

impl<T: Scalar> From<Dataset<T>> for DatasetRepr<T> {
    fn from(d: Dataset<T>) -> Self {
        Self {
            global_start: d.global_start,
            global_end: d.global_end,
            series: d.series.into_values().collect(),
        }
    }
}

impl<T: Scalar> TryFrom<DatasetRepr<T>> for Dataset<T> {
    type Error = Error;

    fn try_from(repr: DatasetRepr<T>) -> Result<Self> {
        let mut d = Dataset::from_series(repr.series)?;
        // Keep a wider declared span if the snapshot carries one.
        if let (Some(a), Some(b)) = (repr.global_start, d.global_start) {
            d.global_start = Some(a.min(b));
        }
        if let (Some(a), Some(b)) = (repr.global_end, d.global_end) {
            d.global_end = Some(a.max(b));
        }
        Ok(d)
    }
}

impl<T: Scalar> Default for Dataset<T> {
    fn default() -> Self {
        Self {
            series: BTreeMap::new(),
            global_start: None,
            global_end: None,
        }
    }
}

impl<T: Scalar> Dataset<T> {
    /// Builds a dataset; fails on duplicate product ids. Values are not
    /// checked here, see [`validate`].
    pub fn from_series(series: impl IntoIterator<Item = DemandSeries<T>>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for s in series {
            if map.contains_key(&s.product_id) {
                return Err(Error::MalformedInput(format!("duplicate product id {:?}", s.product_id)));
            }
            map.insert(s.product_id.clone(), s);
        }
        let global_start = map.values().filter(|s| !s.is_empty()).map(|s| s.start).min();
        let global_end = map.values().filter(|s| !s.is_empty()).map(|s| s.end()).max();
        Ok(Self {
            series: map,
            global_start,
            global_end,
        })
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    pub fn get(&self, product_id: &str) -> Option<&DemandSeries<T>> {
        self.series.get(product_id)
    }

    /// Series in ascending product id order.
    pub fn iter(&self) -> impl Iterator<Item = &DemandSeries<T>> {
        self.series.values()
    }

    pub fn product_ids(&self) -> impl Iterator<Item = &str> {
        self.series.keys().map(String::as_str)
    }

    pub fn global_start(&self) -> Option<MonthIndex> {
        self.global_start
    }

    pub fn global_end(&self) -> Option<MonthIndex> {
        self.global_end
    }

    /// Canonical CSV rendering, one row per (product, month).
    pub fn to_csv(&self) -> String {
        let mut out = CSV_HEADER.join(",");
        out.push('\n');
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        for s in self.iter() {
            for (i, v) in s.values.iter().enumerate() {
                w.write_record([
                    s.product_id.as_str(),
                    s.product_type.as_str(),
                    &s.month_at(i).to_string(),
                    &v.to_string(),
                ])
                .expect("in-memory csv write");
            }
        }
        let body = w.into_inner().expect("in-memory csv flush");
        out.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowError {
    pub product_id: String,
    pub month: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Warning {
    pub product_id: String,
    pub reason: String,
}

/// Findings of an ingestion or validation pass.
///
/// `accepted_count` plus the number of distinct product ids in `errors`
/// equals the number of products seen.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub errors: Vec<RowError>,
    pub warnings: Vec<Warning>,
    pub accepted_count: usize,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn rejected_products(&self) -> BTreeSet<&str> {
        self.errors.iter().map(|e| e.product_id.as_str()).collect()
    }
}

#[derive(Default)]
struct ProductRows {
    product_type: String,
    type_conflict: bool,
    rows: BTreeMap<MonthIndex, f64>,
}

/// Parses `product_id,product_type,month,demand` CSV text.
///
/// Only a missing or wrong header is a hard error; everything else is
/// reported row by row in the returned [`ValidationReport`].
pub fn parse_dataset<T: Scalar>(csv_text: &str) -> Result<(Dataset<T>, ValidationReport)> {
    let text = csv_text.strip_prefix('\u{feff}').unwrap_or(csv_text);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(text.as_bytes());

    let header = reader
        .headers()
        .map_err(|e| Error::MalformedInput(format!("unreadable header: {e}")))?
        .clone();
    if header.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(Error::MalformedInput(format!(
            "expected header {:?}, found {:?}",
            CSV_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }

    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut products: BTreeMap<String, ProductRows> = BTreeMap::new();
    let mut errors = Vec::new();

    for record in reader.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                seen.insert(String::new());
                errors.push(RowError {
                    product_id: String::new(),
                    month: String::new(),
                    reason: format!("unreadable row: {e}"),
                });
                continue;
            }
        };
        let field = |i: usize| record.get(i).unwrap_or("");
        let product_id = field(0).to_string();
        let month_token = field(2).to_string();
        seen.insert(product_id.clone());
        let mut row_error = |reason: String| {
            errors.push(RowError {
                product_id: product_id.clone(),
                month: month_token.clone(),
                reason,
            })
        };

        if record.len() != CSV_HEADER.len() {
            row_error(format!("expected 4 fields, found {}", record.len()));
            continue;
        }
        if product_id.is_empty() {
            row_error("empty product_id".into());
            continue;
        }
        let month: MonthIndex = match month_token.parse() {
            Ok(m) => m,
            Err(_) => {
                row_error("malformed month".into());
                continue;
            }
        };
        let demand: f64 = match field(3).trim().parse::<f64>() {
            Ok(v) if !v.is_finite() => {
                row_error("non-finite demand".into());
                continue;
            }
            Ok(v) if v < 0.0 => {
                row_error("negative demand".into());
                continue;
            }
            Ok(v) => v,
            Err(_) => {
                row_error("non-numeric demand".into());
                continue;
            }
        };
        if T::from_f64(demand).is_none_or(|v| !v.is_finite()) {
            row_error("demand not representable".into());
            continue;
        }

        let entry = products.entry(product_id.clone()).or_insert_with(|| ProductRows {
            product_type: field(1).to_string(),
            ..Default::default()
        });
        if entry.product_type != field(1) {
            entry.type_conflict = true;
        }
        if entry.rows.contains_key(&month) {
            row_error("duplicate month".into());
            continue;
        }
        entry.rows.insert(month, demand);
    }

    let rejected: BTreeSet<String> = errors.iter().map(|e| e.product_id.clone()).collect();
    let mut warnings = Vec::new();
    let mut series = Vec::new();
    for (product_id, rows) in products {
        if rejected.contains(&product_id) {
            continue;
        }
        let (&start, _) = rows.rows.iter().next().expect("product has at least one row");
        let (&end, _) = rows.rows.iter().next_back().expect("product has at least one row");
        let span = end.months_since(start) as usize + 1;
        let mut values = Vec::with_capacity(span);
        let mut filled = Vec::new();
        for i in 0..span {
            let m = start.add_months(i as i64);
            match rows.rows.get(&m) {
                Some(&v) => values.push(T::lit(v)),
                None => {
                    filled.push(m.to_string());
                    values.push(T::zero());
                }
            }
        }
        if !filled.is_empty() {
            warnings.push(Warning {
                product_id: product_id.clone(),
                reason: format!("filled {} missing month(s) with 0: {}", filled.len(), filled.join(" ")),
            });
        }
        if rows.type_conflict {
            warnings.push(Warning {
                product_id: product_id.clone(),
                reason: format!("conflicting product_type values; kept {:?}", rows.product_type),
            });
        }
        series.push(DemandSeries::new(product_id, rows.product_type, start, values));
    }

    let dataset = Dataset::from_series(series)?;
    let checked = validate(&dataset);
    debug_assert!(checked.errors.is_empty());
    warnings.extend(checked.warnings);
    warnings.sort_by(|a, b| a.product_id.cmp(&b.product_id));

    let report = ValidationReport {
        accepted_count: seen.len() - rejected.len(),
        errors,
        warnings,
    };
    debug_assert_eq!(report.accepted_count, dataset.len());
    Ok((dataset, report))
}

/// Re-checks the dataset invariants. Idempotent.
pub fn validate<T: Scalar>(dataset: &Dataset<T>) -> ValidationReport {
    let mut report = ValidationReport::default();
    for (key, s) in &dataset.series {
        let before = report.errors.len();
        let mut err = |month: String, reason: String| {
            report.errors.push(RowError {
                product_id: key.clone(),
                month,
                reason,
            })
        };
        if key != &s.product_id {
            err(String::new(), format!("keyed as {key:?} but carries id {:?}", s.product_id));
        }
        if s.is_empty() {
            err(String::new(), "empty series".into());
        }
        for (i, v) in s.values.iter().enumerate() {
            if !v.is_finite() {
                err(s.month_at(i).to_string(), "non-finite demand".into());
            } else if *v < T::zero() {
                err(s.month_at(i).to_string(), "negative demand".into());
            }
        }
        if !s.is_empty() {
            let outside = dataset.global_start.is_none_or(|g| s.start < g)
                || dataset.global_end.is_none_or(|g| s.end() > g);
            if outside {
                err(String::new(), "span outside dataset bounds".into());
            }
        }
        if report.errors.len() == before {
            report.accepted_count += 1;
        }
        if !s.is_empty() && s.len() < SHORT_HISTORY_MONTHS {
            report.warnings.push(Warning {
                product_id: key.clone(),
                reason: format!("short history: {} months", s.len()),
            });
        }
    }
    report
}
