//! Fixtures shared by the service tests: synthetic datasets, schema
//! validation and an in-process HTTP client.
#![allow(dead_code)]

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde_json::{json, Value};
use tower::ServiceExt;
use workbench_core::MonthIndex;
use workbench_service::{router, AppState};

pub const SCHEMA: &str = include_str!("../../schemas/api.schema.json");

pub fn month(y: i32, m: u32) -> MonthIndex {
    MonthIndex::new(y, m).unwrap()
}

/// Demand CSV for `products` series over `months` months starting 2015-01.
/// Roughly one product in six stops early and one in eight starts late, so
/// both projection roles and short histories occur.
pub fn synthetic_csv(products: usize, months: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = month(2015, 1);
    let mut out = String::from("product_id,product_type,month,demand\n");
    for p in 0..products {
        let (first, last) = match p % 24 {
            0 | 6 | 12 | 18 => (0, months - rng.random_range(2..10).min(months - 1)),
            3 | 9 | 15 => (rng.random_range(6..(months / 2).max(7)).min(months - 1), months),
            _ => (0, months),
        };
        let level = rng.random_range(10.0..400.0);
        let slope = rng.random_range(-0.3..0.8) * level / 50.0;
        let amp = rng.random_range(0.0..0.5) * level;
        let phase = rng.random_range(0.0..12.0);
        let noise = rng.random_range(0.02..0.3) * level;
        let kind = ["widget", "gadget", "part", "tool"][p % 4];
        for t in first..last {
            let tf = t as f64;
            let e: f64 = StandardNormal.sample(&mut rng);
            let v = (level + slope * tf + amp * ((tf + phase) * std::f64::consts::TAU / 12.0).sin() + noise * e).max(0.0);
            out.push_str(&format!("P{p:05},{kind},{},{}\n", start.add_months(t as i64), v.round()));
        }
    }
    out
}

/// Validates `value` against one payload definition of the API schema.
pub fn check_schema(def: &str, value: &Value) {
    let mut schema: Value = serde_json::from_str(SCHEMA).unwrap();
    schema["$ref"] = json!(format!("#/$defs/{def}"));
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator
        .iter_errors(value)
        .take(5)
        .map(|e| format!("{} at {}", e, e.instance_path))
        .collect();
    assert!(errors.is_empty(), "{def} schema violations: {errors:#?}");
}

pub fn app() -> Router {
    router(AppState::default())
}

pub async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let request = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

/// Creates a session from inline CSV and returns its id.
pub async fn create(app: &Router, csv: &str, config: Value) -> String {
    let (status, body) = call(app, "POST", "/sessions", Some(json!({ "dataset_csv": csv, "config": config }))).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    check_schema("SessionCreated", &body);
    body["session_id"].as_str().unwrap().to_string()
}
