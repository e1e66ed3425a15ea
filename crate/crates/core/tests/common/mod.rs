//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use workbench_core::{DemandSeries, MonthIndex};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn month(y: i32, m: u32) -> MonthIndex {
    MonthIndex::new(y, m).unwrap()
}

pub fn series(id: &str, values: Vec<f64>) -> DemandSeries<f64> {
    DemandSeries::new(id, "t", month(2015, 1), values)
}

pub fn white_noise(seed: u64, n: usize) -> Vec<f64> {
    let mut r = rng(seed);
    (0..n).map(|_| StandardNormal.sample(&mut r)).collect()
}

pub fn random_walk(seed: u64, n: usize) -> Vec<f64> {
    let mut level = 0.0;
    white_noise(seed, n)
        .into_iter()
        .map(|e| {
            level += e;
            level
        })
        .collect()
}

/// Non-negative demand-like series: level, trend, seasonality and noise.
pub fn demand(seed: u64, n: usize) -> Vec<f64> {
    let mut r = rng(seed);
    let level = r.random_range(20.0..200.0);
    let slope = r.random_range(-0.5..1.5);
    let amp = r.random_range(0.0..0.4) * level;
    let phase = r.random_range(0.0..12.0);
    (0..n)
        .map(|t| {
            let t = t as f64;
            let s = amp * ((t + phase) * std::f64::consts::TAU / 12.0).sin();
            let e: f64 = StandardNormal.sample(&mut r);
            (level + slope * t + s + 0.1 * level * e).max(0.0).round()
        })
        .collect()
}
