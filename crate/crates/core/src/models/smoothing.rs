//! Exponential smoothing: simple, Holt linear and additive Holt-Winters.
//!
//! Free smoothing parameters are chosen on the grid 0.05, 0.10, ..., 1.00
//! by minimizing the in-sample one-step squared error. Ties keep the
//! smallest parameter values.

use super::FittedState;
use crate::scalar::Scalar;

const GRID_STEPS: usize = 20;

fn grid<T: Scalar>(fixed: Option<T>) -> Vec<T> {
    match fixed {
        Some(v) => vec![v],
        None => (1..=GRID_STEPS)
            .map(|k| T::from_count(k) / T::from_count(GRID_STEPS))
            .collect(),
    }
}

struct SesRun<T> {
    sse: T,
    level: T,
}

fn ses_run<T: Scalar>(xs: &[T], alpha: T) -> SesRun<T> {
    let mut level = xs[0];
    let mut sse = T::zero();
    for &x in &xs[1..] {
        let e = x - level;
        sse = sse + e * e;
        level = alpha * x + (T::one() - alpha) * level;
    }
    SesRun { sse, level }
}

pub(super) fn fit_ses<T: Scalar>(xs: &[T], alpha: Option<T>) -> FittedState<T> {
    let mut best: Option<(T, SesRun<T>)> = None;
    for a in grid(alpha) {
        let run = ses_run(xs, a);
        if best.as_ref().is_none_or(|(_, b)| run.sse < b.sse) {
            best = Some((a, run));
        }
    }
    let (alpha, run) = best.expect("non-empty grid");
    FittedState::Ses { alpha, level: run.level }
}

pub(super) fn ses_forecast<T: Scalar>(xs: &[T], alpha: T) -> T {
    ses_run(xs, alpha).level
}

struct HoltRun<T> {
    sse: T,
    level: T,
    trend: T,
}

fn holt_run<T: Scalar>(xs: &[T], alpha: T, beta: T) -> HoltRun<T> {
    let mut level = xs[0];
    let mut trend = xs[1] - xs[0];
    let mut sse = T::zero();
    for &x in &xs[1..] {
        let e = x - (level + trend);
        sse = sse + e * e;
        let next = alpha * x + (T::one() - alpha) * (level + trend);
        trend = beta * (next - level) + (T::one() - beta) * trend;
        level = next;
    }
    HoltRun { sse, level, trend }
}

pub(super) fn fit_holt<T: Scalar>(xs: &[T], alpha: Option<T>, beta: Option<T>) -> FittedState<T> {
    let betas = grid(beta);
    let mut best: Option<(T, T, HoltRun<T>)> = None;
    for a in grid(alpha) {
        for &b in &betas {
            let run = holt_run(xs, a, b);
            if best.as_ref().is_none_or(|(_, _, r)| run.sse < r.sse) {
                best = Some((a, b, run));
            }
        }
    }
    let (alpha, beta, run) = best.expect("non-empty grid");
    FittedState::Holt {
        alpha,
        beta,
        level: run.level,
        trend: run.trend,
    }
}

pub(super) fn holt_forecast<T: Scalar>(xs: &[T], alpha: T, beta: T) -> T {
    let run = holt_run(xs, alpha, beta);
    run.level + run.trend
}

struct HwRun<T> {
    sse: T,
    level: T,
    trend: T,
}

/// Runs additive Holt-Winters over `xs`; `season` must have `xs.len()`
/// slots and receives the seasonal term for every month.
fn hw_run<T: Scalar>(xs: &[T], period: usize, alpha: T, beta: T, gamma: T, season: &mut [T]) -> HwRun<T> {
    let m = T::from_count(period);
    let first: T = xs[..period].iter().copied().sum::<T>() / m;
    let second: T = xs[period..2 * period].iter().copied().sum::<T>() / m;
    let mut level = first;
    let mut trend = (second - first) / m;
    for i in 0..period {
        season[i] = xs[i] - first;
    }
    let mut sse = T::zero();
    for t in period..xs.len() {
        let x = xs[t];
        let s_prev = season[t - period];
        let e = x - (level + trend + s_prev);
        sse = sse + e * e;
        let next = alpha * (x - s_prev) + (T::one() - alpha) * (level + trend);
        trend = beta * (next - level) + (T::one() - beta) * trend;
        season[t] = gamma * (x - next) + (T::one() - gamma) * s_prev;
        level = next;
    }
    HwRun { sse, level, trend }
}

pub(super) fn fit_holt_winters<T: Scalar>(
    xs: &[T],
    period: usize,
    alpha: Option<T>,
    beta: Option<T>,
    gamma: Option<T>,
) -> FittedState<T> {
    let (betas, gammas) = (grid(beta), grid(gamma));
    let mut buf = vec![T::zero(); xs.len()];
    let mut best: Option<(T, T, T, T)> = None;
    for a in grid(alpha) {
        for &b in &betas {
            for &g in &gammas {
                let run = hw_run(xs, period, a, b, g, &mut buf);
                if best.is_none_or(|(_, _, _, sse)| run.sse < sse) {
                    best = Some((a, b, g, run.sse));
                }
            }
        }
    }
    let (alpha, beta, gamma, _) = best.expect("non-empty grid");
    let run = hw_run(xs, period, alpha, beta, gamma, &mut buf);
    let n = xs.len();
    FittedState::HoltWinters {
        alpha,
        beta,
        gamma,
        level: run.level,
        trend: run.trend,
        season: buf[n - period..].to_vec(),
    }
}

pub(super) fn holt_winters_forecast<T: Scalar>(xs: &[T], period: usize, alpha: T, beta: T, gamma: T) -> T {
    let mut buf = vec![T::zero(); xs.len()];
    let run = hw_run(xs, period, alpha, beta, gamma, &mut buf);
    run.level + run.trend + buf[xs.len() - period]
}
