//! Step-response and estimation metrics over a time window of a trace.
//!
//! Windows are half-open, `[start, end)`. Within a window, `x_f` is the mean
//! of `x₁` over the final 10% of samples and the initial deviation is
//! `x₁(start) − x_f`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::TraceRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    Bndo,
    #[default]
    Sldo,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MetricsOptions {
    pub estimator: Estimator,
    /// Deviation that the 2% settling band is relative to. Defaults to the
    /// initial deviation.
    pub settling_reference: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    /// `x_f`, the regulation error left at the end of the window.
    pub steady_state_error: f64,
    /// Time to go from 10% to 90% of the way from `x₁(start)` to `x_f`.
    /// NaN when the response never makes the transition.
    pub rise_time_10_90: f64,
    /// Time after `start` at which `|x₁ − x_f|` last leaves the 2% band,
    /// linearly interpolated between samples. NaN when the reference is 0.
    pub settling_time_2pct: f64,
    /// Largest excursion past `x_f` against the initial deviation, in
    /// percent of that deviation. 0 for a response that never crosses; NaN
    /// when the initial deviation is 0.
    pub overshoot_pct: f64,
    /// Mean `(d − d̂)²`.
    pub mse_disturbance: f64,
    pub mse_window: (f64, f64),
}

/// Samples whose time falls in `[start, end)`.
pub fn window(records: &[TraceRecord], start: f64, end: f64) -> Result<&[TraceRecord]> {
    let lo = records.partition_point(|r| r.t < start);
    let hi = records.partition_point(|r| r.t < end);
    if hi <= lo {
        return Err(Error::EmptyWindow { start, end });
    }
    Ok(&records[lo..hi])
}

pub fn compute_metrics(records: &[TraceRecord], start: f64, end: f64, opts: &MetricsOptions) -> Result<Metrics> {
    let w = window(records, start, end)?;
    let n = w.len();
    let tail = (n / 10).max(1);
    let x_f = w[n - tail..].iter().map(|r| r.x1).sum::<f64>() / tail as f64;
    let dev0 = w[0].x1 - x_f;
    let t0 = w[0].t;

    let rise = rise_time(w, x_f, dev0);
    let reference = opts.settling_reference.unwrap_or(dev0.abs());
    let settle = settling_time(w, x_f, reference, t0);
    let overshoot = if dev0 == 0.0 {
        f64::NAN
    } else {
        // Distance past x_f on the far side from the start.
        let past = w
            .iter()
            .map(|r| -(r.x1 - x_f) * dev0.signum())
            .fold(0.0, f64::max);
        100.0 * past / dev0.abs()
    };

    Ok(Metrics {
        steady_state_error: x_f,
        rise_time_10_90: rise,
        settling_time_2pct: settle,
        overshoot_pct: overshoot,
        mse_disturbance: mse_disturbance(w, opts.estimator),
        mse_window: (start, end),
    })
}

fn rise_time(w: &[TraceRecord], x_f: f64, dev0: f64) -> f64 {
    if dev0 == 0.0 {
        return f64::NAN;
    }
    let progress = |r: &TraceRecord| 1.0 - (r.x1 - x_f) / dev0;
    let t10 = w.iter().find(|r| progress(r) >= 0.1).map(|r| r.t);
    let t90 = w.iter().find(|r| progress(r) >= 0.9).map(|r| r.t);
    match (t10, t90) {
        (Some(a), Some(b)) => b - a,
        _ => f64::NAN,
    }
}

fn settling_time(w: &[TraceRecord], x_f: f64, reference: f64, t0: f64) -> f64 {
    if !(reference > 0.0) {
        return f64::NAN;
    }
    let band = 0.02 * reference;
    let outside = |r: &TraceRecord| (r.x1 - x_f).abs() > band;
    let Some(last) = w.iter().rposition(outside) else {
        return 0.0;
    };
    let Some(next) = w.get(last + 1) else {
        return w[last].t - t0;
    };
    let (a, b) = ((w[last].x1 - x_f).abs(), (next.x1 - x_f).abs());
    let frac = if a > b { (a - band) / (a - b) } else { 0.0 };
    w[last].t + frac * (next.t - w[last].t) - t0
}

pub fn mse_disturbance(w: &[TraceRecord], estimator: Estimator) -> f64 {
    let sum: f64 = w
        .iter()
        .map(|r| {
            let d_hat = match estimator {
                Estimator::Bndo => r.d_hat_bn,
                Estimator::Sldo => r.d_hat_sl,
            };
            let e = r.d_true - d_hat;
            e * e
        })
        .sum();
    sum / w.len() as f64
}

/// Mean `|x₁|` over `[start, end)`.
pub fn mean_abs_x1(records: &[TraceRecord], start: f64, end: f64) -> Result<f64> {
    let w = window(records, start, end)?;
    Ok(w.iter().map(|r| r.x1.abs()).sum::<f64>() / w.len() as f64)
}

/// Largest `|a.x₁ − b.x₁|` over `[start, end)`; both traces must share a time
/// grid.
pub fn sup_diff_x1(a: &[TraceRecord], b: &[TraceRecord], start: f64, end: f64) -> Result<f64> {
    let wa = window(a, start, end)?;
    let wb = window(b, start, end)?;
    Ok(wa
        .iter()
        .zip(wb)
        .map(|(p, q)| (p.x1 - q.x1).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn rec(t: f64, x1: f64, d: f64, d_hat: f64) -> TraceRecord {
        TraceRecord {
            t,
            x1,
            x2: 0.0,
            u: 0.0,
            d_true: d,
            d_hat_bn: d_hat,
            d_hat_sl: d_hat,
            tau: 0.0,
            tau_c: 0.0,
            tau_n: 0.0,
            s: 0.0,
            q: 0.5,
            guards: 0,
        }
    }

    fn trace(f: impl Fn(f64) -> f64, horizon: f64, dt: f64) -> Vec<TraceRecord> {
        let n = (horizon / dt).round() as usize;
        (0..=n).map(|k| {
            let t = k as f64 * dt;
            rec(t, f(t), 0.0, 0.0)
        })
        .collect()
    }

    #[test]
    fn first_order_decay() {
        let tr = trace(|t| (-t).exp(), 40.0, 1e-3);
        let m = compute_metrics(&tr, 0.0, 40.0, &MetricsOptions::default()).unwrap();
        assert!((m.settling_time_2pct - 50f64.ln()).abs() < 1e-3, "{}", m.settling_time_2pct);
        assert!((m.rise_time_10_90 - 9f64.ln()).abs() < 2e-3);
        assert!(m.overshoot_pct < 1e-10);
        assert!(m.steady_state_error.abs() < 1e-12);
    }

    #[test]
    fn constant_trace() {
        let tr = trace(|_| 0.0, 1.0, 1e-2);
        let m = compute_metrics(&tr, 0.0, 1.0, &MetricsOptions::default()).unwrap();
        assert_eq!(m.steady_state_error, 0.0);
        assert!(m.rise_time_10_90.is_nan());
        assert!(m.overshoot_pct.is_nan());
    }

    #[test]
    fn perfect_estimate_has_zero_mse() {
        let tr: Vec<_> = (0..100).map(|k| rec(k as f64, 0.0, 0.3 * k as f64, 0.3 * k as f64)).collect();
        let m = compute_metrics(&tr, 0.0, 100.0, &MetricsOptions::default()).unwrap();
        assert_eq!(m.mse_disturbance, 0.0);
    }

    #[test]
    fn underdamped_overshoot() {
        // ζ = 0.5, ωn = 1: overshoot exp(−πζ/√(1−ζ²)) of the initial deviation.
        let zeta: f64 = 0.5;
        let wd = (1.0 - zeta * zeta).sqrt();
        let f = |t: f64| (-zeta * t).exp() * ((wd * t).cos() + zeta / wd * (wd * t).sin());
        let tr = trace(f, 40.0, 1e-3);
        let m = compute_metrics(&tr, 0.0, 40.0, &MetricsOptions::default()).unwrap();
        let expected = 100.0 * (-core::f64::consts::PI * zeta / wd).exp();
        assert!((m.overshoot_pct - expected).abs() < 1e-3, "{}", m.overshoot_pct);
    }

    #[test]
    fn empty_window_rejected() {
        let tr = trace(|t| t, 1.0, 0.1);
        assert!(matches!(
            compute_metrics(&tr, 5.0, 6.0, &MetricsOptions::default()),
            Err(Error::EmptyWindow { .. })
        ));
    }

    #[test]
    fn half_open_windows() {
        let tr = trace(|t| t, 1.0, 0.25);
        let w = window(&tr, 0.25, 0.75).unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(w[0].t, 0.25);
    }
}
