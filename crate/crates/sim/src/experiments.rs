//! Multi-run experiments: controller comparison, parameter sweeps and the
//! noisy estimation-error table. Runs fan out over the rayon pool; each run
//! owns its config and trace.

use flc_sldo_core::controllers::{predict_steady_state_x1, Variant};
use flc_sldo_core::metrics::{self, compute_metrics, window, Estimator, MetricsOptions};
use flc_sldo_core::scenario::{NoiseChannels, NoiseConfig, ScenarioConfig};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::set_path;
use crate::error::Result;
use crate::trace::{run_scenario, RunTrace};

/// Disturbance-free, step and multi-sine phases of the benchmark timeline.
pub const PHASES: [(f64, f64); 3] = [(0.0, 20.0), (20.0, 40.0), (40.0, 60.0)];

pub fn run_controllers(base: &ScenarioConfig, controllers: &[Variant]) -> Result<Vec<(Variant, RunTrace)>> {
    controllers
        .par_iter()
        .map(|&v| run_scenario(&base.clone().with_controller(v)).map(|t| (v, t)))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonRow {
    pub controller: &'static str,
    pub phase1_overshoot_pct: f64,
    pub phase1_settling: f64,
    pub x1_at_10s: f64,
    /// Mean `x₁` over the last 5 s of the step phase.
    pub phase2_plateau: f64,
    /// Settling inside 2% of the uncompensated FLC plateau.
    pub phase2_settling: f64,
    pub phase3_mean_abs_x1: f64,
    pub phase3_mse_bndo: f64,
    pub phase3_mse_sldo: f64,
}

fn at(trace: &RunTrace, t: f64) -> f64 {
    let k = (t / trace.config.dt).round() as usize;
    trace.records.get(k).map_or(f64::NAN, |r| r.x1)
}

pub fn comparison_row(variant: Variant, trace: &RunTrace) -> Result<ComparisonRow, flc_sldo_core::Error> {
    let r = &trace.records;
    let [p1, p2, p3] = PHASES;
    let m1 = compute_metrics(r, p1.0, p1.1, &MetricsOptions::default())?;
    let plateau_ref = predict_steady_state_x1(Variant::Flc, &trace.config.gains, trace.config.disturbance.eval(p2.0));
    let m2 = compute_metrics(
        r,
        p2.0,
        p2.1,
        &MetricsOptions {
            settling_reference: Some(plateau_ref),
            ..MetricsOptions::default()
        },
    )?;
    let w3 = window(r, p3.0, p3.1)?;
    let w2 = window(r, p2.1 - 5.0, p2.1)?;
    Ok(ComparisonRow {
        controller: variant.label(),
        phase1_overshoot_pct: m1.overshoot_pct,
        phase1_settling: m1.settling_time_2pct,
        x1_at_10s: at(trace, 10.0),
        phase2_plateau: w2.iter().map(|x| x.x1).sum::<f64>() / w2.len() as f64,
        phase2_settling: m2.settling_time_2pct,
        phase3_mean_abs_x1: metrics::mean_abs_x1(r, 45.0, p3.1)?,
        phase3_mse_bndo: metrics::mse_disturbance(w3, Estimator::Bndo),
        phase3_mse_sldo: metrics::mse_disturbance(w3, Estimator::Sldo),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub value: String,
    pub phase3_mean_abs_x1: f64,
    pub phase3_mse_sldo: f64,
    pub guard_active_samples: usize,
    pub q_min: f64,
    pub q_max: f64,
    /// Set when the run failed; the metrics are NaN then.
    pub error: Option<String>,
}

pub fn sweep(base: &ScenarioConfig, param: &str, values: &[String]) -> Result<Vec<SweepRow>> {
    let configs: Vec<ScenarioConfig> = values
        .iter()
        .map(|v| set_path(base, param, v))
        .collect::<Result<_>>()?;
    Ok(configs
        .par_iter()
        .zip(values.par_iter())
        .map(|(cfg, value)| {
            let row = run_scenario(cfg).map_err(|e| e.to_string()).and_then(|t| {
                let w3 = window(&t.records, PHASES[2].0, PHASES[2].1).map_err(|e| e.to_string())?;
                Ok(SweepRow {
                    value: value.clone(),
                    phase3_mean_abs_x1: metrics::mean_abs_x1(&t.records, 45.0, PHASES[2].1)
                        .map_err(|e| e.to_string())?,
                    phase3_mse_sldo: metrics::mse_disturbance(w3, Estimator::Sldo),
                    guard_active_samples: t.diagnostics.guard_active_samples,
                    q_min: t.diagnostics.q_min,
                    q_max: t.diagnostics.q_max,
                    error: None,
                })
            });
            row.unwrap_or_else(|e| SweepRow {
                value: value.clone(),
                phase3_mean_abs_x1: f64::NAN,
                phase3_mse_sldo: f64::NAN,
                guard_active_samples: 0,
                q_min: f64::NAN,
                q_max: f64::NAN,
                error: Some(e),
            })
        })
        .collect())
}

/// Published reference cells, `(snr_db, type-1, type-2)`. Noise realizations
/// and membership initialization behind them are unknown, so they are shown
/// for comparison only.
pub const REFERENCE_TABLE: [(f64, f64, f64); 3] = [(20.0, 0.6084, 0.5542), (40.0, 0.0133, 0.0129), (80.0, 0.0016, 0.0016)];

#[derive(Debug, Clone, Serialize)]
pub struct MseCell {
    pub snr_db: f64,
    /// Mean SLDO estimation MSE over seeds.
    pub type1: f64,
    pub type2: f64,
    pub seeds: usize,
}

impl MseCell {
    /// `(type1 − type2)/type1` in percent.
    pub fn improvement_pct(&self) -> f64 {
        100.0 * (self.type1 - self.type2) / self.type1
    }
}

/// Config for one noisy estimation run. FLC-BNDO closes the loop so that the
/// type-1 and type-2 observers see the same measurements for a given seed.
pub fn noisy_estimation_config(base: &ScenarioConfig, snr_db: f64, seed: u64, type1: bool) -> ScenarioConfig {
    let mut cfg = base.clone().with_controller(Variant::FlcBndo);
    cfg.noise = Some(NoiseConfig {
        snr_db,
        seed,
        channels: base.noise.map_or(NoiseChannels::Both, |n| n.channels),
    });
    cfg.t2nfs.type1 = type1;
    cfg
}

/// Mean disturbance-estimation MSE of the SLDO over the whole run.
pub fn estimation_mse(cfg: &ScenarioConfig) -> Result<f64> {
    let t = run_scenario(cfg)?;
    Ok(metrics::mse_disturbance(&t.records, Estimator::Sldo))
}

pub fn mse_table(base: &ScenarioConfig, snrs: &[f64], seeds: &[u64]) -> Result<Vec<MseCell>> {
    let jobs: Vec<(usize, bool, u64)> = (0..snrs.len())
        .flat_map(|i| [true, false].into_iter().flat_map(move |t1| seeds.iter().map(move |&s| (i, t1, s))))
        .collect();
    let results: Vec<(usize, bool, f64)> = jobs
        .par_iter()
        .map(|&(i, t1, seed)| estimation_mse(&noisy_estimation_config(base, snrs[i], seed, t1)).map(|m| (i, t1, m)))
        .collect::<Result<_>>()?;
    Ok(snrs
        .iter()
        .enumerate()
        .map(|(i, &snr_db)| {
            let mean = |t1: bool| {
                let v: Vec<f64> = results.iter().filter(|r| r.0 == i && r.1 == t1).map(|r| r.2).collect();
                v.iter().sum::<f64>() / v.len() as f64
            };
            MseCell {
                snr_db,
                type1: mean(true),
                type2: mean(false),
                seeds: seeds.len(),
            }
        })
        .collect())
}
