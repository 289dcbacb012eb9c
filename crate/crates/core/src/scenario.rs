//! Closed-loop scenario runner.
//!
//! Per sample `k` (time `t = k·dt`):
//!
//! 1. measure `y_k` from the true state,
//! 2. advance the BNDO across `[t_{k−1}, t_k]` with `y_{k−1}`, `y_k`, `u_{k−1}`,
//! 3. update the SLDO and its fuzzy estimator from `d̂_BN,k`,
//! 4. compute `u_k` from `y_k` and the estimates,
//! 5. record, then advance the plant to `t_{k+1}` with `u_k` held and `d(t)`
//!    evaluated at the integrator stage times.
//!
//! Both observers run for every controller so traces are comparable.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::bndo::{BndoGains, BndoState};
use crate::controllers::{control, ControllerGains, ControllerState, Estimates, Variant};
use crate::disturbance::DisturbanceProfile;
use crate::error::{Error, Result};
use crate::integrate::{step_plant, Scheme};
use crate::plant::{plant_derivatives, PlantModel, PlantState};
use crate::sldo::{SldoConfig, SldoState};
use crate::t2nfs::{Guards, T2nfsInit, T2nfsParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseChannels {
    /// Both measured states are corrupted, each against its own power.
    #[default]
    Both,
    /// Only `y = x₁` is corrupted.
    OutputOnly,
}

/// Measurement noise. The generator itself lives outside this crate; the
/// runner only sees a [`Measurement`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub snr_db: f64,
    pub seed: u64,
    #[serde(default)]
    pub channels: NoiseChannels,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub plant: PlantModel,
    pub controller: Variant,
    pub gains: ControllerGains,
    /// Observer gain vector `l`.
    pub observer: BndoGains,
    #[serde(default)]
    pub sldo: SldoConfig,
    #[serde(default)]
    pub t2nfs: T2nfsInit,
    pub x0: PlantState,
    pub dt: f64,
    pub horizon: f64,
    #[serde(default)]
    pub scheme: Scheme,
    pub disturbance: DisturbanceProfile,
    #[serde(default)]
    pub noise: Option<NoiseConfig>,
}

impl ScenarioConfig {
    /// The benchmark experiment: `x0 = (1, 1)`, `k = (3, 5)`, `kᵢ = 3`,
    /// `l = (5, 0)`, `η = 10`, `α = 0.03`, `q0 = 0.5`, 1 ms steps over 60 s
    /// and the three-phase disturbance, controlled by FLC-SLDO.
    pub fn benchmark() -> Self {
        Self {
            plant: PlantModel::Benchmark,
            controller: Variant::FlcSldo,
            gains: ControllerGains::BENCHMARK,
            observer: BndoGains::BENCHMARK,
            sldo: SldoConfig::default(),
            t2nfs: T2nfsInit::default(),
            x0: PlantState::new(1.0, 1.0),
            dt: 1e-3,
            horizon: 60.0,
            scheme: Scheme::Rk4,
            disturbance: DisturbanceProfile::three_phase(),
            noise: None,
        }
    }

    pub fn with_controller(mut self, controller: Variant) -> Self {
        self.controller = controller;
        self
    }

    /// Number of integration steps; the trace has one more record.
    pub fn steps(&self) -> usize {
        libm::round(self.horizon / self.dt) as usize
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid("dt", self.dt, "time step must be positive"));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::invalid("horizon", self.horizon, "must be positive"));
        }
        let n = self.horizon / self.dt;
        if (n - libm::round(n)).abs() > 1e-6 * n.max(1.0) {
            return Err(Error::invalid(
                "horizon",
                self.horizon,
                "must be a whole number of time steps",
            ));
        }
        if !self.x0.is_finite() {
            return Err(Error::invalid("x0", f64::NAN, "initial state must be finite"));
        }
        if let PlantModel::Linear { a1, a2, b } = self.plant {
            for v in [a1, a2, b] {
                if !v.is_finite() {
                    return Err(Error::invalid("plant", v, "coefficients must be finite"));
                }
            }
        }
        self.disturbance.validate()?;
        self.sldo.validate()?;
        T2nfsParams::from_init(&self.t2nfs)?;
        if let Some(noise) = &self.noise {
            if !(noise.snr_db > 0.0 && noise.snr_db.is_finite()) {
                return Err(Error::invalid("snr_db", noise.snr_db, "must be positive"));
            }
        }
        Ok(())
    }
}

/// Produces the state seen by controller and observers at each sample.
pub trait Measurement {
    fn measure(&mut self, k: usize, t: f64, x: PlantState) -> PlantState;
}

/// Noise-free measurement.
#[derive(Debug, Clone, Copy, Default)]
pub struct Clean;

impl Measurement for Clean {
    fn measure(&mut self, _k: usize, _t: f64, x: PlantState) -> PlantState {
        x
    }
}

/// One trace row. Field order is the export column order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub t: f64,
    pub x1: f64,
    pub x2: f64,
    pub u: f64,
    pub d_true: f64,
    pub d_hat_bn: f64,
    pub d_hat_sl: f64,
    pub tau: f64,
    pub tau_c: f64,
    pub tau_n: f64,
    pub s: f64,
    pub q: f64,
    pub guards: u32,
}

impl TraceRecord {
    pub fn guards(&self) -> Guards {
        Guards(self.guards)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagnostics {
    /// Samples on which each guard bit was set, indexed by bit position.
    pub guard_counts: [usize; 7],
    /// Samples with any rule frozen or clamped.
    pub guard_active_samples: usize,
    pub q_min: f64,
    pub q_max: f64,
    pub min_sigma: f64,
}

impl Diagnostics {
    fn new() -> Self {
        Self {
            q_min: f64::INFINITY,
            q_max: f64::NEG_INFINITY,
            min_sigma: f64::INFINITY,
            ..Self::default()
        }
    }

    fn observe(&mut self, guards: Guards, params: &T2nfsParams) {
        for (bit, count) in self.guard_counts.iter_mut().enumerate() {
            if guards.0 & (1 << bit) != 0 {
                *count += 1;
            }
        }
        if guards.any_active() {
            self.guard_active_samples += 1;
        }
        self.q_min = self.q_min.min(params.q());
        self.q_max = self.q_max.max(params.q());
        self.min_sigma = self.min_sigma.min(params.min_sigma());
    }

    pub fn q_excursions(&self) -> usize {
        self.guard_counts[5]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub records: Vec<TraceRecord>,
    /// `(ξ₁, ξ₂)` per sample, parallel to `records`.
    pub inputs: Vec<[f64; 2]>,
    pub diagnostics: Diagnostics,
    pub final_params: T2nfsParams,
    pub l1: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RunError {
    #[error("invalid scenario: {0}")]
    Config(Error),
    #[error("numerical blow-up at step {step} ({} valid records kept): {source}", partial.len())]
    BlowUp {
        step: usize,
        last_valid: Option<usize>,
        source: Error,
        partial: Vec<TraceRecord>,
    },
}

/// Runs the closed loop without measurement noise.
pub fn run(config: &ScenarioConfig) -> core::result::Result<RunOutput, RunError> {
    run_with(config, &mut Clean)
}

pub fn run_with<M: Measurement + ?Sized>(
    config: &ScenarioConfig,
    meas: &mut M,
) -> core::result::Result<RunOutput, RunError> {
    config.validate().map_err(RunError::Config)?;
    let n = config.steps();
    let dt = config.dt;
    let model = config.plant;
    let l1 = config.observer.l1();

    let mut params = T2nfsParams::from_init(&config.t2nfs).map_err(RunError::Config)?;
    let mut sldo = SldoState::new(config.sldo, l1).map_err(RunError::Config)?;
    let mut cstate = ControllerState::new(config.controller);
    let mut bndo = BndoState::new(config.observer, config.x0);

    let mut records = Vec::with_capacity(n + 1);
    let mut inputs = Vec::with_capacity(n + 1);
    let mut diagnostics = Diagnostics::new();
    let mut x = config.x0;
    let mut y_prev = config.x0;
    let mut u_prev = 0.0;

    for k in 0..=n {
        let t = k as f64 * dt;
        let mut body = || -> Result<()> {
            let y = meas.measure(k, t, x);
            if !y.is_finite() {
                return Err(Error::NonFinite {
                    what: "measurement",
                });
            }
            bndo = if k == 0 {
                BndoState::new(config.observer, y)
            } else {
                bndo.update_interpolated(y_prev, y, u_prev, &model, dt, config.scheme)?
            };
            let (s_next, p_next) = sldo.update(bndo.d_hat(), &params, dt)?;
            sldo = s_next;
            params = p_next;
            let estimates = Estimates {
                d_hat_bn: bndo.d_hat(),
                d_hat_sl: sldo.d_hat_sl,
                d_hat_sl_rate: sldo.tau,
            };
            let u = control(y, &estimates, &mut cstate, &config.gains, &model, dt)?;
            let mut guards = sldo.guards;
            if !(0.0..=1.0).contains(&params.q()) {
                guards.insert(Guards::Q_EXCURSION);
            }
            diagnostics.observe(guards, &params);
            records.push(TraceRecord {
                t,
                x1: x.x1,
                x2: x.x2,
                u,
                d_true: config.disturbance.eval(t),
                d_hat_bn: bndo.d_hat(),
                d_hat_sl: sldo.d_hat_sl,
                tau: sldo.tau,
                tau_c: sldo.tau_c,
                tau_n: sldo.tau_n,
                s: sldo.s,
                q: params.q(),
                guards: guards.0,
            });
            inputs.push([sldo.xi1, sldo.xi2]);
            if k < n {
                x = step_plant(config.scheme, t, x, dt, |tt, st| {
                    plant_derivatives(st, u, config.disturbance.eval(tt), &model)
                })?;
            }
            y_prev = y;
            u_prev = u;
            Ok(())
        };
        if let Err(source) = body() {
            let last_valid = records.len().checked_sub(1);
            return Err(RunError::BlowUp {
                step: k,
                last_valid,
                source,
                partial: records,
            });
        }
    }

    Ok(RunOutput {
        records,
        inputs,
        diagnostics,
        final_params: params,
        l1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn short(controller: Variant, horizon: f64) -> ScenarioConfig {
        ScenarioConfig {
            horizon,
            ..ScenarioConfig::benchmark().with_controller(controller)
        }
    }

    #[test]
    fn record_count_and_spacing() {
        let out = run(&short(Variant::Flc, 1.0)).unwrap();
        assert_eq!(out.records.len(), 1001);
        assert_eq!(out.records[0].t, 0.0);
        assert_eq!(out.records[1000].t, 1.0);
        assert!(out.records.windows(2).all(|w| w[1].t > w[0].t));
    }

    #[test]
    fn origin_is_an_equilibrium() {
        let cfg = ScenarioConfig {
            x0: PlantState::ORIGIN,
            disturbance: DisturbanceProfile::Zero,
            horizon: 2.0,
            ..ScenarioConfig::benchmark()
        };
        for v in Variant::ALL {
            let out = run(&cfg.clone().with_controller(v)).unwrap();
            for r in &out.records {
                assert_eq!((r.x1, r.x2), (0.0, 0.0));
                assert_eq!(r.u, -1.3);
            }
        }
    }

    #[test]
    fn identical_configs_are_bit_identical() {
        let cfg = short(Variant::FlcSldo, 25.0);
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert_eq!(a.records.len(), b.records.len());
        for (x, y) in a.records.iter().zip(&b.records) {
            assert_eq!(x.x1.to_bits(), y.x1.to_bits());
            assert_eq!(x.d_hat_sl.to_bits(), y.d_hat_sl.to_bits());
        }
    }

    #[test]
    fn invalid_config_rejected() {
        let cfg = ScenarioConfig {
            dt: 0.0,
            ..ScenarioConfig::benchmark()
        };
        assert!(matches!(run(&cfg), Err(RunError::Config(_))));
        let cfg = ScenarioConfig {
            horizon: 1.0005,
            ..ScenarioConfig::benchmark()
        };
        assert!(matches!(run(&cfg), Err(RunError::Config(_))));
    }

    #[test]
    fn blow_up_reports_last_valid_record() {
        let cfg = ScenarioConfig {
            x0: PlantState::new(50.0, 0.0),
            controller: Variant::Flc,
            gains: ControllerGains::new(3.0, 5.0, 0.0).unwrap(),
            dt: 0.5,
            horizon: 100.0,
            ..ScenarioConfig::benchmark()
        };
        match run(&cfg) {
            Err(RunError::BlowUp {
                step,
                last_valid,
                partial,
                ..
            }) => {
                assert_eq!(last_valid, partial.len().checked_sub(1));
                assert!(step >= partial.len().saturating_sub(1));
            }
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn observer_ignores_true_disturbance_within_a_step() {
        // Changing d from t = 0.5 s on leaves every sample before 0.5 s
        // untouched; the last integration stage into t = 0.5 s already sees it.
        let base = short(Variant::FlcSldo, 1.0);
        let mut other = base.clone();
        other.disturbance = DisturbanceProfile::Step {
            magnitude: 3.0,
            t_on: 0.5,
            t_off: 1.0,
        };
        let a = run(&base).unwrap();
        let b = run(&other).unwrap();
        for k in 0..500 {
            assert_eq!(a.records[k].d_hat_bn, b.records[k].d_hat_bn);
            assert_eq!(a.records[k].d_hat_sl, b.records[k].d_hat_sl);
            assert_eq!(a.records[k].u, b.records[k].u);
        }
        assert_ne!(a.records[502].x1, b.records[502].x1);
    }
}
