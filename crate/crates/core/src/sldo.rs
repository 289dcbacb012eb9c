//! Self-learning disturbance observer.
//!
//! A conventional estimation law `τ_c = ξ₁ + η·ξ₂` runs in parallel with the
//! fuzzy estimator, which is trained on the sliding surface
//! `s = τ_c + ξ₂/l₁` and gradually takes over. The estimate integrates
//! `ḋ̂_SL = τ = τ_c − τ_n`.
//!
//! Two choices of the inputs `ξ₁, ξ₂` are available, see [`InputMode`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::t2nfs::{self, AdaptStep, Guards, T2nfsParams};

/// Samples of history needed before the inputs are formed.
pub const WARM_UP_SAMPLES: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputMode {
    /// `ξ₁ = ḋ̂_BN + l₁·(d̂_BN − d̂_SL)`, the rate of the BNDO estimate plus
    /// the gap between the two estimates, and `ξ₂ = ξ̇₁`. Since
    /// `ḋ̂_BN = l₁·(d − d̂_BN)`, this makes `ξ₁ = l₁·(d − d̂_SL)`, the SLDO's own
    /// error. The new estimate is solved implicitly each step.
    #[default]
    EstimationError,
    /// `ξ₁ = ḋ̂_BN`, `ξ₂ = d̈̂_BN` by backward differences, explicit update.
    BndoDerivatives,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SldoConfig {
    pub eta: f64,
    /// Boundary-layer width of the smoothed sign.
    pub delta: f64,
    pub input_mode: InputMode,
    /// Adapt the fuzzy estimator. With this off and zero consequents the
    /// observer reduces to the conventional law.
    pub learning: bool,
}

impl Default for SldoConfig {
    fn default() -> Self {
        Self {
            eta: 10.0,
            delta: crate::sign::DEFAULT_DELTA,
            input_mode: InputMode::EstimationError,
            learning: true,
        }
    }
}

impl SldoConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::invalid("eta", self.eta, "must be positive"));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::invalid("delta", self.delta, "must be positive"));
        }
        Ok(())
    }
}

/// `(ξ₁, ξ₂)` as first and second backward differences of `d̂_BN`.
pub fn sldo_inputs(now: f64, prev: f64, prev2: f64, dt: f64) -> Result<(f64, f64)> {
    if !(dt > 0.0) {
        return Err(Error::invalid("dt", dt, "time step must be positive"));
    }
    Ok(((now - prev) / dt, (now - 2.0 * prev + prev2) / (dt * dt)))
}

/// `τ_c = ξ₁ + η·ξ₂`.
pub fn sldo_tau_c(xi1: f64, xi2: f64, eta: f64) -> f64 {
    xi1 + eta * xi2
}

/// `s = τ_c + ξ₂/l₁`.
pub fn sliding_surface(tau_c: f64, xi2: f64, l1: f64) -> f64 {
    tau_c + xi2 / l1
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SldoState {
    config: SldoConfig,
    l1: f64,
    /// `d̂_SL` at the current sample.
    pub d_hat_sl: f64,
    /// `d̂_SL` at the next sample, `d_hat_sl + dt·tau`.
    pub d_hat_sl_next: f64,
    pub xi1: f64,
    pub xi2: f64,
    pub xi1_rate: f64,
    pub xi2_rate: f64,
    pub tau_c: f64,
    pub tau_n: f64,
    pub tau: f64,
    pub s: f64,
    pub guards: Guards,
    bn_prev: f64,
    bn_prev2: f64,
    samples: usize,
}

impl SldoState {
    pub fn new(config: SldoConfig, l1: f64) -> Result<Self> {
        config.validate()?;
        if !(l1 > 0.0 && l1.is_finite()) {
            return Err(Error::invalid("l1", l1, "observer gain must be positive"));
        }
        Ok(Self {
            config,
            l1,
            d_hat_sl: 0.0,
            d_hat_sl_next: 0.0,
            xi1: 0.0,
            xi2: 0.0,
            xi1_rate: 0.0,
            xi2_rate: 0.0,
            tau_c: 0.0,
            tau_n: 0.0,
            tau: 0.0,
            s: 0.0,
            guards: Guards::NONE,
            bn_prev: 0.0,
            bn_prev2: 0.0,
            samples: 0,
        })
    }

    pub fn config(&self) -> &SldoConfig {
        &self.config
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    /// Consumes the BNDO estimate of the current sample and returns the
    /// observer and fuzzy parameters for that sample. The true disturbance
    /// is never an input.
    pub fn update(&self, d_hat_bn: f64, params: &T2nfsParams, dt: f64) -> Result<(SldoState, T2nfsParams)> {
        if !(dt > 0.0) {
            return Err(Error::invalid("dt", dt, "time step must be positive"));
        }
        if !d_hat_bn.is_finite() {
            return Err(Error::NonFinite {
                what: "BNDO estimate",
            });
        }
        let mut next = *self;
        next.d_hat_sl = self.d_hat_sl_next;
        next.bn_prev = d_hat_bn;
        next.bn_prev2 = self.bn_prev;
        next.samples = self.samples + 1;
        next.guards = Guards::NONE;

        if self.samples < WARM_UP_SAMPLES {
            let fs = t2nfs::forward(params, self.xi1, self.xi2)?;
            next.xi1 = 0.0;
            next.xi2 = 0.0;
            next.xi1_rate = 0.0;
            next.xi2_rate = 0.0;
            next.tau_c = 0.0;
            next.s = 0.0;
            next.tau_n = fs.tau_n;
            next.tau = next.tau_c - next.tau_n;
            next.d_hat_sl_next = next.d_hat_sl + dt * next.tau;
            next.guards = Guards::WARM_UP;
            return Ok((next, params.clone()));
        }

        let (eta, l1) = (self.config.eta, self.l1);
        let mut params = params.clone();
        let firing;
        match self.config.input_mode {
            InputMode::BndoDerivatives => {
                let (xi1, xi2) = sldo_inputs(d_hat_bn, self.bn_prev, self.bn_prev2, dt)?;
                next.xi1 = xi1;
                next.xi2 = xi2;
                firing = t2nfs::forward(&params, xi1, xi2)?;
                next.tau_n = firing.tau_n;
                next.xi1_rate = (xi1 - self.xi1) / dt;
                next.xi2_rate = (xi2 - self.xi2) / dt;
            }
            InputMode::EstimationError => {
                // The memberships move with the inputs, so the firing is the
                // same at (ξ_prev, c) and at (ξ, c + Δξ): τ_n is known before
                // ξ is, and the update is linear in the new estimate.
                let tau_n = t2nfs::forward(&params, self.xi1, self.xi2)?.tau_n;
                let a = (d_hat_bn - self.bn_prev) / dt + l1 * d_hat_bn;
                let x = (next.d_hat_sl + (dt + eta) * a - eta * self.xi1 - dt * tau_n)
                    / (1.0 + dt * l1 + eta * l1);
                let xi1 = a - l1 * x;
                let xi2 = (xi1 - self.xi1) / dt;
                next.xi1 = xi1;
                next.xi2 = xi2;
                next.xi1_rate = xi2;
                next.xi2_rate = (xi2 - self.xi2) / dt;
                next.tau_n = tau_n;
                if self.config.learning {
                    params.track_inputs([xi1 - self.xi1, xi2 - self.xi2]);
                }
                firing = t2nfs::forward(&params, xi1, xi2)?;
            }
        }

        next.tau_c = sldo_tau_c(next.xi1, next.xi2, eta);
        next.s = sliding_surface(next.tau_c, next.xi2, l1);
        next.tau = next.tau_c - next.tau_n;
        next.d_hat_sl_next = next.d_hat_sl + dt * next.tau;

        if self.config.learning {
            let xi_rate = match self.config.input_mode {
                InputMode::BndoDerivatives => [next.xi1_rate, next.xi2_rate],
                InputMode::EstimationError => [0.0, 0.0],
            };
            let step = AdaptStep {
                xi: [next.xi1, next.xi2],
                xi_rate,
                s: next.s,
                delta: self.config.delta,
                dt,
            };
            let (adapted, guards) = t2nfs::adapt(&params, &firing, &step)?;
            params = adapted;
            next.guards = guards;
        }

        if !(next.d_hat_sl_next.is_finite() && next.tau.is_finite() && next.s.is_finite()) {
            return Err(Error::NonFinite {
                what: "SLDO estimate",
            });
        }
        Ok((next, params))
    }
}
