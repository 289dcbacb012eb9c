//! Basic nonlinear disturbance observer.
//!
//! ```text
//! ṗ  = −l₁·p − l₁·(l·x) − l₁·x₂ − l₂·(a(x) + b(x)·u)
//! d̂  = p + l·x
//! ```
//!
//! For a constant disturbance the estimation error obeys `ė = −l₁·e`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::{self, Scheme};
use crate::plant::{PlantModel, PlantState, DISTURBANCE_CHANNEL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct BndoGains {
    l1: f64,
    l2: f64,
}

impl BndoGains {
    /// `l = [5, 0]`.
    pub const BENCHMARK: BndoGains = BndoGains { l1: 5.0, l2: 0.0 };

    pub fn new(l1: f64, l2: f64) -> Result<Self> {
        if !(l1 > 0.0 && l1.is_finite()) {
            return Err(Error::invalid("l1", l1, "observer gain must be positive"));
        }
        if !l2.is_finite() {
            return Err(Error::invalid("l2", l2, "observer gain must be finite"));
        }
        Ok(Self { l1, l2 })
    }

    pub fn l1(&self) -> f64 {
        self.l1
    }

    pub fn l2(&self) -> f64 {
        self.l2
    }

    fn dot(&self, x: PlantState) -> f64 {
        self.l1 * x.x1 + self.l2 * x.x2
    }

    /// `l·z`; with `z = [1, 0]` this is `l₁`.
    fn lz(&self) -> f64 {
        self.l1 * DISTURBANCE_CHANNEL[0] + self.l2 * DISTURBANCE_CHANNEL[1]
    }
}

impl Default for BndoGains {
    fn default() -> Self {
        Self::BENCHMARK
    }
}

impl TryFrom<[f64; 2]> for BndoGains {
    type Error = Error;

    fn try_from([l1, l2]: [f64; 2]) -> Result<Self> {
        BndoGains::new(l1, l2)
    }
}

impl From<BndoGains> for [f64; 2] {
    fn from(g: BndoGains) -> Self {
        [g.l1, g.l2]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BndoState {
    p: f64,
    d_hat: f64,
    gains: BndoGains,
}

impl BndoState {
    /// Observer started with a zero estimate: `p(0) = −l·x(0)`.
    pub fn new(gains: BndoGains, x0: PlantState) -> Self {
        Self::with_estimate(gains, x0, 0.0)
    }

    pub fn with_estimate(gains: BndoGains, x0: PlantState, d_hat0: f64) -> Self {
        Self {
            p: d_hat0 - gains.dot(x0),
            d_hat: d_hat0,
            gains,
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn d_hat(&self) -> f64 {
        self.d_hat
    }

    pub fn gains(&self) -> BndoGains {
        self.gains
    }

    /// Everything in `ṗ` except the `−l·z·p` term.
    fn forcing(&self, x: PlantState, u: f64, model: &PlantModel) -> f64 {
        let g = &self.gains;
        let g1 = [x.x2, model.drift(x)];
        let g2 = [0.0, model.input_gain(x)];
        -g.lz() * g.dot(x) - (g.l1 * (g1[0] + g2[0] * u) + g.l2 * (g1[1] + g2[1] * u))
    }

    /// One step with `x` and `u` sampled at the start of the step and held.
    pub fn update(
        &self,
        x: PlantState,
        u: f64,
        model: &PlantModel,
        dt: f64,
        scheme: Scheme,
    ) -> Result<Self> {
        let f = self.forcing(x, u, model);
        self.advance(f, f, x, dt, scheme)
    }

    /// One step across `[t_{k−1}, t_k]` with the state-dependent forcing
    /// interpolated linearly between the two measurements (RK4) or taken at
    /// the start of the step (Euler). `u` is the input held over the step.
    pub fn update_interpolated(
        &self,
        x_prev: PlantState,
        x_now: PlantState,
        u: f64,
        model: &PlantModel,
        dt: f64,
        scheme: Scheme,
    ) -> Result<Self> {
        let f0 = self.forcing(x_prev, u, model);
        let f1 = self.forcing(x_now, u, model);
        self.advance(f0, f1, x_now, dt, scheme)
    }

    fn advance(&self, f0: f64, f1: f64, x_now: PlantState, dt: f64, scheme: Scheme) -> Result<Self> {
        if !(f0.is_finite() && f1.is_finite()) {
            return Err(Error::NonFinite {
                what: "observer forcing",
            });
        }
        let lz = self.gains.lz();
        let [p] = integrate::step(scheme, 0.0, [self.p], dt, |t, p| {
            let w = t / dt;
            Ok([-lz * p[0] + (1.0 - w) * f0 + w * f1])
        })
        .map_err(|e| match e {
            Error::NonFinite { .. } => Error::NonFinite { what: "observer state p" },
            other => other,
        })?;
        let d_hat = p + self.gains.dot(x_now);
        if !d_hat.is_finite() {
            return Err(Error::NonFinite {
                what: "disturbance estimate",
            });
        }
        Ok(Self {
            p,
            d_hat,
            gains: self.gains,
        })
    }
}

/// Backward difference `(d̂_now − d̂_prev)/dt`.
pub fn bndo_rate(prev: &BndoState, now: &BndoState, dt: f64) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(Error::invalid("dt", dt, "time step must be positive"));
    }
    Ok((now.d_hat - prev.d_hat) / dt)
}
