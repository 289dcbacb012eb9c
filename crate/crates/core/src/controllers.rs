//! Feedback-linearization control laws.
//!
//! All four share `u = −b⁻¹(x)·(a(x) + k₁x₁ + k₂·(x₂ + d̂) + extra)` and
//! differ only in what fills `d̂` and `extra`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plant::{PlantModel, PlantState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGains")]
pub struct ControllerGains {
    k1: f64,
    k2: f64,
    ki: f64,
}

#[derive(Deserialize)]
struct RawGains {
    k1: f64,
    k2: f64,
    #[serde(default)]
    ki: f64,
}

impl TryFrom<RawGains> for ControllerGains {
    type Error = Error;

    fn try_from(raw: RawGains) -> Result<Self> {
        ControllerGains::new(raw.k1, raw.k2, raw.ki)
    }
}

impl ControllerGains {
    /// `k1 = 3`, `k2 = 5`, `ki = 3`.
    pub const BENCHMARK: ControllerGains = ControllerGains {
        k1: 3.0,
        k2: 5.0,
        ki: 3.0,
    };

    pub fn new(k1: f64, k2: f64, ki: f64) -> Result<Self> {
        if !(k1 > 0.0 && k1.is_finite()) {
            return Err(Error::invalid("k1", k1, "must be positive"));
        }
        if !(k2 > 0.0 && k2.is_finite()) {
            return Err(Error::invalid("k2", k2, "must be positive"));
        }
        if !(ki >= 0.0 && ki.is_finite()) {
            return Err(Error::invalid("ki", ki, "must be non-negative"));
        }
        Ok(Self { k1, k2, ki })
    }

    pub fn k1(&self) -> f64 {
        self.k1
    }

    pub fn k2(&self) -> f64 {
        self.k2
    }

    pub fn ki(&self) -> f64 {
        self.ki
    }
}

impl Default for ControllerGains {
    fn default() -> Self {
        Self::BENCHMARK
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Flc,
    FlcI,
    FlcBndo,
    FlcSldo,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Flc, Variant::FlcI, Variant::FlcBndo, Variant::FlcSldo];

    /// Short name used on the command line (`flc`, `flci`, `bndo`, `sldo`).
    pub fn short_name(self) -> &'static str {
        match self {
            Variant::Flc => "flc",
            Variant::FlcI => "flci",
            Variant::FlcBndo => "bndo",
            Variant::FlcSldo => "sldo",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Variant::Flc => "FLC",
            Variant::FlcI => "FLC-I",
            Variant::FlcBndo => "FLC-BNDO",
            Variant::FlcSldo => "FLC-SLDO",
        }
    }
}

impl core::str::FromStr for Variant {
    type Err = &'static str;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        let s = s.trim();
        let is = |names: &[&str]| names.iter().any(|n| s.eq_ignore_ascii_case(n));
        if is(&["flc"]) {
            Ok(Variant::Flc)
        } else if is(&["flci", "flc-i"]) {
            Ok(Variant::FlcI)
        } else if is(&["bndo", "flc-bndo"]) {
            Ok(Variant::FlcBndo)
        } else if is(&["sldo", "flc-sldo"]) {
            Ok(Variant::FlcSldo)
        } else {
            Err("expected one of flc, flci, bndo, sldo")
        }
    }
}

/// Per-run controller memory. Only FLC-I ever touches `integral_x1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerState {
    variant: Variant,
    integral_x1: f64,
}

impl ControllerState {
    pub fn new(variant: Variant) -> Self {
        Self {
            variant,
            integral_x1: 0.0,
        }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn integral_x1(&self) -> f64 {
        self.integral_x1
    }

    /// FLC-I state carrying a preset integral.
    pub fn with_integral(integral_x1: f64) -> Self {
        Self {
            variant: Variant::FlcI,
            integral_x1,
        }
    }
}

/// Estimates available to the control laws at one sample.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Estimates {
    pub d_hat_bn: f64,
    pub d_hat_sl: f64,
    /// `ḋ̂_SL`, i.e. the SLDO's `τ`.
    pub d_hat_sl_rate: f64,
}

fn feedback_linearize(
    state: PlantState,
    gains: &ControllerGains,
    model: &PlantModel,
    d_hat: f64,
    extra: f64,
) -> Result<f64> {
    let b = model.checked_input_gain(state)?;
    let v = model.drift(state) + gains.k1 * state.x1 + gains.k2 * (state.x2 + d_hat) + extra;
    let u = -v / b;
    if u.is_finite() {
        Ok(u)
    } else {
        Err(Error::NonFinite {
            what: "control signal",
        })
    }
}

/// `u = −b⁻¹(a + k₁x₁ + k₂x₂)`.
pub fn flc_control(state: PlantState, gains: &ControllerGains, model: &PlantModel) -> Result<f64> {
    feedback_linearize(state, gains, model, 0.0, 0.0)
}

/// `u = −b⁻¹(a + k₁x₁ + k₂x₂ + kᵢ∫x₁)`, then `∫x₁ += x₁·dt`.
pub fn flci_control(
    state: PlantState,
    cstate: ControllerState,
    gains: &ControllerGains,
    model: &PlantModel,
    dt: f64,
) -> Result<(f64, ControllerState)> {
    if !(dt > 0.0) {
        return Err(Error::invalid("dt", dt, "time step must be positive"));
    }
    let u = feedback_linearize(state, gains, model, 0.0, gains.ki * cstate.integral_x1)?;
    let next = ControllerState {
        variant: cstate.variant,
        integral_x1: cstate.integral_x1 + state.x1 * dt,
    };
    Ok((u, next))
}

/// `u = −b⁻¹(a + k₁x₁ + k₂(x₂ + d̂_BN))`.
pub fn flc_bndo_control(
    state: PlantState,
    d_hat: f64,
    gains: &ControllerGains,
    model: &PlantModel,
) -> Result<f64> {
    feedback_linearize(state, gains, model, d_hat, 0.0)
}

/// `u = −b⁻¹(a + k₁x₁ + k₂(x₂ + d̂_SL) + ḋ̂_SL)`.
pub fn flc_sldo_control(
    state: PlantState,
    d_hat_sl: f64,
    d_hat_sl_rate: f64,
    gains: &ControllerGains,
    model: &PlantModel,
) -> Result<f64> {
    feedback_linearize(state, gains, model, d_hat_sl, d_hat_sl_rate)
}

/// Dispatches on the variant held in `cstate`. The integral only advances
/// for FLC-I.
pub fn control(
    state: PlantState,
    estimates: &Estimates,
    cstate: &mut ControllerState,
    gains: &ControllerGains,
    model: &PlantModel,
    dt: f64,
) -> Result<f64> {
    match cstate.variant {
        Variant::Flc => flc_control(state, gains, model),
        Variant::FlcI => {
            let (u, next) = flci_control(state, *cstate, gains, model, dt)?;
            *cstate = next;
            Ok(u)
        }
        Variant::FlcBndo => flc_bndo_control(state, estimates.d_hat_bn, gains, model),
        Variant::FlcSldo => flc_sldo_control(
            state,
            estimates.d_hat_sl,
            estimates.d_hat_sl_rate,
            gains,
            model,
        ),
    }
}

/// Closed-loop `x₁` equilibrium under a constant disturbance `d`.
///
/// Plain FLC settles where `k₁x₁ = k₂d`; the integral and observer-based
/// laws remove the offset.
pub fn predict_steady_state_x1(variant: Variant, gains: &ControllerGains, d_const: f64) -> f64 {
    match variant {
        Variant::Flc => gains.k2 * d_const / gains.k1,
        Variant::FlcI | Variant::FlcBndo | Variant::FlcSldo => 0.0,
    }
}
