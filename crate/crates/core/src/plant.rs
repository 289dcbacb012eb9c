//! Second-order plant with a mismatched disturbance channel.
//!
//! ```text
//! ẋ₁ = x₂ + d
//! ẋ₂ = a(x) + b(x)·u
//! ```
//!
//! The disturbance enters the first channel while the input acts on the
//! second, so `z = [1, 0]` is fixed.

use core::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Disturbance input vector `z`. The disturbance only ever enters `ẋ₁`.
pub const DISTURBANCE_CHANNEL: [f64; 2] = [1.0, 0.0];

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlantState {
    pub x1: f64,
    pub x2: f64,
}

impl PlantState {
    pub const ORIGIN: PlantState = PlantState { x1: 0.0, x2: 0.0 };

    pub const fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.x1, self.x2]
    }

    pub fn from_array([x1, x2]: [f64; 2]) -> Self {
        Self { x1, x2 }
    }
}

impl Add for PlantState {
    type Output = PlantState;

    fn add(self, rhs: PlantState) -> PlantState {
        PlantState::new(self.x1 + rhs.x1, self.x2 + rhs.x2)
    }
}

impl Mul<f64> for PlantState {
    type Output = PlantState;

    fn mul(self, rhs: f64) -> PlantState {
        PlantState::new(self.x1 * rhs, self.x2 * rhs)
    }
}

/// Known part of the plant: drift `a(x)` and input gain `b(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PlantModel {
    /// `a(x) = −x₁ − x₂ + 0.3·cos(x₁) + exp(x₁)`, `b(x) = 1`.
    Benchmark,
    /// `a(x) = a1·x₁ + a2·x₂`, `b(x) = b`. With all-zero drift and `b = 1`
    /// this is the double integrator used for closed-form checks.
    Linear { a1: f64, a2: f64, b: f64 },
}

impl PlantModel {
    pub const DOUBLE_INTEGRATOR: PlantModel = PlantModel::Linear {
        a1: 0.0,
        a2: 0.0,
        b: 1.0,
    };

    pub fn drift(&self, x: PlantState) -> f64 {
        match *self {
            PlantModel::Benchmark => -x.x1 - x.x2 + 0.3 * libm::cos(x.x1) + libm::exp(x.x1),
            PlantModel::Linear { a1, a2, .. } => a1 * x.x1 + a2 * x.x2,
        }
    }

    pub fn input_gain(&self, _x: PlantState) -> f64 {
        match *self {
            PlantModel::Benchmark => 1.0,
            PlantModel::Linear { b, .. } => b,
        }
    }

    /// `b(x)`, rejected when it is zero or not finite.
    pub fn checked_input_gain(&self, x: PlantState) -> Result<f64> {
        let b = self.input_gain(x);
        if b.is_finite() && b.abs() > 1e-12 {
            Ok(b)
        } else {
            Err(Error::SingularGain {
                b,
                x1: x.x1,
                x2: x.x2,
            })
        }
    }
}

/// `(ẋ₁, ẋ₂) = (x₂ + d, a(x) + b(x)·u)`.
pub fn plant_derivatives(
    state: PlantState,
    u: f64,
    d: f64,
    model: &PlantModel,
) -> Result<(f64, f64)> {
    let dx1 = state.x2 + d;
    if !dx1.is_finite() {
        return Err(Error::NonFinite { what: "x2 + d" });
    }
    let a = model.drift(state);
    if !a.is_finite() {
        return Err(Error::NonFinite { what: "a(x)" });
    }
    let b = model.input_gain(state);
    if !b.is_finite() {
        return Err(Error::NonFinite { what: "b(x)" });
    }
    let dx2 = a + b * u;
    if !dx2.is_finite() {
        return Err(Error::NonFinite {
            what: "a(x) + b(x)·u",
        });
    }
    Ok((dx1, dx2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn benchmark_at_origin() {
        let d = plant_derivatives(PlantState::ORIGIN, 0.0, 0.0, &PlantModel::Benchmark).unwrap();
        assert_eq!(d, (0.0, 1.3));
    }

    #[test]
    fn disturbance_enters_first_channel() {
        let (dx1, _) =
            plant_derivatives(PlantState::new(1.0, 1.0), 0.0, 0.5, &PlantModel::Benchmark).unwrap();
        assert_eq!(dx1, 1.5);
    }

    #[test]
    fn benchmark_at_unit_state() {
        let (dx1, dx2) =
            plant_derivatives(PlantState::new(1.0, 1.0), 0.0, 0.0, &PlantModel::Benchmark).unwrap();
        assert_eq!(dx1, 1.0);
        let expected = -1.0 - 1.0 + 0.3 * 1f64.cos() + 1f64.exp();
        assert!((dx2 - expected).abs() < 1e-15);
    }

    #[test]
    fn non_finite_terms_are_named() {
        let err = plant_derivatives(PlantState::new(1000.0, 0.0), 0.0, 0.0, &PlantModel::Benchmark)
            .unwrap_err();
        assert_eq!(err, Error::NonFinite { what: "a(x)" });
        let err = plant_derivatives(PlantState::new(0.0, f64::NAN), 0.0, 0.0, &PlantModel::Benchmark)
            .unwrap_err();
        assert_eq!(err, Error::NonFinite { what: "x2 + d" });
    }

    #[test]
    fn zero_gain_is_singular() {
        let model = PlantModel::Linear {
            a1: 0.0,
            a2: 0.0,
            b: 0.0,
        };
        assert!(matches!(
            model.checked_input_gain(PlantState::ORIGIN),
            Err(Error::SingularGain { .. })
        ));
    }

    #[test]
    fn derivatives_are_affine_in_u() {
        let model = PlantModel::Benchmark;
        let x = PlantState::new(0.3, -0.7);
        let (u1, u2) = (1.7, -4.1);
        let a = plant_derivatives(x, u1, 0.2, &model).unwrap();
        let b = plant_derivatives(x, u2, 0.2, &model).unwrap();
        let m = plant_derivatives(x, 0.5 * (u1 + u2), 0.2, &model).unwrap();
        assert!((a.0 + b.0 - 2.0 * m.0).abs() < 1e-12);
        assert!((a.1 + b.1 - 2.0 * m.1).abs() < 1e-12);
    }
}
