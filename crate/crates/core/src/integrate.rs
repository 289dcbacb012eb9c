//! Fixed-step integrators.
//!
//! Controller and observer outputs are held constant across a step; only the
//! plant state (and exogenous signals evaluated inside the derivative
//! closure) vary between stages.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plant::PlantState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Euler,
    #[default]
    Rk4,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Euler => "euler",
            Scheme::Rk4 => "rk4",
        }
    }
}

impl core::str::FromStr for Scheme {
    type Err = &'static str;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        match s {
            "euler" => Ok(Scheme::Euler),
            "rk4" => Ok(Scheme::Rk4),
            _ => Err("expected `euler` or `rk4`"),
        }
    }
}

/// One forward-Euler step from precomputed derivatives.
pub fn integrate_step(state: PlantState, derivs: (f64, f64), dt: f64) -> Result<PlantState> {
    check_dt(dt)?;
    let next = PlantState::new(state.x1 + dt * derivs.0, state.x2 + dt * derivs.1);
    if next.is_finite() {
        Ok(next)
    } else {
        Err(Error::NonFinite {
            what: "integrated state",
        })
    }
}

/// Advances `y' = f(t, y)` by one step of `scheme`.
pub fn step<const N: usize, F>(
    scheme: Scheme,
    t: f64,
    y: [f64; N],
    dt: f64,
    mut f: F,
) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    check_dt(dt)?;
    let next = match scheme {
        Scheme::Euler => axpy(&y, dt, &f(t, &y)?),
        Scheme::Rk4 => {
            let half = 0.5 * dt;
            let k1 = f(t, &y)?;
            let k2 = f(t + half, &axpy(&y, half, &k1))?;
            let k3 = f(t + half, &axpy(&y, half, &k2))?;
            let k4 = f(t + dt, &axpy(&y, dt, &k3))?;
            let mut out = y;
            for i in 0..N {
                out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            out
        }
    };
    if next.iter().all(|v| v.is_finite()) {
        Ok(next)
    } else {
        Err(Error::NonFinite {
            what: "integrated state",
        })
    }
}

/// [`step`] specialised to the plant state.
pub fn step_plant<F>(
    scheme: Scheme,
    t: f64,
    state: PlantState,
    dt: f64,
    mut f: F,
) -> Result<PlantState>
where
    F: FnMut(f64, PlantState) -> Result<(f64, f64)>,
{
    step(scheme, t, state.to_array(), dt, |t, y| {
        let (a, b) = f(t, PlantState::from_array(*y))?;
        Ok([a, b])
    })
    .map(PlantState::from_array)
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, k: &[f64; N]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += h * k[i];
    }
    out
}

fn check_dt(dt: f64) -> Result<()> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("dt", dt, "time step must be positive"))
    }
}
