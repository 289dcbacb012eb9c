//! Interval type-2 Takagi–Sugeno–Kang neuro-fuzzy estimator.
//!
//! Two inputs with `I` and `J` Gaussian membership functions each, giving
//! `K = I·J` rules with constant consequents `f_ij`. Every membership has a
//! lower and an upper member; rule firing is the product of the two input
//! memberships and the output blends the two normalized aggregates:
//!
//! ```text
//! τ_n = q·Σ f_ij·w̲̃_ij + (1 − q)·Σ f_ij·w̃̄_ij
//! ```
//!
//! Parameters are trained online by sliding-mode rules driven by the smoothed
//! sign of a learning error `s`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sign::smoothed_sign;

/// Spreads never fall below this value.
pub const SIGMA_FLOOR: f64 = 1e-3;
/// `|ξ − c|` and `|F·(w̲̃ − w̃̄)|` below this freeze the rule that divides by
/// them.
pub const DENOMINATOR_GUARD: f64 = 1e-6;
/// A spread rule whose one-step change exceeds this fraction of the spread
/// is frozen for that step.
pub const MAX_SIGMA_STEP: f64 = 0.5;

/// Bit flags describing which guards fired during one adaptation step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Guards(pub u32);

impl Guards {
    pub const NONE: Guards = Guards(0);
    /// A spread rule met `|ξ − c| < 1e-6`.
    pub const SIGMA_SINGULAR: Guards = Guards(1);
    /// A spread rule produced a step larger than half the spread.
    pub const SIGMA_STEP: Guards = Guards(1 << 1);
    /// The `q` rule denominator was below the guard.
    pub const Q_FROZEN: Guards = Guards(1 << 2);
    /// The consequent rule denominator was below the guard.
    pub const CONSEQUENT_FROZEN: Guards = Guards(1 << 3);
    /// A spread was clamped to [`SIGMA_FLOOR`].
    pub const SIGMA_FLOOR: Guards = Guards(1 << 4);
    /// `q` left `[0, 1]`. Informational only.
    pub const Q_EXCURSION: Guards = Guards(1 << 5);
    /// Differencing history not yet available; inputs were zeroed.
    pub const WARM_UP: Guards = Guards(1 << 6);

    /// Flags that mean some adaptation rule did not run as written.
    pub const ACTIVE_MASK: Guards = Guards(0b1_1111);

    pub fn contains(self, other: Guards) -> bool {
        self.0 & other.0 == other.0
    }

    pub fn intersects(self, other: Guards) -> bool {
        self.0 & other.0 != 0
    }

    pub fn insert(&mut self, other: Guards) {
        self.0 |= other.0;
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// True when a rule was frozen or clamped this step.
    pub fn any_active(self) -> bool {
        self.intersects(Self::ACTIVE_MASK)
    }
}

impl core::ops::BitOr for Guards {
    type Output = Guards;

    fn bitor(self, rhs: Guards) -> Guards {
        Guards(self.0 | rhs.0)
    }
}

/// Initial layout: centres evenly spaced over `[-range, range]` per input,
/// lower spread equal to the centre spacing, upper spread a fixed multiple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct T2nfsInit {
    pub mfs: [usize; 2],
    pub range: [f64; 2],
    pub upper_spread_ratio: f64,
    pub q0: f64,
    pub alpha: f64,
    /// Start with upper parameters equal to the lower ones.
    pub type1: bool,
}

impl Default for T2nfsInit {
    fn default() -> Self {
        Self {
            mfs: [3, 3],
            range: [3.0, 3.0],
            upper_spread_ratio: 1.3,
            q0: 0.5,
            alpha: 0.03,
            type1: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct T2nfsParams {
    mfs: [usize; 2],
    c_lower: [Vec<f64>; 2],
    c_upper: [Vec<f64>; 2],
    sigma_lower: [Vec<f64>; 2],
    sigma_upper: [Vec<f64>; 2],
    /// Row-major `I × J`.
    f: Vec<f64>,
    q: f64,
    alpha: f64,
}

impl T2nfsParams {
    pub fn from_init(init: &T2nfsInit) -> Result<Self> {
        for (k, &n) in init.mfs.iter().enumerate() {
            if n == 0 {
                return Err(Error::invalid(
                    if k == 0 { "mfs[0]" } else { "mfs[1]" },
                    0.0,
                    "need at least one membership function",
                ));
            }
        }
        for r in init.range {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::invalid("range", r, "must be positive"));
            }
        }
        if !(init.upper_spread_ratio >= 1.0 && init.upper_spread_ratio.is_finite()) {
            return Err(Error::invalid(
                "upper_spread_ratio",
                init.upper_spread_ratio,
                "must be at least 1",
            ));
        }
        if !init.q0.is_finite() {
            return Err(Error::invalid("q0", init.q0, "must be finite"));
        }
        if !(init.alpha >= 0.0 && init.alpha.is_finite()) {
            return Err(Error::invalid("alpha", init.alpha, "must be non-negative"));
        }
        let layout = |n: usize, r: f64| -> (Vec<f64>, f64) {
            if n == 1 {
                (vec![0.0], 2.0 * r)
            } else {
                let spacing = 2.0 * r / (n - 1) as f64;
                ((0..n).map(|i| -r + spacing * i as f64).collect(), spacing)
            }
        };
        let (c0, s0) = layout(init.mfs[0], init.range[0]);
        let (c1, s1) = layout(init.mfs[1], init.range[1]);
        let ratio = if init.type1 {
            1.0
        } else {
            init.upper_spread_ratio
        };
        let sigma_lower = [vec![s0; init.mfs[0]], vec![s1; init.mfs[1]]];
        let sigma_upper = [vec![s0 * ratio; init.mfs[0]], vec![s1 * ratio; init.mfs[1]]];
        Ok(Self {
            mfs: init.mfs,
            c_lower: [c0.clone(), c1.clone()],
            c_upper: [c0, c1],
            sigma_lower,
            sigma_upper,
            f: vec![0.0; init.mfs[0] * init.mfs[1]],
            q: init.q0,
            alpha: init.alpha,
        })
    }

    pub fn mfs(&self) -> [usize; 2] {
        self.mfs
    }

    pub fn rules(&self) -> usize {
        self.mfs[0] * self.mfs[1]
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn consequents(&self) -> &[f64] {
        &self.f
    }

    pub fn c_lower(&self, input: usize) -> &[f64] {
        &self.c_lower[input]
    }

    pub fn c_upper(&self, input: usize) -> &[f64] {
        &self.c_upper[input]
    }

    pub fn sigma_lower(&self, input: usize) -> &[f64] {
        &self.sigma_lower[input]
    }

    pub fn sigma_upper(&self, input: usize) -> &[f64] {
        &self.sigma_upper[input]
    }

    pub fn set_consequents(&mut self, f: &[f64]) -> Result<()> {
        if f.len() != self.f.len() {
            return Err(Error::invalid("f", f.len() as f64, "wrong number of rules"));
        }
        self.f.copy_from_slice(f);
        Ok(())
    }

    pub fn set_q(&mut self, q: f64) {
        self.q = q;
    }

    pub fn set_alpha(&mut self, alpha: f64) {
        self.alpha = alpha;
    }

    /// Smallest spread across both families and inputs.
    pub fn min_sigma(&self) -> f64 {
        self.sigma_lower
            .iter()
            .chain(&self.sigma_upper)
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest `|upper − lower|` over centres and spreads.
    pub fn max_family_gap(&self) -> f64 {
        let mut gap: f64 = 0.0;
        for k in 0..2 {
            for (a, b) in self.c_lower[k].iter().zip(&self.c_upper[k]) {
                gap = gap.max((a - b).abs());
            }
            for (a, b) in self.sigma_lower[k].iter().zip(&self.sigma_upper[k]) {
                gap = gap.max((a - b).abs());
            }
        }
        gap
    }

    /// Upper centres and spreads overwritten by the lower ones. `q` is kept
    /// but no longer influences the output.
    pub fn to_type1(&self) -> Self {
        let mut out = self.clone();
        out.c_upper = out.c_lower.clone();
        out.sigma_upper = out.sigma_lower.clone();
        out
    }

    /// Shifts every centre of input `k` by `delta[k]`.
    pub fn track_inputs(&mut self, delta: [f64; 2]) {
        for k in 0..2 {
            for c in self.c_lower[k].iter_mut().chain(self.c_upper[k].iter_mut()) {
                *c += delta[k];
            }
        }
    }

    /// One `(path, value)` row per parameter, in the order `c_lower`,
    /// `c_upper`, `sigma_lower`, `sigma_upper` (each input-major), `f`
    /// (row-major), `q`, `alpha`.
    pub fn flat_table(&self) -> Vec<(String, f64)> {
        let mut rows = Vec::with_capacity(4 * (self.mfs[0] + self.mfs[1]) + self.rules() + 2);
        let families = [
            ("c_lower", &self.c_lower),
            ("c_upper", &self.c_upper),
            ("sigma_lower", &self.sigma_lower),
            ("sigma_upper", &self.sigma_upper),
        ];
        for (name, fam) in families {
            for (k, vals) in fam.iter().enumerate() {
                for (i, v) in vals.iter().enumerate() {
                    rows.push((format!("{name}[{k}][{i}]"), *v));
                }
            }
        }
        for i in 0..self.mfs[0] {
            for j in 0..self.mfs[1] {
                rows.push((format!("f[{i}][{j}]"), self.f[i * self.mfs[1] + j]));
            }
        }
        rows.push((String::from("q"), self.q));
        rows.push((String::from("alpha"), self.alpha));
        rows
    }
}

/// `exp(−((ξ − c)/σ)²)`.
pub fn membership(xi: f64, c: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::invalid("sigma", sigma, "spread must be positive"));
    }
    let z = (xi - c) / sigma;
    Ok(libm::exp(-z * z))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiringState {
    pub w_lower: Vec<f64>,
    pub w_upper: Vec<f64>,
    pub w_norm_lower: Vec<f64>,
    pub w_norm_upper: Vec<f64>,
    pub tau_n: f64,
}

fn memberships(xi: f64, c: &[f64], sigma: &[f64]) -> Result<Vec<f64>> {
    c.iter().zip(sigma).map(|(&c, &s)| membership(xi, c, s)).collect()
}

fn firing(params: &T2nfsParams, xi: [f64; 2], c: &[Vec<f64>; 2], sigma: &[Vec<f64>; 2]) -> Result<Vec<f64>> {
    let m0 = memberships(xi[0], &c[0], &sigma[0])?;
    let m1 = memberships(xi[1], &c[1], &sigma[1])?;
    let mut w = Vec::with_capacity(params.rules());
    for a in &m0 {
        for b in &m1 {
            w.push(a * b);
        }
    }
    Ok(w)
}

fn normalize(w: &[f64]) -> Result<Vec<f64>> {
    let sum: f64 = w.iter().sum();
    if !(sum >= 1e-300) {
        return Err(Error::DegenerateFiring { sum });
    }
    Ok(w.iter().map(|v| v / sum).collect())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Firing strengths and network output at `(ξ₁, ξ₂)`.
pub fn forward(params: &T2nfsParams, xi1: f64, xi2: f64) -> Result<FiringState> {
    if !(xi1.is_finite() && xi2.is_finite()) {
        return Err(Error::NonFinite {
            what: "fuzzy inputs",
        });
    }
    let xi = [xi1, xi2];
    let w_lower = firing(params, xi, &params.c_lower, &params.sigma_lower)?;
    let w_upper = firing(params, xi, &params.c_upper, &params.sigma_upper)?;
    let w_norm_lower = normalize(&w_lower)?;
    let w_norm_upper = normalize(&w_upper)?;
    let tau_n = params.q * dot(&params.f, &w_norm_lower) + (1.0 - params.q) * dot(&params.f, &w_norm_upper);
    Ok(FiringState {
        w_lower,
        w_upper,
        w_norm_lower,
        w_norm_upper,
        tau_n,
    })
}

/// Inputs to one adaptation step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptStep {
    pub xi: [f64; 2],
    /// `ξ̇` fed to the centre rules.
    pub xi_rate: [f64; 2],
    /// Learning error.
    pub s: f64,
    /// Boundary-layer width of the smoothed sign.
    pub delta: f64,
    pub dt: f64,
}

/// `σ̇ = −σ/(ξ − c)·(ξ + σ²/(ξ − c))·α·sgn(s)` for one membership.
fn sigma_rate(xi: f64, c: f64, sigma: f64, alpha_sgn: f64) -> Option<f64> {
    let e = xi - c;
    if e.abs() < DENOMINATOR_GUARD {
        return None;
    }
    Some(-sigma / e * (xi + sigma * sigma / e) * alpha_sgn)
}

/// Advances every adaptable parameter by one Euler step of its rule.
///
/// `firing` must come from `forward(params, ξ₁, ξ₂)` at the same inputs.
/// Guarded rules are frozen for the step and reported in the returned flags.
pub fn adapt(params: &T2nfsParams, firing: &FiringState, step: &AdaptStep) -> Result<(T2nfsParams, Guards)> {
    if !(step.dt > 0.0) {
        return Err(Error::invalid("dt", step.dt, "time step must be positive"));
    }
    if !(step.delta > 0.0) {
        return Err(Error::invalid("delta", step.delta, "must be positive"));
    }
    if !step.s.is_finite() || !step.xi_rate.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite {
            what: "adaptation inputs",
        });
    }
    let mut guards = Guards::NONE;
    let mut next = params.clone();
    let dt = step.dt;
    let a_sgn = params.alpha * smoothed_sign(step.s, step.delta);

    for k in 0..2 {
        let xi = step.xi[k];
        let shift = dt * (step.xi_rate[k] + xi * a_sgn);
        for c in next.c_lower[k].iter_mut().chain(next.c_upper[k].iter_mut()) {
            *c += shift;
        }
        for (sig, c, old) in [
            (&mut next.sigma_lower[k], &params.c_lower[k], &params.sigma_lower[k]),
            (&mut next.sigma_upper[k], &params.c_upper[k], &params.sigma_upper[k]),
        ] {
            for i in 0..old.len() {
                let Some(rate) = sigma_rate(xi, c[i], old[i], a_sgn) else {
                    guards.insert(Guards::SIGMA_SINGULAR);
                    continue;
                };
                let inc = dt * rate;
                if !inc.is_finite() || inc.abs() > MAX_SIGMA_STEP * old[i] {
                    guards.insert(Guards::SIGMA_STEP);
                    continue;
                }
                let v = old[i] + inc;
                sig[i] = if v < SIGMA_FLOOR {
                    guards.insert(Guards::SIGMA_FLOOR);
                    SIGMA_FLOOR
                } else {
                    v
                };
            }
        }
    }

    let q = params.q;
    let wc: Vec<f64> = firing
        .w_norm_lower
        .iter()
        .zip(&firing.w_norm_upper)
        .map(|(l, u)| q * l + (1.0 - q) * u)
        .collect();
    let wc2: f64 = wc.iter().map(|v| v * v).sum();
    if wc2 < DENOMINATOR_GUARD {
        guards.insert(Guards::CONSEQUENT_FROZEN);
    } else {
        for (f, w) in next.f.iter_mut().zip(&wc) {
            *f -= dt * w * a_sgn / wc2;
        }
    }

    let den: f64 = params
        .f
        .iter()
        .zip(firing.w_norm_lower.iter().zip(&firing.w_norm_upper))
        .map(|(f, (l, u))| f * (l - u))
        .sum();
    if den.abs() < DENOMINATOR_GUARD {
        guards.insert(Guards::Q_FROZEN);
    } else {
        next.q -= dt * a_sgn / den;
    }
    if !(0.0..=1.0).contains(&next.q) {
        guards.insert(Guards::Q_EXCURSION);
    }
    if !next.q.is_finite() || !next.f.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite {
            what: "fuzzy parameters",
        });
    }
    Ok((next, guards))
}

/// `(τ_n(after) − τ_n(before))/dt` at fixed inputs.
pub fn tau_n_rate_oracle(before: &T2nfsParams, after: &T2nfsParams, xi1: f64, xi2: f64, dt: f64) -> Result<f64> {
    let a = forward(before, xi1, xi2)?.tau_n;
    let b = forward(after, xi1, xi2)?.tau_n;
    Ok((b - a) / dt)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> T2nfsParams {
        T2nfsParams::from_init(&T2nfsInit::default()).unwrap()
    }

    fn trained() -> T2nfsParams {
        let mut p = params();
        let f: Vec<f64> = (0..9).map(|k| 0.1 * k as f64 - 0.35).collect();
        p.set_consequents(&f).unwrap();
        p
    }

    #[test]
    fn membership_examples() {
        assert_eq!(membership(0.7, 0.7, 2.0).unwrap(), 1.0);
        assert!((membership(1.5, 1.0, 0.5).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(membership(2.0, 0.0, 1.0).unwrap(), (-4.0f64).exp());
        assert!(membership(0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn initial_layout() {
        let p = params();
        assert_eq!(p.c_lower(0), &[-3.0, 0.0, 3.0]);
        assert_eq!(p.c_upper(1), &[-3.0, 0.0, 3.0]);
        assert_eq!(p.sigma_lower(0), &[3.0; 3]);
        assert!((p.sigma_upper(1)[0] - 3.9).abs() < 1e-15);
        assert_eq!(p.consequents(), &[0.0; 9]);
        assert_eq!(p.q(), 0.5);
    }

    #[test]
    fn constant_consequents_pass_through() {
        let mut p = params();
        p.set_consequents(&[0.42; 9]).unwrap();
        for q in [-0.3, 0.0, 0.5, 1.7] {
            p.set_q(q);
            let fs = forward(&p, 1.3, -2.2).unwrap();
            assert!((fs.tau_n - 0.42).abs() < 1e-14);
        }
    }

    #[test]
    fn type1_output_ignores_q() {
        let p = trained().to_type1();
        let mut p2 = p.clone();
        p2.set_q(0.9);
        let a = forward(&p, 0.4, 0.1).unwrap();
        let b = forward(&p2, 0.4, 0.1).unwrap();
        assert!((a.tau_n - b.tau_n).abs() < 1e-15);
        assert_eq!(a.w_norm_lower, a.w_norm_upper);
    }

    #[test]
    fn single_rule() {
        let init = T2nfsInit {
            mfs: [1, 1],
            ..T2nfsInit::default()
        };
        let mut p = T2nfsParams::from_init(&init).unwrap();
        p.set_consequents(&[-0.8]).unwrap();
        let fs = forward(&p, 5.0, -1.0).unwrap();
        assert_eq!(fs.w_norm_lower, vec![1.0]);
        assert_eq!(fs.w_norm_upper, vec![1.0]);
        assert_eq!(fs.tau_n, -0.8);
    }

    #[test]
    fn degenerate_firing_reported() {
        let p = params();
        assert!(matches!(
            forward(&p, 1e6, 0.0),
            Err(Error::DegenerateFiring { .. })
        ));
    }

    #[test]
    fn zero_error_and_rates_change_nothing() {
        let p = trained();
        let fs = forward(&p, 0.3, -0.2).unwrap();
        let step = AdaptStep {
            xi: [0.3, -0.2],
            xi_rate: [0.0, 0.0],
            s: 0.0,
            delta: 0.05,
            dt: 1e-3,
        };
        let (next, _) = adapt(&p, &fs, &step).unwrap();
        assert_eq!(next, p);
    }

    #[test]
    fn centre_rule_substitution() {
        let p = params();
        let fs = forward(&p, 2.0, 0.0).unwrap();
        let step = AdaptStep {
            xi: [2.0, 0.0],
            xi_rate: [0.0, 0.0],
            s: 0.05,
            delta: 0.05,
            dt: 1e-3,
        };
        let (next, _) = adapt(&p, &fs, &step).unwrap();
        for i in 0..3 {
            assert!((next.c_lower(0)[i] - p.c_lower(0)[i] - 3e-5).abs() < 1e-15);
            assert!((next.c_upper(0)[i] - p.c_upper(0)[i] - 3e-5).abs() < 1e-15);
        }
    }

    #[test]
    fn consequent_rule_type1_two_rules() {
        let init = T2nfsInit {
            mfs: [2, 1],
            type1: true,
            ..T2nfsInit::default()
        };
        let p = T2nfsParams::from_init(&init).unwrap();
        let fs = forward(&p, 1.0, 0.0).unwrap();
        // Centres at −3 and 3 with spread 6.
        let m0 = (-(4.0f64 / 6.0).powi(2)).exp();
        let m1 = (-(2.0f64 / 6.0).powi(2)).exp();
        let w = [m0 / (m0 + m1), m1 / (m0 + m1)];
        let den = w[0] * w[0] + w[1] * w[1];
        let sgn = 0.5;
        let dt = 1e-3;
        let step = AdaptStep {
            xi: [1.0, 0.0],
            xi_rate: [0.0, 0.0],
            s: 0.05,
            delta: 0.05,
            dt,
        };
        let (next, _) = adapt(&p, &fs, &step).unwrap();
        for r in 0..2 {
            let expected = -dt * w[r] * 0.03 * sgn / den;
            assert!((next.consequents()[r] - expected).abs() < 1e-16);
        }
    }

    #[test]
    fn q_frozen_when_denominator_vanishes() {
        let p = params();
        let fs = forward(&p, 0.1, 0.1).unwrap();
        let step = AdaptStep {
            xi: [0.1, 0.1],
            xi_rate: [0.0, 0.0],
            s: 1.0,
            delta: 0.05,
            dt: 1e-3,
        };
        let (next, guards) = adapt(&p, &fs, &step).unwrap();
        assert!(guards.contains(Guards::Q_FROZEN));
        assert_eq!(next.q(), p.q());
    }

    #[test]
    fn sigma_frozen_at_centre() {
        let p = trained();
        let fs = forward(&p, 0.0, 0.0).unwrap();
        let step = AdaptStep {
            xi: [0.0, 0.0],
            xi_rate: [0.0, 0.0],
            s: 1.0,
            delta: 0.05,
            dt: 1e-3,
        };
        let (next, guards) = adapt(&p, &fs, &step).unwrap();
        assert!(guards.contains(Guards::SIGMA_SINGULAR));
        assert_eq!(next.sigma_lower(0)[1], p.sigma_lower(0)[1]);
    }

    fn oracle_error(dt: f64, s: f64) -> f64 {
        let p = trained();
        let xi = (0.37, -0.21);
        let fs = forward(&p, xi.0, xi.1).unwrap();
        let step = AdaptStep {
            xi: [xi.0, xi.1],
            xi_rate: [0.0, 0.0],
            s,
            delta: 0.05,
            dt,
        };
        let (next, guards) = adapt(&p, &fs, &step).unwrap();
        assert!(!guards.any_active(), "{guards:?}");
        let rate = tau_n_rate_oracle(&p, &next, xi.0, xi.1, dt).unwrap();
        (rate + 2.0 * 0.03 * smoothed_sign(s, 0.05)).abs()
    }

    #[test]
    fn tau_n_rate_identity() {
        assert!(oracle_error(1e-3, 1e3) < 1e-3);
        assert!(oracle_error(1e-3, 0.0) < 1e-15);
        let e: Vec<f64> = [1e-3, 1e-4, 1e-5].iter().map(|&dt| oracle_error(dt, 1e3)).collect();
        assert!(e[1] < e[0] && e[2] < e[1], "{e:?}");
    }

    #[test]
    fn frozen_learning_rate() {
        let mut p = trained();
        p.set_alpha(0.0);
        let fs = forward(&p, 0.37, -0.21).unwrap();
        let step = AdaptStep {
            xi: [0.37, -0.21],
            xi_rate: [0.0, 0.0],
            s: 3.0,
            delta: 0.05,
            dt: 1e-3,
        };
        let (next, _) = adapt(&p, &fs, &step).unwrap();
        assert_eq!(tau_n_rate_oracle(&p, &next, 0.37, -0.21, 1e-3).unwrap(), 0.0);
    }

    #[test]
    fn type1_survives_adaptation() {
        let mut p = trained().to_type1();
        let mut xi = [0.4, -0.3];
        for k in 0..10_000 {
            let fs = forward(&p, xi[0], xi[1]).unwrap();
            let s = if k % 7 < 3 { 0.2 } else { -0.1 };
            let rate = [0.01 * (k as f64 * 1e-3).cos(), -0.02];
            let step = AdaptStep {
                xi,
                xi_rate: rate,
                s,
                delta: 0.05,
                dt: 1e-3,
            };
            p = adapt(&p, &fs, &step).unwrap().0;
            xi[0] += 1e-3 * rate[0];
            xi[1] += 1e-3 * rate[1];
        }
        assert_eq!(p.max_family_gap(), 0.0);
    }

    #[test]
    fn flat_table_layout() {
        let rows = params().flat_table();
        assert_eq!(rows.len(), 4 * 6 + 9 + 2);
        assert_eq!(rows[0].0, "c_lower[0][0]");
        assert_eq!(rows[3].0, "c_lower[1][0]");
        assert_eq!(rows[24].0, "f[0][0]");
        assert_eq!(rows[32].0, "f[2][2]");
        assert_eq!(rows[33], (String::from("q"), 0.5));
        assert_eq!(rows[34].0, "alpha");
    }

    #[test]
    fn track_inputs_preserves_firing() {
        let mut p = trained();
        let a = forward(&p, 0.2, 0.1).unwrap();
        p.track_inputs([0.5, -1.25]);
        let b = forward(&p, 0.7, -1.15).unwrap();
        for (x, y) in a.w_norm_lower.iter().zip(&b.w_norm_lower) {
            assert!((x - y).abs() < 1e-14);
        }
    }
}
