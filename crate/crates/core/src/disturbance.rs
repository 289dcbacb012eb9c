//! Deterministic disturbance signals `d(t)`.
//!
//! Every profile is active on a half-open window `[t_on, t_off)` and
//! evaluates to zero outside it.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DisturbanceProfile {
    Zero,
    Step {
        magnitude: f64,
        t_on: f64,
        t_off: f64,
    },
    /// `offset + Σ aₖ·sin(ωₖ·t)`, with `t` in absolute seconds.
    MultiSine {
        offset: f64,
        amplitudes: Vec<f64>,
        frequencies: Vec<f64>,
        t_on: f64,
        t_off: f64,
    },
    Piecewise { segments: Vec<Segment> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub profile: DisturbanceProfile,
}

fn active(t: f64, t_on: f64, t_off: f64) -> bool {
    t >= t_on && t < t_off
}

impl DisturbanceProfile {
    /// No disturbance on `[0, 20)`, a 0.5 step on `[20, 40)` and
    /// `0.25 + 0.15·(sin 0.5t + sin 1.5t)` on `[40, 60)`.
    pub fn three_phase() -> Self {
        DisturbanceProfile::Piecewise {
            segments: vec![
                Segment {
                    start: 0.0,
                    end: 20.0,
                    profile: DisturbanceProfile::Zero,
                },
                Segment {
                    start: 20.0,
                    end: 40.0,
                    profile: DisturbanceProfile::Step {
                        magnitude: 0.5,
                        t_on: 20.0,
                        t_off: 40.0,
                    },
                },
                Segment {
                    start: 40.0,
                    end: 60.0,
                    profile: DisturbanceProfile::benchmark_multi_sine(40.0, 60.0),
                },
            ],
        }
    }

    pub fn benchmark_multi_sine(t_on: f64, t_off: f64) -> Self {
        DisturbanceProfile::MultiSine {
            offset: 0.25,
            amplitudes: vec![0.15, 0.15],
            frequencies: vec![0.5, 1.5],
            t_on,
            t_off,
        }
    }

    /// `d(t)`. Total; a pure function of `t`.
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            DisturbanceProfile::Zero => 0.0,
            DisturbanceProfile::Step {
                magnitude,
                t_on,
                t_off,
            } => {
                if active(t, *t_on, *t_off) {
                    *magnitude
                } else {
                    0.0
                }
            }
            DisturbanceProfile::MultiSine {
                offset,
                amplitudes,
                frequencies,
                t_on,
                t_off,
            } => {
                if !active(t, *t_on, *t_off) {
                    return 0.0;
                }
                let waves: f64 = amplitudes
                    .iter()
                    .zip(frequencies)
                    .map(|(a, w)| a * libm::sin(w * t))
                    .sum();
                offset + waves
            }
            DisturbanceProfile::Piecewise { segments } => segments
                .iter()
                .find(|s| active(t, s.start, s.end))
                .map_or(0.0, |s| s.profile.eval(t)),
        }
    }

    /// Upper bound on `|d̈|` for the smooth parts of the profile (steps
    /// contribute nothing away from their edges).
    pub fn second_derivative_bound(&self) -> f64 {
        match self {
            DisturbanceProfile::Zero | DisturbanceProfile::Step { .. } => 0.0,
            DisturbanceProfile::MultiSine {
                amplitudes,
                frequencies,
                ..
            } => amplitudes
                .iter()
                .zip(frequencies)
                .map(|(a, w)| libm::fabs(a * w * w))
                .sum(),
            DisturbanceProfile::Piecewise { segments } => segments
                .iter()
                .map(|s| s.profile.second_derivative_bound())
                .fold(0.0, f64::max),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DisturbanceProfile::Zero => Ok(()),
            DisturbanceProfile::Step {
                magnitude,
                t_on,
                t_off,
            } => {
                if !magnitude.is_finite() {
                    return Err(Error::InvalidProfile("step magnitude is not finite"));
                }
                check_window(*t_on, *t_off)
            }
            DisturbanceProfile::MultiSine {
                offset,
                amplitudes,
                frequencies,
                t_on,
                t_off,
            } => {
                if amplitudes.len() != frequencies.len() {
                    return Err(Error::InvalidProfile(
                        "multi-sine amplitudes and frequencies differ in length",
                    ));
                }
                if !offset.is_finite()
                    || amplitudes.iter().chain(frequencies).any(|v| !v.is_finite())
                {
                    return Err(Error::InvalidProfile("multi-sine term is not finite"));
                }
                check_window(*t_on, *t_off)
            }
            DisturbanceProfile::Piecewise { segments } => {
                for s in segments {
                    check_window(s.start, s.end)?;
                    s.profile.validate()?;
                }
                if segments.windows(2).any(|w| w[1].start < w[0].end) {
                    return Err(Error::InvalidProfile(
                        "piecewise segments overlap or are out of order",
                    ));
                }
                Ok(())
            }
        }
    }
}

fn check_window(t_on: f64, t_off: f64) -> Result<()> {
    if t_on.is_nan() || t_off.is_nan() || t_on < 0.0 || t_off < t_on {
        Err(Error::InvalidProfile("window must satisfy 0 <= t_on <= t_off"))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_inside_and_outside() {
        let p = DisturbanceProfile::Step {
            magnitude: 0.5,
            t_on: 20.0,
            t_off: 40.0,
        };
        assert_eq!(p.eval(30.0), 0.5);
        assert_eq!(p.eval(19.999), 0.0);
        assert_eq!(p.eval(20.0), 0.5);
        assert_eq!(p.eval(40.0), 0.0);
    }

    #[test]
    fn zero_profile() {
        assert_eq!(DisturbanceProfile::Zero.eval(10.0), 0.0);
    }

    #[test]
    fn multi_sine_at_window_start() {
        let p = DisturbanceProfile::benchmark_multi_sine(40.0, 60.0);
        let expected = 0.25 + 0.15 * (20f64.sin() + 60f64.sin());
        assert!((p.eval(40.0) - expected).abs() < 1e-15);
        assert_eq!(p.eval(39.0), 0.0);
    }

    #[test]
    fn three_phase_timeline() {
        let p = DisturbanceProfile::three_phase();
        p.validate().unwrap();
        assert_eq!(p.eval(10.0), 0.0);
        assert_eq!(p.eval(25.0), 0.5);
        let t: f64 = 50.0;
        let expected = 0.25 + 0.15 * ((0.5 * t).sin() + (1.5 * t).sin());
        assert!((p.eval(t) - expected).abs() < 1e-15);
        assert_eq!(p.eval(60.0), 0.0);
    }

    #[test]
    fn second_derivative_bound_of_benchmark() {
        let bound = DisturbanceProfile::three_phase().second_derivative_bound();
        assert!((bound - 0.375).abs() < 1e-15);
    }

    #[test]
    fn overlapping_segments_rejected() {
        let p = DisturbanceProfile::Piecewise {
            segments: vec![
                Segment {
                    start: 0.0,
                    end: 10.0,
                    profile: DisturbanceProfile::Zero,
                },
                Segment {
                    start: 5.0,
                    end: 20.0,
                    profile: DisturbanceProfile::Zero,
                },
            ],
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn mismatched_multi_sine_rejected() {
        let p = DisturbanceProfile::MultiSine {
            offset: 0.0,
            amplitudes: vec![1.0],
            frequencies: vec![],
            t_on: 0.0,
            t_off: 1.0,
        };
        assert!(p.validate().is_err());
    }
}
