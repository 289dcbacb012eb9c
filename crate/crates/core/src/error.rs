use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },

    #[error("integration produced a non-finite state at step {step}")]
    Diverged { step: usize },

    #[error("input gain b(x) = {b} is singular at x = ({x1}, {x2})")]
    SingularGain { b: f64, x1: f64, x2: f64 },

    #[error("invalid {name}: {value} ({reason})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("firing strengths degenerate (normalisation sum {sum:e})")]
    DegenerateFiring { sum: f64 },

    #[error("differencing history not warmed up ({available} of {required} samples)")]
    WarmUp { available: usize, required: usize },

    #[error("metrics window [{start}, {end}) contains no samples")]
    EmptyWindow { start: f64, end: f64 },

    #[error("invalid disturbance profile: {0}")]
    InvalidProfile(&'static str),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}
