//! Scenario files, measurement noise, trace export, multi-run experiments,
//! the invariant suite and SVG figures on top of `flc-sldo-core`.

pub mod check;
pub mod config;
pub mod error;
pub mod experiments;
pub mod noise;
pub mod plots;
pub mod trace;

pub use error::{Result, SimError};
pub use flc_sldo_core as core;
