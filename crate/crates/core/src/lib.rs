//! Feedback-linearization control of a second-order plant with a mismatched
//! disturbance, together with the two disturbance observers that feed it.
//!
//! The crate is `no_std` (it needs `alloc`) and holds only the numerical
//! machinery: plant and disturbance models, fixed-step integrators, the four
//! control laws, the basic nonlinear disturbance observer (BNDO), the interval
//! type-2 neuro-fuzzy estimator (T2NFS), the self-learning disturbance observer
//! (SLDO) built on top of both, the closed-loop runner and trace metrics.
//! File formats, noise generation and the command line live in `flc-sldo`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bndo;
pub mod controllers;
pub mod disturbance;
mod error;
pub mod integrate;
pub mod metrics;
pub mod plant;
pub mod scenario;
pub mod sign;
pub mod sldo;
pub mod t2nfs;

pub use error::{Error, Result};
pub use plant::{PlantModel, PlantState};
pub use sign::smoothed_sign;
