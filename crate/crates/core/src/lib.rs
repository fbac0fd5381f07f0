//! Curvature of the hyper-Kähler/quaternionic-Kähler correspondence on the
//! flat models `N_m`, checked numerically.

pub mod cli;
pub mod correspondence;
pub mod curvature;
pub mod error;
pub mod flat_model;
pub mod kulkarni;
pub mod pseudo_linear;

pub use error::{Error, Result};
