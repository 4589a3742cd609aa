//! Robust score tests for generalized linear models by sign-flipping
//! per-observation score contributions.

pub mod baselines;
pub mod data;
pub mod error;
pub mod flip;
pub mod glm;
pub mod linalg;
pub mod rng;
pub mod sim;
pub mod table;

pub use error::{Error, Result};
