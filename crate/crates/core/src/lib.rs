//! Threshold equilibria of global coordination games in which agents hold
//! heterogeneous, normally dispersed prior means.
//!
//! The [`equilibria`] and [`actions`] modules solve for thresholds and evaluate
//! closed-form uniqueness conditions; [`oracle`] re-derives the same quantities by
//! simulation and quadrature; [`cli`] drives both from the `ggame` binary.

pub mod actions;
pub mod cli;
pub mod equilibria;
pub mod error;
pub mod market;
pub mod model;
pub mod numerics;
pub mod oracle;

pub use error::{Error, Result};
