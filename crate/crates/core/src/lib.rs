//! Completely monotone (CM) preserving discretizations of Caputo fractional
//! ODEs and convolutional Volterra equations.
//!
//! [`schemes`] builds the weight pairs, [`solver`] marches them, [`seqkit`]
//! checks complete monotonicity, [`stability`] maps the instability set,
//! [`analysis`] measures monotonicity, decay and convergence, and [`pdelab`]
//! runs time-fractional advection-diffusion on a 1-D grid.

// `!(x > 0.0)` is used on purpose so that NaN fails argument checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod mlf;
pub mod pdelab;
pub mod schemes;
pub mod seqkit;
pub mod solver;
pub mod special;
pub mod stability;

pub use error::{Error, Result};
