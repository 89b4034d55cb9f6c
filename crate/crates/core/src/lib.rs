//! Method-of-characteristics toolkit for scalar controlled balance laws
//! u_t + f(u)_x = g(t, x, u, α(t)) with strictly convex flux.
//!
//! The crate integrates characteristics together with their y-derivatives
//! up to third order, locates gradient blow-up, tracks the resulting shocks
//! by Rankine-Hugoniot, classifies interaction points by singularity index,
//! computes first-order shock shifts under control perturbations and runs a
//! small projected-gradient optimal control loop on top.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod characteristics;
pub mod error;
pub mod io;
pub mod models;
pub mod numerics;
pub mod optctl;
pub mod sensitivity;
pub mod shockfront;

pub use error::{Error, Result};
