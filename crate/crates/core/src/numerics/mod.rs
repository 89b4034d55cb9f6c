//! Shared numerical building blocks: Gauss-Legendre rules, the fixed-step
//! time grid and two-point Hermite interpolation.

pub mod hermite;
pub mod quadrature;
pub mod timegrid;

pub use hermite::Hermite7;
pub use quadrature::{gauss_legendre, GaussRule};
pub use timegrid::TimeGrid;
