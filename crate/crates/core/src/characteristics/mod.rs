//! Characteristics and their variational systems up to third order in the
//! initial point, gradient blow-up, the genericity scan and the
//! transversality witness.

mod blowup;
mod genericity;
mod state;
mod trajectory;
mod witness;

pub use crate::models::perturbation_family;
pub use blowup::{
    blowup_map, blowup_map_of_fan, blowup_map_with, blowup_time, BlowupMap, Seed,
    GENERIC_THETA_TOL, GENERIC_THETA_YY_MIN, GENERIC_THETA_Y_TOL, ROOT_TOL,
};
pub use genericity::{genericity_scan, genericity_scan_with, GenericityReport, Violation, VIOLATION_TOL};
pub use state::{CharState, Dynamics};
pub(crate) use state::guarded_ratio;
pub(crate) use witness::linearized_on_steps;
pub use trajectory::{
    default_y_grid, grid_with_spacing, integrate_characteristic, integrate_on, uniform_grid,
    CharTrajectory, Fan,
};
pub use witness::{
    linearized_characteristic, transversality_witness, transversality_witness_with, Forcing,
    TransversalityWitness,
};
