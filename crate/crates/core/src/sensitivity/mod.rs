//! First-order sensitivity of the entropy solution: the linearized field
//! along characteristics, Rankine-Hugoniot speed partials, shock shifts and
//! the first variation of a cost.

mod linearized;
mod partials;
mod shift;
mod variation;

pub use linearized::{linearized_along_fan, Direction, LinearizedField};
pub use partials::lambda_partials;
pub use shift::{shock_shift, shock_shifts, ShiftSample, ShockShift};
pub use variation::{cost_first_variation, FirstVariation};
