//! The entropy solution assembled from the characteristic fan: shocks
//! seeded at blow-up, tracked by Rankine-Hugoniot, merged on contact, and
//! the singular points of the resulting pattern.

mod balance;
mod events;
mod slice;
mod snapshot;
mod tracker;

pub use balance::{shock_strength_series, weak_balance_residual, BalanceReport, StrengthSeries};
pub use events::{
    classify_events, classify_singular_points, singularity_index, total_index, Event, EventKind,
    SingularPoint,
};
pub use snapshot::{sample_profile, Profile, Snapshot};
pub use tracker::{
    build_default, build_solution, default_cluster_eps, rh_speed, Death, DeathCause, Origin,
    ShockCurve, ShockSample, SolutionField,
};

pub(crate) use slice::FanSlice;
pub(crate) use tracker::build_on_fan;
