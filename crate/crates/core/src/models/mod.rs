//! Flux, source, control and initial-data models, and the assembled problem.

pub mod control;
pub mod flux;
pub mod jet;
pub mod problem;
pub mod profile;
pub mod smooth;
pub mod source;

pub use control::{eval_control, ControlSignal};
pub use flux::{burgers_flux, Burgers, Flux, FluxModel, Polynomial};
pub use jet::{compose2, Jet3, Partials2};
pub use problem::{burgers_sine, constant_data, preset, prop11_problem, ProblemSpec, PRESETS, SINE_WINDOW};
pub use profile::{
    perturbation_family, sine_profile, ConstantProfile, InitialProfile, PerturbedProfile,
    PolynomialProfile, Profile, SineProfile, TableProfile, TanhStep,
};
pub use smooth::{bump, cutoff, smooth_step, source_shape_eta};
pub use source::{EtaControl, LinearDamping, Source, SourceModel, UniformControl, ZeroSource};
