//! Cost evaluation, projected-gradient descent over piecewise-constant
//! controls and the terminal-merge experiment.

mod cost;
mod experiment;
mod optimize;

pub use cost::{
    evaluate_cost, merge_time, merge_time_extended, psi_well, total_cost, total_cost_with, CostBreakdown,
    CostSpec, RunningCost, RunningMode, TerminalCost, PROP11_WINDOW,
};
pub use experiment::{proposition11_experiment, OneSidedCheck, Prop11Options, Prop11Report};
pub use optimize::{
    optimize, terminal_shock_gap, Evaluator, GradientMethod, OptimizationResult, OptimizeOptions, StopReason,
};
