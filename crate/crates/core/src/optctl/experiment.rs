use serde::{Deserialize, Serialize};

use super::cost::CostSpec;
use super::optimize::{optimize, Evaluator, OptimizationResult, OptimizeOptions, StopReason};
use crate::error::{Error, Result};
use crate::models::{prop11_problem, ControlSignal};
use crate::shockfront::{EventKind, SolutionField};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Prop11Options {
    pub intervals: usize,
    /// Size of the two one-sided perturbations.
    pub check_eps: f64,
    /// Allowed decrease of J under a one-sided perturbation, relative to J[α*].
    pub check_tol: f64,
    pub optimize: OptimizeOptions,
}

impl Default for Prop11Options {
    fn default() -> Self {
        Prop11Options {
            intervals: 8,
            check_eps: 1e-2,
            check_tol: 1e-3,
            optimize: OptimizeOptions::default(),
        }
    }
}

/// J under a one-sided perturbation of α*.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OneSidedCheck {
    pub eps: f64,
    pub j_perturbed: f64,
    pub delta_j: f64,
    pub non_improving: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Prop11Report {
    pub delta: f64,
    pub horizon: f64,
    pub intervals: usize,
    pub j_zero: f64,
    pub j_star: f64,
    pub improved: bool,
    pub alpha_star: Vec<f64>,
    pub formation_times: Vec<f64>,
    /// Exactly two shocks form and nothing else is born before T.
    pub two_shocks: bool,
    pub merge_time: Option<f64>,
    pub merge_band: (f64, f64),
    pub merge_in_band: bool,
    /// α* + ε on the last interval: an earlier merge.
    pub tail_check: OneSidedCheck,
    /// (1 − ε) α*: a later merge.
    pub scale_check: OneSidedCheck,
    pub l1_norm: f64,
    /// |x₁(T) + x₂(T)| of the optimal run.
    pub asymmetry: Option<f64>,
    pub terminal_shock_gap: f64,
    pub iterations: usize,
    pub stop: StopReason,
    pub solves: usize,
    pub j_history: Vec<f64>,
    pub grad_norm_history: Vec<f64>,
}

/// The terminal-merge experiment: optimize the two-shock sine problem on
/// T = 1 − δ from α ≡ 0 and collect the optimality evidence.
pub fn proposition11_experiment(delta: f64, opts: &Prop11Options) -> Result<(Prop11Report, OptimizationResult, SolutionField)> {
    if opts.intervals == 0 {
        return Err(Error::Domain("need at least one control interval".into()));
    }
    let horizon = 1.0 - delta;
    let alpha0 = ControlSignal::uniform(horizon, &vec![0.0; opts.intervals])?;
    let spec = prop11_problem(delta, alpha0.clone())?;
    let cost = CostSpec::prop11();
    let result = optimize(&spec, &cost, &alpha0, &opts.optimize)?;

    let (lo, hi) = opts.optimize.bounds;
    let mut ev = Evaluator::new(&spec, &cost, lo.abs().max(hi.abs()), &opts.optimize)?;
    let j_zero = ev.cost_of(&alpha0)?;
    let best = ev.solve(&result.alpha_star)?;
    let j_star = *result.j_history.last().unwrap();

    let mut check = |control: ControlSignal| -> Result<OneSidedCheck> {
        let j = ev.cost_of(&control)?;
        Ok(OneSidedCheck {
            eps: opts.check_eps,
            j_perturbed: j,
            delta_j: j - j_star,
            non_improving: j - j_star >= -opts.check_tol * j_star.abs(),
        })
    };
    let mut tail = result.alpha_star.flat_values();
    *tail.last_mut().unwrap() += opts.check_eps;
    let tail_check = check(result.alpha_star.with_flat_values(&tail)?)?;
    let scaled: Vec<f64> = result.alpha_star.flat_values().iter().map(|v| (1.0 - opts.check_eps) * v).collect();
    let scale_check = check(result.alpha_star.with_flat_values(&scaled)?)?;

    let formation_times: Vec<f64> = best
        .events
        .iter()
        .filter(|e| matches!(e.kind, EventKind::Formation { .. }))
        .map(|e| e.t)
        .collect();
    let born_by_merge_before_t = best
        .events
        .iter()
        .any(|e| matches!(e.kind, EventKind::Merge { output: Some(_), .. }) && e.t < horizon - best.cluster_eps);
    let band = (horizon - 0.02, horizon + 0.005);
    let asymmetry = match best.shocks_at(horizon).as_slice() {
        [a, b] => Some((a.1 + b.1).abs()),
        _ => None,
    };
    let report = Prop11Report {
        delta,
        horizon,
        intervals: opts.intervals,
        j_zero,
        j_star,
        improved: j_star < j_zero,
        alpha_star: result.alpha_star.flat_values(),
        two_shocks: formation_times.len() == 2 && !born_by_merge_before_t,
        formation_times,
        merge_time: result.merge_time,
        merge_band: band,
        merge_in_band: result.merge_time.is_some_and(|t| t >= band.0 && t <= band.1),
        tail_check,
        scale_check,
        l1_norm: result.alpha_star.l1_norm(),
        asymmetry,
        terminal_shock_gap: result.terminal_shock_gap,
        iterations: result.iterations,
        stop: result.stop,
        solves: result.solves + ev.solves(),
        j_history: result.j_history.clone(),
        grad_norm_history: result.grad_norm_history.clone(),
    };
    Ok((report, result, best))
}
