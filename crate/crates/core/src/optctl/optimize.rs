use serde::{Deserialize, Serialize};

use super::cost::{evaluate_cost, merge_time, merge_time_extended, CostSpec};
use crate::characteristics::{default_y_grid, grid_with_spacing, Fan};
use crate::error::{Error, Result};
use crate::models::{ControlSignal, ProblemSpec};
use crate::sensitivity::{cost_first_variation, Direction};
use crate::shockfront::{build_on_fan, SolutionField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradientMethod {
    /// Central differences of J, 2N solves per gradient.
    FiniteDifference,
    /// Shift differentials; falls back to differences when the base run has
    /// a merge at the horizon.
    FirstVariation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizeOptions {
    pub max_iters: usize,
    /// Stop when an accepted step lowers J by less than this fraction.
    pub tol_j: f64,
    pub fd_step: f64,
    /// Box constraint on every control value.
    pub bounds: (f64, f64),
    pub initial_step: f64,
    pub max_step: f64,
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
    /// Consecutive halvings before the line search gives up.
    pub max_backtracks: usize,
    pub gradient: GradientMethod,
    /// Time step of every solve; the default of the problem if unset.
    pub dt: Option<f64>,
    /// Spacing of the fixed y-grid; the default spacing if unset.
    pub y_spacing: Option<f64>,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            max_iters: 40,
            tol_j: 1e-6,
            fd_step: 1e-4,
            bounds: (-2.0, 2.0),
            initial_step: 1.0,
            max_step: 16.0,
            armijo: 1e-4,
            max_backtracks: 30,
            gradient: GradientMethod::FiniteDifference,
            dt: None,
            y_spacing: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Converged,
    /// The line search failed to find descent.
    Stalled,
    IterationCap,
}

#[derive(Clone, Debug, Serialize)]
pub struct OptimizationResult {
    pub alpha_star: ControlSignal,
    pub j_history: Vec<f64>,
    /// Norm of the projected step x − P(x − ∇J) per iteration, ∇J taken
    /// in L² so that interval lengths drop out.
    pub grad_norm_history: Vec<f64>,
    /// First merge of the optimal run, looked up slightly past T if the
    /// shocks are still apart there.
    pub merge_time: Option<f64>,
    /// Distance between the outermost shocks at T, zero once merged.
    pub terminal_shock_gap: f64,
    pub iterations: usize,
    pub stop: StopReason,
    /// Forward solves spent, line search and gradients included.
    pub solves: usize,
}

/// Solves on one fixed grid so that J is a deterministic function of the
/// control values.
pub struct Evaluator<'a> {
    spec: ProblemSpec,
    cost: &'a CostSpec,
    y_grid: Vec<f64>,
    dt: f64,
    solves: usize,
}

/// Time past the horizon searched for a merge.
const MERGE_LOOKAHEAD: f64 = 0.05;

impl<'a> Evaluator<'a> {
    /// `reach` is the largest control magnitude the grid has to cover.
    pub fn new(spec: &ProblemSpec, cost: &'a CostSpec, reach: f64, opts: &OptimizeOptions) -> Result<Self> {
        let dim = spec.control.dimension();
        let mut widest = spec.clone();
        widest.control = ControlSignal::new(vec![0.0, spec.horizon], vec![vec![reach; dim]])?;
        widest.fit_window();
        let spacing = match opts.y_spacing {
            Some(s) if s > 0.0 => s,
            Some(s) => return Err(Error::Domain(format!("grid spacing must be positive, got {s}"))),
            None => {
                let g = default_y_grid(spec);
                g[1] - g[0]
            }
        };
        let dt = opts.dt.unwrap_or_else(|| spec.default_dt());
        if !(dt > 0.0 && dt <= spec.horizon) {
            return Err(Error::Domain(format!("time step {dt} outside (0, T]")));
        }
        // every admissible control fits the widened window
        let mut fitted = spec.clone();
        fitted.window = widest.window;
        Ok(Evaluator {
            y_grid: grid_with_spacing(&widest, spacing),
            spec: fitted,
            cost,
            dt,
            solves: 0,
        })
    }

    pub fn solves(&self) -> usize {
        self.solves
    }

    pub fn solve(&mut self, control: &ControlSignal) -> Result<SolutionField> {
        self.solves += 1;
        let spec = self.spec.with_control(control.clone())?;
        build_on_fan(Fan::integrate(&spec, &self.y_grid, self.dt)?)
    }

    pub fn cost_of(&mut self, control: &ControlSignal) -> Result<f64> {
        let sol = self.solve(control)?;
        Ok(evaluate_cost(&sol, self.cost)?.total)
    }

    /// Merge time of the run, continued past T when needed.
    pub fn merge_time_of(&mut self, control: &ControlSignal, sol: &SolutionField) -> Result<Option<f64>> {
        if let Some(t) = merge_time(sol) {
            return Ok(Some(t));
        }
        let spec = self.spec.with_control(control.clone())?;
        merge_time_extended(&spec, &self.y_grid, self.dt, MERGE_LOOKAHEAD)
    }

    fn fd_gradient(&mut self, control: &ControlSignal, h: f64) -> Result<Vec<f64>> {
        let x = control.flat_values();
        let mut g = vec![0.0; x.len()];
        for k in 0..x.len() {
            let (mut p, mut m) = (x.clone(), x.clone());
            p[k] += h;
            m[k] -= h;
            let jp = self.cost_of(&control.with_flat_values(&p)?)?;
            let jm = self.cost_of(&control.with_flat_values(&m)?)?;
            g[k] = (jp - jm) / (2.0 * h);
        }
        Ok(g)
    }

    /// ∂J/∂α_k from one base solve and the shift differentials, or `None`
    /// where the base run is not differentiable.
    fn variation_gradient(&mut self, control: &ControlSignal) -> Result<Option<Vec<f64>>> {
        let sol = self.solve(control)?;
        let n = control.flat_values().len();
        let mut g = Vec::with_capacity(n);
        for k in 0..n {
            let mut e = vec![0.0; n];
            e[k] = 1.0;
            let fv = cost_first_variation(&sol, self.cost, Direction::Control(control.with_flat_values(&e)?))?;
            if !fv.reliable {
                return Ok(None);
            }
            g.push(fv.total);
        }
        Ok(Some(g))
    }

    pub fn gradient(&mut self, control: &ControlSignal, opts: &OptimizeOptions) -> Result<Vec<f64>> {
        if opts.gradient == GradientMethod::FirstVariation {
            if let Some(g) = self.variation_gradient(control)? {
                return Ok(g);
            }
        }
        self.fd_gradient(control, opts.fd_step)
    }
}

fn project(x: &[f64], (lo, hi): (f64, f64)) -> Vec<f64> {
    x.iter().map(|v| v.clamp(lo, hi)).collect()
}

/// Projected gradient descent with Armijo backtracking on the values of a
/// piecewise-constant control.
pub fn optimize(
    spec: &ProblemSpec,
    cost: &CostSpec,
    alpha0: &ControlSignal,
    opts: &OptimizeOptions,
) -> Result<OptimizationResult> {
    let (lo, hi) = opts.bounds;
    if !(lo <= hi) || !(opts.fd_step > 0.0) || !(opts.initial_step > 0.0) {
        return Err(Error::Domain("invalid optimizer options".into()));
    }
    if (alpha0.horizon() - spec.horizon).abs() > 1e-12 * spec.horizon.max(1.0) {
        return Err(Error::Domain("initial control does not span the horizon".into()));
    }
    let mut ev = Evaluator::new(spec, cost, lo.abs().max(hi.abs()), opts)?;
    let mut x = project(&alpha0.flat_values(), opts.bounds);
    let mut control = alpha0.with_flat_values(&x)?;
    let mut j = ev.cost_of(&control)?;
    let mut j_history = vec![j];
    let mut grad_norm_history = Vec::new();
    let mut step = opts.initial_step;
    let mut stop = StopReason::IterationCap;
    let mut iterations = 0;

    while iterations < opts.max_iters {
        let raw = ev.gradient(&control, opts)?;
        // L² gradient: divide by the interval lengths
        let dim = control.dimension();
        let g: Vec<f64> = raw
            .iter()
            .enumerate()
            .map(|(i, v)| v / control.interval_len(i / dim))
            .collect();
        let trial: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - b).collect();
        let pg = x
            .iter()
            .zip(project(&trial, opts.bounds))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        grad_norm_history.push(pg);
        if pg == 0.0 {
            stop = StopReason::Converged;
            break;
        }
        let mut s = step;
        let mut accepted = None;
        for _ in 0..opts.max_backtracks {
            let xs: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - s * b).collect();
            let xn = project(&xs, opts.bounds);
            let decrease: f64 = raw.iter().zip(x.iter().zip(&xn)).map(|(gi, (a, b))| gi * (a - b)).sum();
            let cn = alpha0.with_flat_values(&xn)?;
            let jn = ev.cost_of(&cn)?;
            if jn <= j - opts.armijo * decrease {
                accepted = Some((xn, cn, jn));
                break;
            }
            s *= 0.5;
        }
        iterations += 1;
        let Some((xn, cn, jn)) = accepted else {
            stop = StopReason::Stalled;
            break;
        };
        let rel = (j - jn) / j.abs().max(f64::MIN_POSITIVE);
        x = xn;
        control = cn;
        j = jn;
        j_history.push(j);
        step = (2.0 * s).min(opts.max_step);
        if rel < opts.tol_j {
            stop = StopReason::Converged;
            break;
        }
    }

    let sol = ev.solve(&control)?;
    let merge = ev.merge_time_of(&control, &sol)?;
    Ok(OptimizationResult {
        terminal_shock_gap: terminal_shock_gap(&sol),
        merge_time: merge,
        alpha_star: control,
        j_history,
        grad_norm_history,
        iterations,
        stop,
        solves: ev.solves(),
    })
}

/// Distance between the outermost shocks alive at T; zero with fewer than two.
pub fn terminal_shock_gap(sol: &SolutionField) -> f64 {
    let at_t = sol.shocks_at(sol.horizon());
    match (at_t.first(), at_t.last()) {
        (Some(a), Some(b)) if at_t.len() >= 2 => b.1 - a.1,
        _ => 0.0,
    }
}
