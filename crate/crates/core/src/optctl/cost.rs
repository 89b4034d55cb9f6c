use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::characteristics::Fan;
use crate::error::{Error, Result};
use crate::models::ProblemSpec;
use crate::numerics::quadrature::gauss8;
use crate::shockfront::{build_on_fan, Snapshot, SolutionField};

/// Φ(t, x, u, α). In time-integral mode x and u are passed as NaN.
pub type RunningCost = Arc<dyn Fn(f64, f64, f64, &[f64]) -> f64 + Send + Sync>;
/// Ψ(x, u).
pub type TerminalCost = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RunningMode {
    /// ∫₀ᵀ Φ(t, α(t)) dt.
    TimeIntegral,
    /// ∫₀ᵀ ∫ Φ(t, x, u, α(t)) dx dt over the terminal window.
    SpaceTime,
}

/// J[α] = running cost + ∫ Ψ(x, u(T, x)) dx over the terminal window.
#[derive(Clone)]
pub struct CostSpec {
    pub running: RunningCost,
    pub terminal: TerminalCost,
    pub terminal_window: (f64, f64),
    pub running_mode: RunningMode,
}

impl fmt::Debug for CostSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CostSpec")
            .field("terminal_window", &self.terminal_window)
            .field("running_mode", &self.running_mode)
            .finish_non_exhaustive()
    }
}

/// Ψ(u) = (u − 1)²(u + 1)² on |u| <= 1, zero outside.
pub fn psi_well(u: f64) -> f64 {
    if u.abs() <= 1.0 {
        let s = u * u - 1.0;
        s * s
    } else {
        0.0
    }
}

pub const PROP11_WINDOW: (f64, f64) = (-4.0 * std::f64::consts::PI, 4.0 * std::f64::consts::PI);

impl CostSpec {
    /// Φ = α², Ψ = [`psi_well`] on [−4π, 4π].
    pub fn prop11() -> Self {
        CostSpec {
            running: Arc::new(|_, _, _, a: &[f64]| a.iter().map(|v| v * v).sum()),
            terminal: Arc::new(|_, u| psi_well(u)),
            terminal_window: PROP11_WINDOW,
            running_mode: RunningMode::TimeIntegral,
        }
    }

    /// Φ = α² and no terminal cost.
    pub fn control_energy() -> Self {
        CostSpec {
            terminal: Arc::new(|_, _| 0.0),
            ..Self::prop11()
        }
    }

    /// The same cost with Ψ multiplied by `k`.
    pub fn with_terminal_scale(&self, k: f64) -> Self {
        let psi = self.terminal.clone();
        CostSpec {
            terminal: Arc::new(move |x, u| k * psi(x, u)),
            ..self.clone()
        }
    }

    /// ∂Ψ/∂u by central differences.
    pub(crate) fn terminal_du(&self, x: f64, u: f64) -> f64 {
        let h = 1e-6 * u.abs().max(1.0);
        ((self.terminal)(x, u + h) - (self.terminal)(x, u - h)) / (2.0 * h)
    }

    /// ∂Φ/∂α_c by central differences, time-integral mode.
    pub(crate) fn running_dalpha(&self, t: f64, alpha: &[f64], c: usize) -> f64 {
        let h = 1e-6 * alpha[c].abs().max(1.0);
        let (mut p, mut m) = (alpha.to_vec(), alpha.to_vec());
        p[c] += h;
        m[c] -= h;
        ((self.running)(t, f64::NAN, f64::NAN, &p) - (self.running)(t, f64::NAN, f64::NAN, &m)) / (2.0 * h)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CostBreakdown {
    pub running: f64,
    pub terminal: f64,
    pub total: f64,
}

const PANEL: f64 = 0.02;

/// Running and terminal cost of a built solution.
pub fn evaluate_cost(sol: &SolutionField, cost: &CostSpec) -> Result<CostBreakdown> {
    let horizon = sol.horizon();
    let control = &sol.spec.control;
    let rule = gauss8();
    let bps = control.breakpoints();
    let mut running = 0.0;
    for w in bps.windows(2) {
        let (a, b) = (w[0], w[1].min(horizon));
        if b <= a {
            continue;
        }
        let n = ((b - a) / PANEL).ceil().max(1.0) as usize;
        for p in 0..n {
            let pa = a + (b - a) * p as f64 / n as f64;
            let pb = a + (b - a) * (p + 1) as f64 / n as f64;
            for (t, wt) in rule.mapped(pa, pb) {
                let alpha = control.eval_clamped(t);
                running += wt
                    * match cost.running_mode {
                        RunningMode::TimeIntegral => (cost.running)(t, f64::NAN, f64::NAN, alpha),
                        RunningMode::SpaceTime => {
                            let (xa, xb) = cost.terminal_window;
                            Snapshot::new(sol, t)?.integrate(xa, xb, |x, u| (cost.running)(t, x, u, alpha))?
                        }
                    };
            }
        }
    }
    let (xa, xb) = cost.terminal_window;
    let terminal = Snapshot::new(sol, horizon)?.integrate(xa, xb, |x, u| (cost.terminal)(x, u))?;
    Ok(CostBreakdown {
        running,
        terminal,
        total: running + terminal,
    })
}

/// Builds the solution on the default grid and evaluates J.
pub fn total_cost(spec: &ProblemSpec, cost: &CostSpec) -> Result<f64> {
    let sol = crate::shockfront::build_default(spec)?;
    Ok(evaluate_cost(&sol, cost)?.total)
}

/// J on a prescribed fan grid and time step.
pub fn total_cost_with(spec: &ProblemSpec, cost: &CostSpec, y_grid: &[f64], dt: f64) -> Result<f64> {
    let sol = build_on_fan(Fan::integrate(spec, y_grid, dt)?)?;
    Ok(evaluate_cost(&sol, cost)?.total)
}

/// Time of the first merge or terminal contact, if any.
pub fn merge_time(sol: &SolutionField) -> Option<f64> {
    sol.events.iter().filter(|e| e.label() == "merge").map(|e| e.t).next()
}

/// Merge time of `spec` continued past its horizon by `extra`, holding the
/// last control value; resolves merges that fall just after T.
pub fn merge_time_extended(spec: &ProblemSpec, y_grid: &[f64], dt: f64, extra: f64) -> Result<Option<f64>> {
    if !(extra >= 0.0) {
        return Err(Error::Domain(format!("extension must be non-negative, got {extra}")));
    }
    let mut longer = spec.clone();
    longer.control = spec.control.retimed(spec.horizon + extra)?;
    longer.horizon = spec.horizon + extra;
    longer.validate()?;
    let sol = build_on_fan(Fan::integrate(&longer, y_grid, dt)?)?;
    Ok(merge_time(&sol))
}
