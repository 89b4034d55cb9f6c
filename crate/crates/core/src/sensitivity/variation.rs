use serde::Serialize;

use super::linearized::{linearized_along_fan, Direction};
use super::shift::shock_shifts;
use crate::error::{Error, Result};
use crate::numerics::quadrature::gauss8;
use crate::optctl::{CostSpec, RunningMode};
use crate::shockfront::{EventKind, Snapshot, SolutionField};

/// dJ split into its running, smooth-terminal and shock-shift parts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FirstVariation {
    pub running: f64,
    pub smooth: f64,
    pub shocks: f64,
    pub total: f64,
    /// False when shocks meet within the clustering tolerance of the
    /// horizon, where the cost is not differentiable.
    pub reliable: bool,
}

/// First variation of J at the base control in the given direction.
pub fn cost_first_variation(base: &SolutionField, cost: &CostSpec, direction: Direction) -> Result<FirstVariation> {
    if cost.running_mode == RunningMode::SpaceTime {
        return Err(Error::Domain(
            "first variation is implemented for time-integral running costs only".into(),
        ));
    }
    let horizon = base.horizon();
    let running = match &direction {
        Direction::InitialBump { .. } => 0.0,
        Direction::Control(d) => running_variation(base, cost, d),
    };
    let activation = direction.activation();
    let lin = linearized_along_fan(base, direction)?;
    let snap = Snapshot::new(base, horizon)?;
    let (xa, xb) = cost.terminal_window;
    let smooth = snap.integrate_traces(xa, xb, |tr| {
        let (xi, v) = lin.at(horizon, tr.y);
        cost.terminal_du(tr.xi, tr.u) * (v * tr.theta - tr.q1 * xi)
    })?;

    let shifts = shock_shifts(&lin, activation)?;
    let mut shocks = 0.0;
    for &(id, x) in &snap.shocks {
        if !(x > xa && x < xb) {
            continue;
        }
        let Some(shift) = shifts.get(id).and_then(|s| s.as_ref()) else {
            continue;
        };
        let s = base.shock(id).samples.last().ok_or_else(|| {
            Error::solver("first variation", format!("shock {id} has no samples"))
        })?;
        let jump = (cost.terminal)(x, s.u_left) - (cost.terminal)(x, s.u_right);
        shocks += jump * shift.zeta_end();
    }
    let reliable = !base.events.iter().any(|e| {
        matches!(e.kind, EventKind::Merge { .. }) && (horizon - e.t).abs() < base.cluster_eps
    });
    Ok(FirstVariation {
        running,
        smooth,
        shocks,
        total: running + smooth + shocks,
        reliable,
    })
}

/// ∫ Σ_c ∂Φ/∂α_c · d_c dt on panels between the breakpoints of both signals.
fn running_variation(base: &SolutionField, cost: &CostSpec, d: &crate::models::ControlSignal) -> f64 {
    let control = &base.spec.control;
    let mut cuts: Vec<f64> = control
        .breakpoints()
        .iter()
        .chain(d.breakpoints())
        .copied()
        .filter(|&t| t <= base.horizon())
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let rule = gauss8();
    let mut total = 0.0;
    for w in cuts.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        for (t, wt) in rule.mapped(w[0], w[1]) {
            let alpha = control.eval_clamped(t);
            total += wt
                * d.eval_clamped(t)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(c, v)| cost.running_dalpha(t, alpha, c) * v)
                    .sum::<f64>();
        }
    }
    total
}
