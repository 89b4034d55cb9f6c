use serde::{Deserialize, Serialize};

use crate::characteristics::{linearized_on_steps, CharState};
use crate::error::{Error, Result};
use crate::models::{bump, ControlSignal};
use crate::shockfront::{FanSlice, SolutionField};

/// A perturbation direction for the first-order analysis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// Initial data ū + ε·amplitude·φ((x − center)/width), φ the standard bump.
    InitialBump { center: f64, width: f64, amplitude: f64 },
    /// Control α + ε·d(t); the breakpoints of d must be time-grid nodes of the base run.
    Control(ControlSignal),
}

impl Direction {
    /// The first time the direction acts.
    pub fn activation(&self) -> f64 {
        match self {
            Direction::InitialBump { .. } => 0.0,
            Direction::Control(d) => (0..d.intervals())
                .find(|&k| d.values()[k].iter().any(|&v| v != 0.0))
                .map_or(d.horizon(), |k| d.breakpoints()[k]),
        }
    }

    fn initial_v(&self, y: f64) -> f64 {
        match *self {
            Direction::InitialBump { center, width, amplitude } => amplitude * bump((y - center) / width),
            Direction::Control(_) => 0.0,
        }
    }
}

/// First-order perturbation (Ξ, V) of every fan characteristic, so that the
/// perturbed characteristic is (ξ + εΞ, v + εV) and the value perturbation at
/// fixed x is w = V − u_x Ξ.
pub struct LinearizedField<'a> {
    pub base: &'a SolutionField,
    pub direction: Direction,
    xi: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
    // direction value per time step
    step_dir: Vec<Vec<f64>>,
}

pub fn linearized_along_fan<'a>(base: &'a SolutionField, direction: Direction) -> Result<LinearizedField<'a>> {
    let dynamics = base.fan.dynamics();
    let grid = dynamics.grid();
    let times = grid.times();
    let steps = grid.steps();
    let channels = base.spec.control.dimension();
    let step_dir: Vec<Vec<f64>> = match &direction {
        Direction::InitialBump { width, .. } => {
            if !(*width > 0.0) {
                return Err(Error::Domain("bump width must be positive".into()));
            }
            vec![vec![0.0; channels]; steps]
        }
        Direction::Control(d) => {
            if d.dimension() != channels {
                return Err(Error::Domain(format!(
                    "direction has {} channels, the control has {channels}",
                    d.dimension()
                )));
            }
            if (d.horizon() - base.horizon()).abs() > 1e-12 * base.horizon().max(1.0) {
                return Err(Error::Domain("direction and base run have different horizons".into()));
            }
            if let Some(b) = d.breakpoints().iter().find(|&&b| grid.node_index(b).is_none()) {
                return Err(Error::Domain(format!(
                    "direction breakpoint {b} is not a node of the base time grid"
                )));
            }
            (0..steps)
                .map(|k| d.eval_clamped(0.5 * (times[k] + times[k + 1])).to_vec())
                .collect()
        }
    };
    let source = &base.spec.source;
    let forcing = |k: usize, t: f64, s: &CharState, alpha: &[f64]| -> f64 {
        step_dir[k]
            .iter()
            .enumerate()
            .filter(|(_, d)| **d != 0.0)
            .map(|(c, d)| source.dalpha(t, s.xi, s.v, alpha, c) * d)
            .sum()
    };
    let (mut xi, mut v) = (Vec::with_capacity(base.fan.len()), Vec::with_capacity(base.fan.len()));
    for traj in &base.fan.trajs {
        let (x, y) = linearized_on_steps(traj, (0.0, direction.initial_v(traj.y0)), forcing);
        xi.push(x);
        v.push(y);
    }
    Ok(LinearizedField {
        base,
        direction,
        xi,
        v,
        step_dir,
    })
}

impl<'a> LinearizedField<'a> {
    /// (Ξ, V) at grid node k of characteristic i.
    pub fn node(&self, i: usize, k: usize) -> (f64, f64) {
        (self.xi[i][k], self.v[i][k])
    }

    fn rate(&self, i: usize, k: usize, step: usize) -> (f64, f64) {
        let spec = &self.base.spec;
        let dynamics = self.base.fan.dynamics();
        let t = dynamics.times()[k];
        let s = self.base.fan.node(i, k);
        let alpha = dynamics.alpha_on_step(step);
        let (x, v) = self.node(i, k);
        let forcing: f64 = self.step_dir[step]
            .iter()
            .enumerate()
            .filter(|(_, d)| **d != 0.0)
            .map(|(c, d)| spec.source.dalpha(t, s.xi, s.v, alpha, c) * d)
            .sum();
        (
            spec.flux.d2(s.v) * v,
            spec.source.dx(t, s.xi, s.v, alpha) * x + spec.source.du(t, s.xi, s.v, alpha) * v + forcing,
        )
    }

    /// (Ξ, V) of characteristic i at time t, cubic Hermite between nodes.
    fn on_char(&self, i: usize, t: f64) -> (f64, f64) {
        let grid = self.base.fan.dynamics().grid();
        if let Some(k) = grid.node_index(t) {
            return self.node(i, k);
        }
        let k = grid.step_containing(t);
        let times = grid.times();
        let (t0, t1) = (times[k], times[k + 1]);
        let h = t1 - t0;
        let r = (t - t0) / h;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * r) * (1.0 - r) * (1.0 - r),
            r * (1.0 - r) * (1.0 - r),
            r * r * (3.0 - 2.0 * r),
            r * r * (r - 1.0),
        );
        let (a, b) = (self.node(i, k), self.node(i, k + 1));
        let (da, db) = (self.rate(i, k, k), self.rate(i, k + 1, k));
        (
            h00 * a.0 + h10 * h * da.0 + h01 * b.0 + h11 * h * db.0,
            h00 * a.1 + h10 * h * da.1 + h01 * b.1 + h11 * h * db.1,
        )
    }

    /// (Ξ, V) at (t, y): cubic Lagrange interpolation over the four nearest
    /// characteristics.
    pub fn at(&self, t: f64, y: f64) -> (f64, f64) {
        let ys = &self.base.fan.ys;
        let n = ys.len();
        let i = self.base.fan.floor_index(y).clamp(1, n - 3);
        let nodes = [i - 1, i, i + 1, i + 2];
        let (mut x, mut v) = (0.0, 0.0);
        for &a in &nodes {
            let mut l = 1.0;
            for &b in &nodes {
                if a != b {
                    l *= (y - ys[b]) / (ys[a] - ys[b]);
                }
            }
            let (xa, va) = self.on_char(a, t);
            x += l * xa;
            v += l * va;
        }
        (x, v)
    }

    /// w(t, ξ(t, y)) for the base generator y.
    pub fn w(&self, t: f64, y: f64) -> f64 {
        let tr = FanSlice::new(&self.base.fan, t).trace(y);
        let (x, v) = self.at(t, y);
        v - tr.ux() * x
    }

    /// w along fan characteristic i at its grid nodes, up to where it ends on a shock.
    pub fn w_series(&self, i: usize) -> Result<Vec<(f64, f64)>> {
        let traj = self
            .base
            .fan
            .trajs
            .get(i)
            .ok_or_else(|| Error::Domain(format!("no characteristic with index {i}")))?;
        let end = traj.terminated_at.unwrap_or(f64::INFINITY);
        Ok(traj
            .times
            .iter()
            .enumerate()
            .take_while(|(_, &t)| t <= end)
            .map(|(k, &t)| {
                let s = &traj.states[k];
                (t, self.v[i][k] - s.u_x() * self.xi[i][k])
            })
            .collect())
    }

    /// w at grid node k of characteristic i; an error past its termination.
    pub fn w_at_node(&self, i: usize, k: usize) -> Result<f64> {
        let traj = &self.base.fan.trajs[i];
        let t = traj.times[k];
        if traj.terminated_at.is_some_and(|end| t > end) {
            return Err(Error::Domain(format!(
                "characteristic {i} ended on a shock before t = {t}"
            )));
        }
        Ok(self.v[i][k] - traj.states[k].u_x() * self.xi[i][k])
    }
}
