use std::sync::Arc;

use serde::Serialize;

use super::state::Dynamics;
use super::trajectory::{integrate_on, CharTrajectory, Fan};
use crate::error::{Error, Result};
use crate::models::ProblemSpec;

pub const ROOT_TOL: f64 = 1e-10;
const NEWTON_MAX: usize = 50;

pub const GENERIC_THETA_TOL: f64 = 1e-8;
pub const GENERIC_THETA_Y_TOL: f64 = 1e-6;
pub const GENERIC_THETA_YY_MIN: f64 = 1e-6;

/// First root of θ(·, y), bracketed between samples and polished by
/// safeguarded Newton with ∂_t θ = f″(v) v_y.
pub fn blowup_time(traj: &CharTrajectory) -> Result<Option<f64>> {
    let k = match traj.states.windows(2).position(|w| w[0].theta > 0.0 && w[1].theta <= 0.0) {
        Some(k) => k,
        None => return Ok(None),
    };
    let (mut lo, mut hi) = (traj.times[k], traj.times[k + 1]);
    if traj.states[k + 1].theta == 0.0 {
        return Ok(Some(hi));
    }
    let dynamics = traj.dynamics();
    let flux = &dynamics.spec().flux;
    let mut t = lo - traj.states[k].theta * (hi - lo) / (traj.states[k + 1].theta - traj.states[k].theta);
    for _ in 0..NEWTON_MAX {
        let s = traj.state_at_unchecked(t);
        if s.theta.abs() < ROOT_TOL {
            return Ok(Some(t));
        }
        if s.theta > 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let slope = flux.d2(s.v) * s.q1;
        let newton = t - s.theta / slope;
        t = if slope != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < 1e-15 * hi.max(1.0) {
            let s = traj.state_at_unchecked(t);
            if s.theta.abs() < ROOT_TOL {
                return Ok(Some(t));
            }
            break;
        }
    }
    Err(Error::solver(
        "blow-up time",
        format!("Newton did not reach |theta| < {ROOT_TOL} within {NEWTON_MAX} iterations at y = {}", traj.y0),
    ))
}

/// A local minimum of the blow-up map: a shock is born at (tau, x).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Seed {
    pub y: f64,
    pub tau: f64,
    pub x: f64,
    /// θ = θ_y = 0 and θ_yy > 0 at the seed.
    pub generic: bool,
    pub in_horizon: bool,
}

#[derive(Clone, Debug)]
pub struct BlowupMap {
    pub grid: Vec<f64>,
    pub t_of_y: Vec<Option<f64>>,
    pub seeds: Vec<Seed>,
}

pub fn blowup_map(spec: &ProblemSpec, y_grid: &[f64]) -> Result<BlowupMap> {
    blowup_map_with(spec, y_grid, spec.default_dt())
}

pub fn blowup_map_with(spec: &ProblemSpec, y_grid: &[f64], dt: f64) -> Result<BlowupMap> {
    let fan = Fan::integrate(spec, y_grid, dt)?;
    blowup_map_of_fan(&fan)
}

/// Blow-up times on the fan's grid and refined seeds at its strict interior minima.
pub fn blowup_map_of_fan(fan: &Fan) -> Result<BlowupMap> {
    let t_of_y = fan
        .trajs
        .iter()
        .map(blowup_time)
        .collect::<Result<Vec<_>>>()?;
    let val = |i: usize| t_of_y[i].unwrap_or(f64::INFINITY);
    // a minimum straddled symmetrically by two nodes shows up as a tie
    let tie = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
    let mut seeds = Vec::new();
    let n = fan.len();
    for i in 1..n.saturating_sub(1) {
        let Some(ti) = t_of_y[i] else { continue };
        if !(ti < val(i - 1)) || tie(ti, val(i - 1)) {
            continue;
        }
        let strict = ti < val(i + 1) && !tie(ti, val(i + 1));
        let plateau = i + 2 < n && tie(ti, val(i + 1)) && ti < val(i + 2) && !tie(ti, val(i + 2));
        if strict || plateau {
            seeds.push(refine_seed(fan, i)?);
        }
    }
    Ok(BlowupMap {
        grid: fan.ys.clone(),
        t_of_y,
        seeds,
    })
}

fn refine_seed(fan: &Fan, i: usize) -> Result<Seed> {
    let ys = &fan.ys;
    let t0 = fan_t(fan, i)?;
    let (tm, tp) = (fan_t(fan, i - 1).ok(), fan_t(fan, i + 1).ok());
    let (hl, hr) = (ys[i] - ys[i - 1], ys[i + 1] - ys[i]);
    let (mut y_fit, mut t_fit) = (ys[i], t0);
    if let (Some(tm), Some(tp)) = (tm, tp) {
        let (a, b) = (tm - t0, tp - t0);
        // vertex of the parabola through the three samples, written so that
        // mirrored inputs give exactly mirrored output
        let num = hr * hr * a - hl * hl * b;
        let den = 2.0 * (hr * a + hl * b);
        if den > 0.0 {
            let d = num / den;
            if d > -hl && d < hr {
                y_fit = ys[i] + d;
                let c2 = (a / hl + b / hr) / (hl + hr);
                let c1 = b / hr - c2 * hr;
                t_fit = t0 - c1 * c1 / (4.0 * c2);
            }
        }
    }
    let dynamics = fan.dynamics();
    let polished = polish(dynamics, y_fit, t_fit, ys[i - 1], ys[i + 1])?;
    let (y, tau) = match polished {
        Some(p) => p,
        None => {
            let tr = integrate_on(dynamics, y_fit)?;
            (y_fit, blowup_time(&tr)?.unwrap_or(t0))
        }
    };
    let tr = integrate_on(dynamics, y)?;
    let in_horizon = tau <= dynamics.t_end();
    let s = tr.state_at_unchecked(tau.min(dynamics.t_end()));
    let generic = s.theta.abs() < GENERIC_THETA_TOL
        && s.theta_y.abs() < GENERIC_THETA_Y_TOL
        && s.theta_yy > GENERIC_THETA_YY_MIN;
    Ok(Seed {
        y,
        tau,
        x: s.xi,
        generic,
        in_horizon,
    })
}

fn fan_t(fan: &Fan, i: usize) -> Result<f64> {
    blowup_time(&fan.trajs[i])?.ok_or_else(|| Error::solver("seed refinement", "missing blow-up time"))
}

/// Newton on (θ, θ_y)(t, y) = 0 from the fitted vertex; `None` if it leaves
/// the bracket or stalls.
fn polish(dynamics: &Arc<Dynamics>, y0: f64, t0: f64, ylo: f64, yhi: f64) -> Result<Option<(f64, f64)>> {
    let (mut y, mut t) = (y0, t0);
    let t_end = dynamics.t_end();
    for _ in 0..30 {
        if !(t > 0.0 && t <= t_end) || !(y > ylo && y < yhi) {
            return Ok(None);
        }
        let tr = integrate_on(dynamics, y)?;
        let s = tr.state_at_unchecked(t);
        let alpha = dynamics.alpha_on_step(dynamics.grid().step_containing(t));
        let ds = dynamics.rhs(t, alpha, &s);
        let (j00, j01, j10, j11) = (ds.theta, s.theta_y, ds.theta_y, s.theta_yy);
        let det = j00 * j11 - j01 * j10;
        if det == 0.0 || !det.is_finite() {
            return Ok(None);
        }
        let dt = (s.theta * j11 - s.theta_y * j01) / det;
        let dy = (j00 * s.theta_y - j10 * s.theta) / det;
        t -= dt;
        y -= dy;
        if dt.abs() < 1e-13 && dy.abs() < 1e-12 {
            return Ok((t > 0.0 && t <= t_end && y > ylo && y < yhi).then_some((y, t)));
        }
    }
    Ok(None)
}
