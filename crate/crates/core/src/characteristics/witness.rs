
use serde::Serialize;

use super::state::CharState;
use super::trajectory::{integrate_characteristic, CharTrajectory};
use crate::error::Result;
use crate::models::ProblemSpec;

/// Forcing term s(t, state, α) for the linearized characteristic system.
pub type Forcing<'a> = &'a dyn Fn(f64, &CharState, &[f64]) -> f64;

/// Solves Ẋ = f″(v)·Y, Ẏ = g_x·X + g_u·Y + s along `traj` with RK4 on the
/// trajectory's own time grid. Returns X and Y at every node.
pub fn linearized_characteristic(
    traj: &CharTrajectory,
    init: (f64, f64),
    forcing: Option<Forcing<'_>>,
) -> (Vec<f64>, Vec<f64>) {
    linearized_on_steps(traj, init, |_, t, s, alpha| forcing.map_or(0.0, |f| f(t, s, alpha)))
}

/// As [`linearized_characteristic`], with the forcing told which time step it
/// is evaluated on, so that values at a step's end stay on that step's control.
pub(crate) fn linearized_on_steps(
    traj: &CharTrajectory,
    init: (f64, f64),
    forcing: impl Fn(usize, f64, &CharState, &[f64]) -> f64,
) -> (Vec<f64>, Vec<f64>) {
    let dynamics = traj.dynamics();
    let spec = dynamics.spec();
    let times = &traj.times;
    let n = times.len();
    let (mut xs, mut ys) = (Vec::with_capacity(n), Vec::with_capacity(n));
    let (mut x, mut y) = init;
    xs.push(x);
    ys.push(y);
    for k in 0..n - 1 {
        let (t0, t1) = (times[k], times[k + 1]);
        let h = t1 - t0;
        let alpha = dynamics.alpha_on_step(k);
        let coeffs = |t: f64, s: &CharState| {
            let a = spec.flux.d2(s.v);
            let b = spec.source.dx(t, s.xi, s.v, alpha);
            let c = spec.source.du(t, s.xi, s.v, alpha);
            (a, b, c, forcing(k, t, s, alpha))
        };
        let mid = dynamics.rk4(t0, 0.5 * h, alpha, &traj.states[k]);
        let c0 = coeffs(t0, &traj.states[k]);
        let cm = coeffs(t0 + 0.5 * h, &mid);
        let c1 = coeffs(t1, &traj.states[k + 1]);
        let f = |(a, b, c, s): (f64, f64, f64, f64), x: f64, y: f64| (a * y, b * x + c * y + s);
        let k1 = f(c0, x, y);
        let k2 = f(cm, x + 0.5 * h * k1.0, y + 0.5 * h * k1.1);
        let k3 = f(cm, x + 0.5 * h * k2.0, y + 0.5 * h * k2.1);
        let k4 = f(c1, x + h * k3.0, y + h * k3.1);
        x += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        y += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        xs.push(x);
        ys.push(y);
    }
    (xs, ys)
}

/// Certificate that θ and the λ-Jacobian determinant X̄³ do not vanish together at ȳ.
#[derive(Clone, Debug, Serialize)]
pub struct TransversalityWitness {
    pub ybar: f64,
    pub times: Vec<f64>,
    pub theta_series: Vec<f64>,
    pub xbar_series: Vec<f64>,
    pub ybar_series: Vec<f64>,
    /// min over samples of |θ(t, ȳ)| + |X̄(t)|³.
    pub margin: f64,
}

impl TransversalityWitness {
    pub fn margin_terms(&self) -> impl Iterator<Item = f64> + '_ {
        self.theta_series
            .iter()
            .zip(&self.xbar_series)
            .map(|(th, x)| th.abs() + x.abs().powi(3))
    }
}

pub fn transversality_witness(spec: &ProblemSpec, ybar: f64) -> Result<TransversalityWitness> {
    transversality_witness_with(spec, ybar, spec.default_dt())
}

pub fn transversality_witness_with(spec: &ProblemSpec, ybar: f64, dt: f64) -> Result<TransversalityWitness> {
    let traj = integrate_characteristic(spec, ybar, spec.horizon, dt)?;
    let (xbar, ybar_series) = linearized_characteristic(&traj, (0.0, 1.0), None);
    let theta_series: Vec<f64> = traj.states.iter().map(|s| s.theta).collect();
    let mut w = TransversalityWitness {
        ybar,
        times: traj.times.to_vec(),
        theta_series,
        xbar_series: xbar,
        ybar_series,
        margin: 0.0,
    };
    w.margin = w.margin_terms().fold(f64::INFINITY, f64::min);
    Ok(w)
}
