use std::sync::Arc;

use super::state::{CharState, Dynamics};
use crate::error::{Error, Result};
use crate::models::ProblemSpec;

/// Step in y for the finite-difference fallback of orders two and three.
const FD_STEP: f64 = 1e-3;

/// Time samples of one characteristic and its variational derivatives.
#[derive(Clone, Debug)]
pub struct CharTrajectory {
    pub y0: f64,
    pub times: Arc<[f64]>,
    pub states: Vec<CharState>,
    /// Time at which the characteristic impinged on a shock.
    pub terminated_at: Option<f64>,
    /// Shock that absorbed it.
    pub absorbed_by: Option<usize>,
    dynamics: Arc<Dynamics>,
}

impl CharTrajectory {
    pub fn dynamics(&self) -> &Arc<Dynamics> {
        &self.dynamics
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn last(&self) -> &CharState {
        self.states.last().unwrap()
    }

    /// State at an arbitrary time: a partial RK4 step from the preceding node.
    pub fn state_at(&self, t: f64) -> Result<CharState> {
        if !(t >= 0.0 && t <= self.t_end()) {
            return Err(Error::Domain(format!(
                "trajectory from y = {} evaluated at t = {t} outside [0, {}]",
                self.y0,
                self.t_end()
            )));
        }
        Ok(self.state_at_unchecked(t))
    }

    pub(crate) fn state_at_unchecked(&self, t: f64) -> CharState {
        state_between(&self.dynamics, &self.states, t)
    }

    /// True if the characteristic still carries the solution at time t.
    pub fn alive_at(&self, t: f64) -> bool {
        self.terminated_at.is_none_or(|s| t < s)
    }
}

pub(crate) fn state_between(dynamics: &Dynamics, states: &[CharState], t: f64) -> CharState {
    let grid = dynamics.grid();
    let k = grid.step_containing(t);
    let t0 = grid.times()[k];
    if t == t0 {
        return states[k];
    }
    if t == grid.times()[k + 1] {
        return states[k + 1];
    }
    dynamics.rk4(t0, t - t0, dynamics.alpha_on_step(k), &states[k])
}

fn integrate_raw(dynamics: &Dynamics, y: f64) -> Result<Vec<CharState>> {
    let times = dynamics.times();
    let mut states = Vec::with_capacity(times.len());
    let mut s = dynamics.initial_state(y);
    states.push(s);
    for k in 0..dynamics.grid().steps() {
        let t = times[k];
        s = dynamics.rk4(t, times[k + 1] - t, dynamics.alpha_on_step(k), &s);
        dynamics.check(&s, times[k + 1], y)?;
        states.push(s);
    }
    Ok(states)
}

/// Integrates one characteristic on an existing grid.
pub fn integrate_on(dynamics: &Arc<Dynamics>, y: f64) -> Result<CharTrajectory> {
    let mut states = integrate_raw(dynamics, y)?;
    if !dynamics.exact_higher() {
        // the first-order part is exact without higher derivatives; orders two
        // and three come from differences of neighbouring first-order solutions
        let h = FD_STEP;
        let up = integrate_raw(dynamics, y + h)?;
        let down = integrate_raw(dynamics, y - h)?;
        for ((s, a), b) in states.iter_mut().zip(&up).zip(&down) {
            s.theta_y = (a.theta - b.theta) / (2.0 * h);
            s.q2 = (a.q1 - b.q1) / (2.0 * h);
            s.theta_yy = (a.theta - 2.0 * s.theta + b.theta) / (h * h);
            s.q3 = (a.q1 - 2.0 * s.q1 + b.q1) / (h * h);
        }
    }
    Ok(CharTrajectory {
        y0: y,
        times: dynamics.times().clone(),
        states,
        terminated_at: None,
        absorbed_by: None,
        dynamics: dynamics.clone(),
    })
}

/// Integrates the characteristic from y with its variational system up to
/// third order on [0, t_end] with fixed step at most `dt`.
pub fn integrate_characteristic(
    spec: &ProblemSpec,
    y: f64,
    t_end: f64,
    dt: f64,
) -> Result<CharTrajectory> {
    if !(dt > 0.0 && dt <= t_end && t_end <= spec.horizon) {
        return Err(Error::Domain(format!(
            "need 0 < dt <= t_end <= horizon, got dt = {dt}, t_end = {t_end}, horizon = {}",
            spec.horizon
        )));
    }
    let dynamics = Dynamics::new(spec, t_end, dt)?;
    integrate_on(&dynamics, y)
}

/// Characteristics from an ordered y-grid, all on one time grid.
#[derive(Clone, Debug)]
pub struct Fan {
    dynamics: Arc<Dynamics>,
    pub ys: Vec<f64>,
    pub trajs: Vec<CharTrajectory>,
}

impl Fan {
    pub fn integrate(spec: &ProblemSpec, ys: &[f64], dt: f64) -> Result<Fan> {
        Self::integrate_to(spec, ys, spec.horizon, dt)
    }

    pub fn integrate_to(spec: &ProblemSpec, ys: &[f64], t_end: f64, dt: f64) -> Result<Fan> {
        if ys.len() < 2 || ys.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Domain("y-grid must have at least two increasing points".into()));
        }
        if !(dt > 0.0 && dt <= t_end && t_end <= spec.horizon * (1.0 + 1e-12)) {
            return Err(Error::Domain(format!(
                "need 0 < dt <= t_end <= horizon, got dt = {dt}, t_end = {t_end}"
            )));
        }
        let dynamics = Dynamics::new(spec, t_end, dt)?;
        let trajs = ys
            .iter()
            .map(|&y| integrate_on(&dynamics, y))
            .collect::<Result<Vec<_>>>()?;
        Ok(Fan {
            dynamics,
            ys: ys.to_vec(),
            trajs,
        })
    }

    pub fn dynamics(&self) -> &Arc<Dynamics> {
        &self.dynamics
    }

    pub fn spec(&self) -> &ProblemSpec {
        self.dynamics.spec()
    }

    pub fn times(&self) -> &[f64] {
        self.dynamics.times()
    }

    pub fn len(&self) -> usize {
        self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ys.is_empty()
    }

    pub fn node(&self, i: usize, k: usize) -> &CharState {
        &self.trajs[i].states[k]
    }

    pub fn state_at(&self, i: usize, t: f64) -> CharState {
        self.trajs[i].state_at_unchecked(t)
    }

    /// Index of the last grid point at or below y (clamped to the grid).
    pub fn floor_index(&self, y: f64) -> usize {
        self.ys.partition_point(|&s| s <= y).saturating_sub(1)
    }

    /// Index of the first grid point at or above y (clamped to the grid).
    pub fn ceil_index(&self, y: f64) -> usize {
        self.ys.partition_point(|&s| s < y).min(self.len() - 1)
    }
}

/// `n` equally spaced points on [a, b]; exactly mirror-symmetric when a = −b.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let mut ys: Vec<f64> = (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect();
    ys[n - 1] = b;
    if a == -b {
        for i in 0..n / 2 {
            ys[n - 1 - i] = -ys[i];
        }
        if n % 2 == 1 {
            ys[n / 2] = 0.0;
        }
    }
    ys
}

/// Grid over the characteristic span of `spec` with spacing close to `spacing`.
pub fn grid_with_spacing(spec: &ProblemSpec, spacing: f64) -> Vec<f64> {
    let (a, b) = spec.characteristic_span();
    let n = (((b - a) / spacing).ceil() as usize).max(2) + 1;
    // odd count keeps y = 0 on symmetric spans
    let n = if n.is_multiple_of(2) { n + 1 } else { n };
    uniform_grid(a, b, n)
}

/// Default fan grid: the characteristic span with about 1000 cells.
pub fn default_y_grid(spec: &ProblemSpec) -> Vec<f64> {
    let (a, b) = spec.characteristic_span();
    grid_with_spacing(spec, 1e-3 * (b - a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{burgers_sine, constant_data, ControlSignal, SourceModel};
    use std::f64::consts::PI;

    #[test]
    fn burgers_sine_closed_form() {
        let spec = burgers_sine(1.0).unwrap();
        let tr = integrate_characteristic(&spec, PI, 1.0, 1e-3).unwrap();
        for (t, s) in tr.times.iter().zip(&tr.states) {
            assert!((s.xi - (PI - PI * t)).abs() < 1e-12);
            assert!((s.v + PI).abs() < 1e-12);
            assert!((s.theta - (1.0 - 2.0 * t)).abs() < 1e-12);
        }
        let mid = tr.state_at(0.12345).unwrap();
        assert!((mid.theta - (1.0 - 2.0 * 0.12345)).abs() < 1e-12);
        assert!(tr.state_at(1.5).is_err());
    }

    #[test]
    fn constant_data_translates() {
        let spec = constant_data(0.7, 1.0).unwrap();
        let tr = integrate_characteristic(&spec, 0.3, 1.0, 0.01).unwrap();
        let s = tr.last();
        assert!((s.v - 0.7).abs() < 1e-14 && (s.theta - 1.0).abs() < 1e-14 && s.q1 == 0.0);
        assert!((s.xi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn odd_fixed_point_under_eta_source() {
        let mut spec = burgers_sine(1.0).unwrap();
        spec.source = SourceModel::eta_times_control();
        spec.control = ControlSignal::constant(1.0, 1.0).unwrap();
        let tr = integrate_characteristic(&spec, 0.0, 1.0, 1e-3).unwrap();
        assert!(tr.states.iter().all(|s| s.xi == 0.0 && s.v == 0.0));
    }

    #[test]
    fn mirrored_characteristics_are_exact_negatives() {
        let mut spec = burgers_sine(1.0).unwrap();
        spec.source = SourceModel::eta_times_control();
        spec.control = ControlSignal::uniform(1.0, &[0.3, -0.2, 0.5]).unwrap();
        let a = integrate_characteristic(&spec, 2.1, 1.0, 1e-2).unwrap();
        let b = integrate_characteristic(&spec, -2.1, 1.0, 1e-2).unwrap();
        for (p, m) in a.states.iter().zip(&b.states) {
            assert_eq!(p.xi, -m.xi);
            assert_eq!(p.v, -m.v);
            assert_eq!(p.theta, m.theta);
            assert_eq!(p.theta_y, -m.theta_y);
            assert_eq!(p.q2, -m.q2);
            assert_eq!(p.q3, m.q3);
        }
    }

    #[test]
    fn symmetric_grid() {
        let g = uniform_grid(-3.0, 3.0, 11);
        for i in 0..11 {
            assert_eq!(g[i], -g[10 - i]);
        }
        assert_eq!(g[5], 0.0);
    }
}
