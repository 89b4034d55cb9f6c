use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{compose2, Jet3, ProblemSpec};
use crate::numerics::TimeGrid;

/// Position, value and their y-derivatives up to third order along one
/// characteristic: θ = ξ_y, q_k = ∂_y^k v.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CharState {
    pub xi: f64,
    pub v: f64,
    pub theta: f64,
    pub q1: f64,
    pub theta_y: f64,
    pub q2: f64,
    pub theta_yy: f64,
    pub q3: f64,
}

impl CharState {
    /// [ξ, ξ_y, ξ_yy, ξ_yyy] as a jet in y.
    pub fn xi_jet(&self) -> Jet3 {
        Jet3([self.xi, self.theta, self.theta_y, self.theta_yy])
    }

    /// [v, v_y, v_yy, v_yyy] as a jet in y.
    pub fn v_jet(&self) -> Jet3 {
        Jet3([self.v, self.q1, self.q2, self.q3])
    }

    pub fn from_jets(xi: Jet3, v: Jet3) -> Self {
        CharState {
            xi: xi.0[0],
            theta: xi.0[1],
            theta_y: xi.0[2],
            theta_yy: xi.0[3],
            v: v.0[0],
            q1: v.0[1],
            q2: v.0[2],
            q3: v.0[3],
        }
    }

    fn axpy(&self, h: f64, k: &CharState) -> CharState {
        CharState {
            xi: self.xi + h * k.xi,
            v: self.v + h * k.v,
            theta: self.theta + h * k.theta,
            q1: self.q1 + h * k.q1,
            theta_y: self.theta_y + h * k.theta_y,
            q2: self.q2 + h * k.q2,
            theta_yy: self.theta_yy + h * k.theta_yy,
            q3: self.q3 + h * k.q3,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.xi_jet().is_finite() && self.v_jet().is_finite()
    }

    /// u_x = v_y / ξ_y, guarded against θ → 0.
    pub fn u_x(&self) -> f64 {
        guarded_ratio(self.q1, self.theta)
    }

    /// Cubic Taylor expansion in y about this state, shifted by d.
    pub fn shifted(&self, d: f64) -> CharState {
        let d2 = d * d / 2.0;
        let d3 = d * d * d / 6.0;
        CharState {
            xi: self.xi + self.theta * d + self.theta_y * d2 + self.theta_yy * d3,
            v: self.v + self.q1 * d + self.q2 * d2 + self.q3 * d3,
            theta: self.theta + self.theta_y * d + self.theta_yy * d2,
            q1: self.q1 + self.q2 * d + self.q3 * d2,
            theta_y: self.theta_y + self.theta_yy * d,
            q2: self.q2 + self.q3 * d,
            theta_yy: self.theta_yy,
            q3: self.q3,
        }
    }

    /// ξ of the cubic Taylor expansion shifted by d.
    pub fn xi_shifted(&self, d: f64) -> f64 {
        self.xi + d * (self.theta + d * (self.theta_y / 2.0 + d * self.theta_yy / 6.0))
    }
}

pub(crate) const THETA_GUARD: f64 = 1e-8;

pub(crate) fn guarded_ratio(num: f64, theta: f64) -> f64 {
    if theta.abs() < THETA_GUARD {
        num / THETA_GUARD.copysign(if theta == 0.0 { 1.0 } else { theta })
    } else {
        num / theta
    }
}

/// The characteristic vector field of a problem on a fixed time grid.
#[derive(Debug)]
pub struct Dynamics {
    spec: ProblemSpec,
    grid: TimeGrid,
    times: Arc<[f64]>,
    exact_higher: bool,
}

impl Dynamics {
    pub fn new(spec: &ProblemSpec, t_end: f64, dt: f64) -> Result<Arc<Self>> {
        let grid = TimeGrid::new(&spec.control, t_end, dt)?;
        let times: Arc<[f64]> = grid.times().into();
        Ok(Arc::new(Dynamics {
            spec: spec.clone(),
            grid,
            times,
            exact_higher: spec.flux.has_higher_derivatives()
                && spec.source.has_higher_derivatives(),
        }))
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn times(&self) -> &Arc<[f64]> {
        &self.times
    }

    pub fn t_end(&self) -> f64 {
        self.grid.t_end()
    }

    /// False when orders two and three fall back to finite differences.
    pub fn exact_higher(&self) -> bool {
        self.exact_higher
    }

    pub fn alpha_on_step(&self, k: usize) -> &[f64] {
        &self.spec.control.values()[self.grid.interval_of_step(k)]
    }

    pub fn initial_state(&self, y: f64) -> CharState {
        let [u, u1, u2, u3] = self.spec.initial.jet(y);
        CharState {
            xi: y,
            v: u,
            theta: 1.0,
            q1: u1,
            theta_y: 0.0,
            q2: u2,
            theta_yy: 0.0,
            q3: u3,
        }
    }

    pub fn rhs(&self, t: f64, alpha: &[f64], s: &CharState) -> CharState {
        let xi = s.xi_jet();
        let v = s.v_jet();
        let dxi = v.compose(self.spec.flux.speed_derivs(s.v));
        let p = self.spec.source.partials(t, s.xi, s.v, alpha);
        let dv = compose2(xi, v, &p);
        CharState::from_jets(dxi, dv)
    }

    pub fn rk4(&self, t: f64, h: f64, alpha: &[f64], s: &CharState) -> CharState {
        let k1 = self.rhs(t, alpha, s);
        let k2 = self.rhs(t + 0.5 * h, alpha, &s.axpy(0.5 * h, &k1));
        let k3 = self.rhs(t + 0.5 * h, alpha, &s.axpy(0.5 * h, &k2));
        let k4 = self.rhs(t + h, alpha, &s.axpy(h, &k3));
        let (a, b, c, d) = (k1.fields(), k2.fields(), k3.fields(), k4.fields());
        let mut f = s.fields();
        let w = h / 6.0;
        for i in 0..8 {
            f[i] += w * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]);
        }
        CharState::from_fields(f)
    }

    pub(crate) fn check(&self, s: &CharState, t: f64, y: f64) -> Result<()> {
        if s.is_finite() {
            Ok(())
        } else {
            Err(Error::solver(
                "characteristic integration",
                format!("non-finite state at t = {t} on the characteristic from y = {y}"),
            ))
        }
    }
}

impl CharState {
    fn fields(&self) -> [f64; 8] {
        [
            self.xi,
            self.v,
            self.theta,
            self.q1,
            self.theta_y,
            self.q2,
            self.theta_yy,
            self.q3,
        ]
    }

    fn from_fields(f: [f64; 8]) -> Self {
        CharState {
            xi: f[0],
            v: f[1],
            theta: f[2],
            q1: f[3],
            theta_y: f[4],
            q2: f[5],
            theta_yy: f[6],
            q3: f[7],
        }
    }
}
