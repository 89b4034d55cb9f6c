use serde::Serialize;

use super::slice::{FanSlice, Trace};
use super::tracker::SolutionField;
use crate::error::{Error, Result};
use crate::numerics::quadrature::gauss8;

/// A maximal run of surviving characteristics between two shocks.
#[derive(Clone, Copy, Debug)]
struct Piece {
    ylo: f64,
    yhi: f64,
    xlo: f64,
    xhi: f64,
}

/// The solution at one time: shock positions and the smooth pieces between them.
pub struct Snapshot<'a> {
    slice: FanSlice<'a>,
    pieces: Vec<Piece>,
    /// (shock id, position) sorted by position.
    pub shocks: Vec<(usize, f64)>,
}

impl<'a> Snapshot<'a> {
    pub fn new(sol: &'a SolutionField, t: f64) -> Result<Self> {
        let horizon = sol.horizon();
        if !(t >= 0.0 && t <= horizon) {
            return Err(Error::Domain(format!("time {t} outside [0, {horizon}]")));
        }
        let slice = FanSlice::new(&sol.fan, t);
        let ys = &sol.fan.ys;
        let mut faces: Vec<(usize, f64, Trace, Trace)> = Vec::new();
        for s in sol.shocks.iter().filter(|s| s.alive_at(t)) {
            let (Some(x), Some(before)) = (s.position_at(t), s.sample_before(t)) else {
                continue;
            };
            let left = slice.left_face(x, before.y_left)?;
            let right = slice.right_face(x, before.y_right)?;
            faces.push((s.id, x, left, right));
        }
        faces.sort_by(|a, b| a.1.total_cmp(&b.1));
        let first = slice.trace(ys[0]);
        let last = slice.trace(ys[ys.len() - 1]);
        let mut pieces = Vec::with_capacity(faces.len() + 1);
        let (mut ylo, mut xlo) = (first.y, first.xi);
        for (_, x, l, r) in &faces {
            pieces.push(Piece {
                ylo,
                yhi: l.y,
                xlo,
                xhi: *x,
            });
            ylo = r.y;
            xlo = *x;
        }
        pieces.push(Piece {
            ylo,
            yhi: last.y,
            xlo,
            xhi: last.xi,
        });
        Ok(Snapshot {
            slice,
            pieces,
            shocks: faces.iter().map(|f| (f.0, f.1)).collect(),
        })
    }

    pub fn t(&self) -> f64 {
        self.slice.t
    }

    /// Covered x-range.
    pub fn extent(&self) -> (f64, f64) {
        (self.pieces[0].xlo, self.pieces[self.pieces.len() - 1].xhi)
    }

    /// Points within rounding distance of the fan edge are moved onto it.
    fn locate(&self, x: f64) -> Result<(f64, &Piece)> {
        let (lo, hi) = self.extent();
        let tol = 1e-10 * lo.abs().max(hi.abs()).max(1.0);
        let x = if x < lo && x >= lo - tol {
            lo
        } else if x > hi && x <= hi + tol {
            hi
        } else {
            x
        };
        if x < lo || x > hi {
            return Err(Error::solver(
                "profile inversion",
                format!("x = {x} at t = {} lies outside the fan [{lo}, {hi}]", self.t()),
            ));
        }
        let k = self.shocks.partition_point(|s| s.1 < x);
        Ok((x, &self.pieces[k]))
    }

    /// The generator trace of x; at a shock position the left state.
    pub(crate) fn trace(&self, x: f64) -> Result<Trace> {
        let (x, p) = self.locate(x)?;
        self.slice.invert(x, p.ylo, p.yhi)
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        Ok(self.trace(x)?.u)
    }

    /// ∫ F(x, u(t, x)) dx over [a, b], integrating in generator coordinates
    /// on each smooth piece with 8-point Gauss panels between grid characteristics.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64, f64) -> f64) -> Result<f64> {
        self.integrate_traces(a, b, |tr| f(tr.xi, tr.u) * tr.theta)
    }

    /// ∫ F(trace(y)) dy over the generators of [a, b].
    pub(crate) fn integrate_traces(&self, a: f64, b: f64, mut f: impl FnMut(&Trace) -> f64) -> Result<f64> {
        if a > b {
            return Ok(-self.integrate_traces(b, a, f)?);
        }
        let (lo, hi) = self.extent();
        if a < lo || b > hi {
            return Err(Error::solver(
                "profile quadrature",
                format!("window [{a}, {b}] at t = {} exceeds the fan [{lo}, {hi}]", self.t()),
            ));
        }
        let ys = self.slice.ys();
        let rule = gauss8();
        let mut total = 0.0;
        for p in &self.pieces {
            let (xa, xb) = (a.max(p.xlo), b.min(p.xhi));
            if xa >= xb {
                continue;
            }
            let ya = if xa == p.xlo { p.ylo } else { self.slice.invert(xa, p.ylo, p.yhi)?.y };
            let yb = if xb == p.xhi { p.yhi } else { self.slice.invert(xb, p.ylo, p.yhi)?.y };
            let mut j = self.slice.cell_index(ya);
            loop {
                let (c0, c1) = (ys[j].max(ya), ys[j + 1].min(yb));
                if c1 > c0 {
                    let cell = self.slice.cell(j);
                    total += rule.integrate(c0, c1, |y| f(&cell.trace(y)));
                }
                if ys[j + 1] >= yb || j + 2 >= ys.len() {
                    break;
                }
                j += 1;
            }
        }
        Ok(total)
    }
}

/// Values of the solution at one time.
#[derive(Clone, Debug, Serialize)]
pub struct Profile {
    pub t: f64,
    pub points: Vec<(f64, f64)>,
    /// (shock id, position) at time t.
    pub shocks: Vec<(usize, f64)>,
}

/// u(t, x) on a grid by inverting ξ(t, ·) among surviving characteristics.
pub fn sample_profile(sol: &SolutionField, t: f64, x_grid: &[f64]) -> Result<Profile> {
    let snap = Snapshot::new(sol, t)?;
    let points = x_grid
        .iter()
        .map(|&x| snap.value(x).map(|u| (x, u)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Profile {
        t,
        points,
        shocks: snap.shocks.clone(),
    })
}
