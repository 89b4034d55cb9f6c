use std::cell::RefCell;
use std::collections::HashMap;

use crate::characteristics::{CharState, Fan};
use crate::error::{Error, Result};
use crate::numerics::Hermite7;

/// The fan at one time, with states off the time grid computed on demand.
pub(crate) struct FanSlice<'a> {
    pub fan: &'a Fan,
    pub t: f64,
    node: Option<usize>,
    cache: RefCell<HashMap<usize, CharState>>,
}

/// The smooth solution traced back to one generator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Trace {
    pub y: f64,
    pub xi: f64,
    pub u: f64,
    pub theta: f64,
    pub q1: f64,
}

impl Trace {
    pub fn ux(&self) -> f64 {
        crate::characteristics::guarded_ratio(self.q1, self.theta)
    }
}

/// ξ and v on one grid cell.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Cell {
    xi: Hermite7,
    v: Hermite7,
}

impl Cell {
    pub fn xi(&self, y: f64) -> f64 {
        self.xi.eval(y)
    }

    pub fn trace(&self, y: f64) -> Trace {
        let (xi, theta) = self.xi.eval_d(y);
        let (u, q1) = self.v.eval_d(y);
        Trace { y, xi, u, theta, q1 }
    }
}

const SUBDIVISIONS: usize = 32;

impl<'a> FanSlice<'a> {
    pub fn new(fan: &'a Fan, t: f64) -> Self {
        let grid = fan.dynamics().grid();
        FanSlice {
            fan,
            t,
            node: grid.node_index(t),
            cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn ys(&self) -> &[f64] {
        &self.fan.ys
    }

    pub fn state(&self, i: usize) -> CharState {
        if let Some(k) = self.node {
            return *self.fan.node(i, k);
        }
        *self
            .cache
            .borrow_mut()
            .entry(i)
            .or_insert_with(|| self.fan.state_at(i, self.t))
    }

    pub fn xi(&self, i: usize) -> f64 {
        self.state(i).xi
    }

    /// Interpolant on [ys[i], ys[i + 1]].
    pub fn cell(&self, i: usize) -> Cell {
        let ys = self.ys();
        let (a, b) = (self.state(i), self.state(i + 1));
        Cell {
            xi: Hermite7::new(ys[i], ys[i + 1], a.xi_jet().0, b.xi_jet().0),
            v: Hermite7::new(ys[i], ys[i + 1], a.v_jet().0, b.v_jet().0),
        }
    }

    /// Index of the cell containing y, clamped to the grid.
    pub fn cell_index(&self, y: f64) -> usize {
        self.fan.floor_index(y).min(self.fan.len() - 2)
    }

    pub fn trace(&self, y: f64) -> Trace {
        self.cell(self.cell_index(y)).trace(y)
    }

    /// Left face of a shock at x whose left generator was `y_prev`: the
    /// lowest crossing ξ(y) = x above the first grid characteristic left of x.
    pub fn left_face(&self, x: f64, y_prev: f64) -> Result<Trace> {
        let ys = self.ys();
        let mut i = self.fan.floor_index(y_prev);
        while self.xi(i) >= x {
            if i == 0 {
                return Err(coarse(x, self.t, "left"));
            }
            i -= 1;
        }
        let mut j = i;
        while j + 1 < ys.len() && ys[j] < y_prev {
            let cell = self.cell(j);
            let hi = ys[j + 1].min(y_prev);
            let f = |y: f64| cell.xi(y) - x;
            let lo = ys[j];
            let mut a = lo;
            let mut fa = f(a);
            for k in 1..=SUBDIVISIONS {
                let b = if k == SUBDIVISIONS { hi } else { lo + (hi - lo) * k as f64 / SUBDIVISIONS as f64 };
                let fb = f(b);
                if fa < 0.0 && fb >= 0.0 {
                    let y = refine(&cell, x, a, b);
                    return Ok(cell.trace(y));
                }
                a = b;
                fa = fb;
            }
            j += 1;
        }
        Ok(self.trace(y_prev))
    }

    /// Mirror image of [`left_face`](Self::left_face).
    pub fn right_face(&self, x: f64, y_prev: f64) -> Result<Trace> {
        let ys = self.ys();
        let n = ys.len();
        let mut i = self.fan.ceil_index(y_prev);
        while self.xi(i) <= x {
            if i + 1 == n {
                return Err(coarse(x, self.t, "right"));
            }
            i += 1;
        }
        let mut j = i;
        while j > 0 && ys[j] > y_prev {
            let cell = self.cell(j - 1);
            let lo = ys[j - 1].max(y_prev);
            let hi = ys[j];
            let f = |y: f64| cell.xi(y) - x;
            let mut b = hi;
            let mut fb = f(b);
            for k in 1..=SUBDIVISIONS {
                let a = if k == SUBDIVISIONS { lo } else { hi - (hi - lo) * k as f64 / SUBDIVISIONS as f64 };
                let fa = f(a);
                if fb > 0.0 && fa <= 0.0 {
                    let y = refine(&cell, x, a, b);
                    return Ok(cell.trace(y));
                }
                b = a;
                fb = fa;
            }
            j -= 1;
        }
        Ok(self.trace(y_prev))
    }

    /// Generator of x among the monotone characteristics in [ylo, yhi].
    pub fn invert(&self, x: f64, ylo: f64, yhi: f64) -> Result<Trace> {
        let ys = self.ys();
        let (tlo, thi) = (self.trace(ylo), self.trace(yhi));
        if x <= tlo.xi {
            return if x > tlo.xi - 1e-12 * (1.0 + x.abs()) { Ok(tlo) } else { Err(outside(x, self.t)) };
        }
        if x >= thi.xi {
            return if x < thi.xi + 1e-12 * (1.0 + x.abs()) { Ok(thi) } else { Err(outside(x, self.t)) };
        }
        // nodes strictly inside (ylo, yhi)
        let mut lo = self.fan.floor_index(ylo) + 1;
        let mut hi = self.fan.ceil_index(yhi);
        if ys[hi] >= yhi {
            hi = hi.saturating_sub(1);
        }
        let (mut a, mut b) = (ylo, yhi);
        if lo <= hi {
            // binary search for the last inside node with ξ < x
            if self.xi(lo) >= x {
                b = ys[lo];
            } else {
                while lo < hi {
                    let mid = (lo + hi).div_ceil(2);
                    if self.xi(mid) < x {
                        lo = mid;
                    } else {
                        hi = mid - 1;
                    }
                }
                a = ys[lo];
                if lo + 1 < ys.len() && ys[lo + 1] < yhi {
                    b = ys[lo + 1];
                }
            }
        }
        let cell = self.cell(self.cell_index(0.5 * (a + b)));
        Ok(cell.trace(refine(&cell, x, a, b)))
    }
}

/// Root of ξ(y) = x in [a, b] with a sign change, by safeguarded Newton.
fn refine(cell: &Cell, x: f64, mut a: f64, mut b: f64) -> f64 {
    let (fa, fb) = (cell.xi(a) - x, cell.xi(b) - x);
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    let increasing = fa < 0.0;
    let mut y = 0.5 * (a + b);
    for _ in 0..100 {
        let tr = cell.trace(y);
        let f = tr.xi - x;
        if f == 0.0 {
            return y;
        }
        if (f < 0.0) == increasing {
            a = y;
        } else {
            b = y;
        }
        let newton = y - f / tr.theta;
        let next = if tr.theta != 0.0 && newton > a.min(b) && newton < a.max(b) {
            newton
        } else {
            0.5 * (a + b)
        };
        if (next - y).abs() <= 4.0 * f64::EPSILON * y.abs().max(1.0) || (b - a).abs() <= 4.0 * f64::EPSILON * y.abs().max(1.0) {
            return next;
        }
        y = next;
    }
    y
}

fn coarse(x: f64, t: f64, side: &str) -> Error {
    Error::solver(
        "shock tracking",
        format!("{side} bracket of the shock at x = {x}, t = {t} ran off the characteristic grid"),
    )
}

fn outside(x: f64, t: f64) -> Error {
    Error::solver("profile inversion", format!("x = {x} at t = {t} is not covered by the fan"))
}
