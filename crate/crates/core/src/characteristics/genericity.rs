use serde::Serialize;

use super::trajectory::Fan;
use crate::error::{Error, Result};
use crate::models::ProblemSpec;

pub const VIOLATION_TOL: f64 = 1e-6;

/// A grid cell [t_i, t_{i+1}] × [y_j, y_{j+1}] where θ, θ_y and θ_yy may vanish together.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub t: (f64, f64),
    pub y: (f64, f64),
    /// Smallest max(|θ|, |θ_y|, |θ_yy|) over the cell corners.
    pub level: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GenericityReport {
    pub k: f64,
    /// min over grid nodes of max(|θ|, |θ_y|, |θ_yy|).
    pub min_level: f64,
    pub argmin: (f64, f64),
    pub violations: Vec<Violation>,
    pub t_nodes: usize,
    pub y_nodes: usize,
    pub max_dt: f64,
    pub max_dy: f64,
}

fn max_gap(v: &[f64]) -> f64 {
    v.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}

/// Scans (θ, θ_y, θ_yy) on a tensor grid over [0, T] × [−k, k].
///
/// A cell is reported when some corner has all three below the tolerance,
/// or when each of the three takes both signs (or vanishes) at its corners.
/// The result is a statement at grid resolution only.
pub fn genericity_scan(spec: &ProblemSpec, k: f64, t_grid: &[f64], y_grid: &[f64]) -> Result<GenericityReport> {
    genericity_scan_with(spec, k, t_grid, y_grid, spec.default_dt())
}

pub fn genericity_scan_with(
    spec: &ProblemSpec,
    k: f64,
    t_grid: &[f64],
    y_grid: &[f64],
    dt: f64,
) -> Result<GenericityReport> {
    let sorted = |v: &[f64]| v.len() >= 2 && v.windows(2).all(|w| w[0] < w[1]);
    if !sorted(t_grid) || !sorted(y_grid) {
        return Err(Error::Domain("scan grids must be increasing with at least two nodes".into()));
    }
    if t_grid[0] < 0.0 || *t_grid.last().unwrap() > spec.horizon {
        return Err(Error::Domain("time grid must lie in [0, T]".into()));
    }
    if y_grid[0] > -k || *y_grid.last().unwrap() < k {
        return Err(Error::Domain(format!("y-grid does not cover [-{k}, {k}]")));
    }
    let ys: Vec<f64> = y_grid.iter().copied().filter(|y| y.abs() <= k).collect();
    let fan = Fan::integrate(spec, &ys, dt)?;
    // values[j][i] = (θ, θ_y, θ_yy) at (t_i, y_j)
    let values: Vec<Vec<[f64; 3]>> = fan
        .trajs
        .iter()
        .map(|tr| {
            t_grid
                .iter()
                .map(|&t| {
                    let s = tr.state_at_unchecked(t);
                    [s.theta, s.theta_y, s.theta_yy]
                })
                .collect()
        })
        .collect();
    let level = |v: &[f64; 3]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut min_level = f64::INFINITY;
    let mut argmin = (0.0, 0.0);
    for (j, row) in values.iter().enumerate() {
        for (i, v) in row.iter().enumerate() {
            let l = level(v);
            if l < min_level {
                min_level = l;
                argmin = (t_grid[i], ys[j]);
            }
        }
    }
    let mut violations = Vec::new();
    for j in 0..ys.len() - 1 {
        for i in 0..t_grid.len() - 1 {
            let corners = [values[j][i], values[j][i + 1], values[j + 1][i], values[j + 1][i + 1]];
            let cell_level = corners.iter().map(level).fold(f64::INFINITY, f64::min);
            let all_small = cell_level < VIOLATION_TOL;
            let straddles = (0..3).all(|c| {
                let lo = corners.iter().map(|v| v[c]).fold(f64::INFINITY, f64::min);
                let hi = corners.iter().map(|v| v[c]).fold(f64::NEG_INFINITY, f64::max);
                lo <= 0.0 && hi >= 0.0
            });
            if all_small || straddles {
                violations.push(Violation {
                    t: (t_grid[i], t_grid[i + 1]),
                    y: (ys[j], ys[j + 1]),
                    level: cell_level,
                });
            }
        }
    }
    Ok(GenericityReport {
        k,
        min_level,
        argmin,
        violations,
        t_nodes: t_grid.len(),
        y_nodes: ys.len(),
        max_dt: max_gap(t_grid),
        max_dy: max_gap(&ys),
    })
}
