//! CSV and JSON output. Floats are written with 17 significant digits so
//! that files round-trip exactly.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::characteristics::{BlowupMap, GenericityReport};
use crate::error::Result;
use crate::optctl::OptimizationResult;
use crate::sensitivity::ShockShift;
use crate::shockfront::{EventKind, Profile, SolutionField};

pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn ids(v: &[usize]) -> String {
    v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(";")
}

/// Writes `header` and `rows` as CSV.
pub fn write_table<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, value)?;
    writeln!(f)?;
    f.flush()?;
    Ok(())
}

/// One row per tracked sample of every shock.
pub fn write_shocks(path: &Path, sol: &SolutionField) -> Result<()> {
    let rows = sol.shocks.iter().flat_map(|s| {
        s.samples.iter().map(move |p| {
            vec![
                s.id.to_string(),
                num(p.t),
                num(p.x),
                num(p.u_left),
                num(p.u_right),
                num(p.speed),
                num(p.strength()),
            ]
        })
    });
    write_table(path, &["shock_id", "t", "x", "u_left", "u_right", "speed", "strength"], rows)
}

pub fn write_events(path: &Path, sol: &SolutionField) -> Result<()> {
    let rows = sol.events.iter().map(|e| {
        let (shocks, output) = match &e.kind {
            EventKind::Formation { shock, .. } => (shock.to_string(), String::new()),
            EventKind::Merge { inputs, output } => (ids(inputs), output.map(|o| o.to_string()).unwrap_or_default()),
        };
        vec![num(e.t), num(e.x), e.label().to_string(), shocks, output]
    });
    write_table(path, &["t", "x", "kind", "shocks", "output"], rows)
}

pub fn write_singular_points(path: &Path, sol: &SolutionField) -> Result<()> {
    let rows = sol.singular_points.iter().map(|p| {
        vec![
            num(p.t),
            num(p.x),
            p.m.to_string(),
            p.n.to_string(),
            p.terminal.to_string(),
            p.index.to_string(),
        ]
    });
    write_table(path, &["t", "x", "m", "n", "terminal", "index"], rows)
}

pub fn write_profile(path: &Path, profiles: &[Profile]) -> Result<()> {
    let rows = profiles
        .iter()
        .flat_map(|p| p.points.iter().map(move |&(x, u)| vec![num(p.t), num(x), num(u)]));
    write_table(path, &["t", "x", "u"], rows)
}

pub fn write_blowup_map(path: &Path, map: &BlowupMap) -> Result<()> {
    let rows = map.grid.iter().zip(&map.t_of_y).map(|(&y, &t)| vec![num(y), opt(t)]);
    write_table(path, &["y", "T_of_y"], rows)
}

pub fn write_seeds(path: &Path, map: &BlowupMap) -> Result<()> {
    let rows = map.seeds.iter().map(|s| {
        vec![num(s.y), num(s.tau), num(s.x), s.generic.to_string(), s.in_horizon.to_string()]
    });
    write_table(path, &["y", "tau", "x", "generic", "in_horizon"], rows)
}

pub fn write_violations(path: &Path, report: &GenericityReport) -> Result<()> {
    let rows = report
        .violations
        .iter()
        .map(|v| vec![num(v.t.0), num(v.t.1), num(v.y.0), num(v.y.1), num(v.level)]);
    write_table(path, &["t_lo", "t_hi", "y_lo", "y_hi", "level"], rows)
}

pub fn write_shifts(path: &Path, shifts: &[ShockShift]) -> Result<()> {
    let rows = shifts.iter().flat_map(|s| {
        s.samples
            .iter()
            .map(move |p| vec![num(p.t), s.shock_id.to_string(), num(p.zeta), num(p.w_left), num(p.w_right)])
    });
    write_table(path, &["t", "shock_id", "zeta", "wL", "wR"], rows)
}

pub fn write_cost_history(path: &Path, result: &OptimizationResult) -> Result<()> {
    let rows = result.j_history.iter().enumerate().map(|(k, &j)| {
        vec![k.to_string(), num(j), opt(result.grad_norm_history.get(k).copied())]
    });
    write_table(path, &["iteration", "J", "grad_norm"], rows)
}

pub fn write_alpha(path: &Path, result: &OptimizationResult) -> Result<()> {
    let a = &result.alpha_star;
    let bps = a.breakpoints();
    let rows = a.values().iter().enumerate().flat_map(|(k, v)| {
        v.iter().enumerate().map(move |(c, &val)| {
            vec![k.to_string(), c.to_string(), num(bps[k]), num(bps[k + 1]), num(val)]
        })
    });
    write_table(path, &["interval", "channel", "t_start", "t_end", "value"], rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, std::f64::consts::PI, -1e-300, 123456789.12345679, 5e-324] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(num(0.5), "5.0000000000000000e-1");
    }
}
