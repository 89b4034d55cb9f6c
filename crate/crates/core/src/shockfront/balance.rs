use serde::Serialize;

use super::snapshot::Snapshot;
use super::tracker::{ShockCurve, SolutionField};
use crate::error::{Error, Result};
use crate::numerics::quadrature::gauss8;

const PANEL: f64 = 0.02;

#[derive(Clone, Debug, Serialize)]
pub struct BalanceReport {
    pub a: f64,
    pub b: f64,
    pub t0: f64,
    pub t1: f64,
    /// ∫ u(t1) − ∫ u(t0) over [a, b].
    pub mass_change: f64,
    /// ∫ f(u(t, a)) − f(u(t, b)) dt.
    pub boundary_flux: f64,
    /// ∫∫ g dx dt.
    pub source: f64,
    pub residual: f64,
    /// Set when an endpoint sat on a shock and was moved by one grid cell.
    pub adjusted: Option<String>,
}

/// Residual of the integral balance of u over [a, b] × [t0, t1]; time is
/// split where shocks cross a or b, at control breakpoints and at shock
/// births and merges.
pub fn weak_balance_residual(sol: &SolutionField, a: f64, b: f64, t0: f64, t1: f64) -> Result<BalanceReport> {
    let horizon = sol.horizon();
    if !(a < b) {
        return Err(Error::Domain(format!("need a < b, got [{a}, {b}]")));
    }
    if !(0.0 <= t0 && t0 < t1 && t1 <= horizon) {
        return Err(Error::Domain(format!("need 0 <= t0 < t1 <= {horizon}, got [{t0}, {t1}]")));
    }
    let cell = sol.fan.ys[1] - sol.fan.ys[0];
    let mut notes = Vec::new();
    let mut ends = [a, b];
    for (end, name) in ends.iter_mut().zip(["a", "b"]) {
        let on_shock = |x: f64| {
            [t0, t1].iter().any(|&t| sol.shocks_at(t).iter().any(|s| (s.1 - x).abs() < 1e-9))
        };
        if on_shock(*end) {
            let moved = if name == "a" { *end - cell } else { *end + cell };
            notes.push(format!("{name} moved from {} to {moved}", *end));
            *end = moved;
        }
    }
    let [a, b] = ends;

    let mut cuts = vec![t0, t1];
    cuts.extend(sol.spec.control.breakpoints().iter().copied());
    for s in &sol.shocks {
        cuts.push(s.birth_t);
        if let Some(d) = s.death {
            cuts.push(d.t);
        }
        cuts.extend(crossings(s, a));
        cuts.extend(crossings(s, b));
    }
    cuts.retain(|&t| t >= t0 && t <= t1);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() <= 1e-14);

    let flux = &sol.spec.flux;
    let source = &sol.spec.source;
    let rule = gauss8();
    let (mut bflux, mut src) = (0.0, 0.0);
    for w in cuts.windows(2) {
        let n = ((w[1] - w[0]) / PANEL).ceil().max(1.0) as usize;
        for p in 0..n {
            let pa = w[0] + (w[1] - w[0]) * p as f64 / n as f64;
            let pb = w[0] + (w[1] - w[0]) * (p + 1) as f64 / n as f64;
            for (t, wt) in rule.mapped(pa, pb) {
                let snap = Snapshot::new(sol, t)?;
                bflux += wt * (flux.eval(snap.value(a)?) - flux.eval(snap.value(b)?));
                if !source.is_zero() {
                    let alpha = sol.spec.control.eval_clamped(t);
                    src += wt * snap.integrate(a, b, |x, u| source.eval(t, x, u, alpha))?;
                }
            }
        }
    }
    let m0 = Snapshot::new(sol, t0)?.integrate(a, b, |_, u| u)?;
    let m1 = Snapshot::new(sol, t1)?.integrate(a, b, |_, u| u)?;
    let mass_change = m1 - m0;
    Ok(BalanceReport {
        a,
        b,
        t0,
        t1,
        mass_change,
        boundary_flux: bflux,
        source: src,
        residual: (mass_change - bflux - src).abs(),
        adjusted: (!notes.is_empty()).then(|| notes.join("; ")),
    })
}

/// Times at which the shock path crosses the line x = c.
fn crossings(s: &ShockCurve, c: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for w in s.samples.windows(2) {
        let (fa, fb) = (w[0].x - c, w[1].x - c);
        if fa == 0.0 {
            out.push(w[0].t);
        } else if fa * fb < 0.0 {
            let (mut lo, mut hi) = (w[0].t, w[1].t);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let fm = s.position_at(mid).unwrap() - c;
                if (fm < 0.0) == (fa < 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct StrengthSeries {
    pub shock_id: usize,
    /// (t, uL − uR) per sample.
    pub samples: Vec<(f64, f64)>,
    /// max |d/dt log(uL − uR)| between consecutive samples of positive strength.
    pub max_abs_log_rate: f64,
    /// The largest rate of decrease of log-strength.
    pub max_log_decay: f64,
}

pub fn shock_strength_series(shock: &ShockCurve) -> Result<StrengthSeries> {
    if shock.samples.len() < 2 {
        return Err(Error::Domain(format!("shock {} has fewer than two samples", shock.id)));
    }
    let samples: Vec<(f64, f64)> = shock.samples.iter().map(|s| (s.t, s.strength())).collect();
    let (mut max_abs, mut max_decay) = (0.0f64, 0.0f64);
    for w in samples.windows(2) {
        let ((ta, sa), (tb, sb)) = (w[0], w[1]);
        if sa > 0.0 && sb > 0.0 && tb > ta {
            let r = (sb.ln() - sa.ln()) / (tb - ta);
            max_abs = max_abs.max(r.abs());
            max_decay = max_decay.max(-r);
        }
    }
    Ok(StrengthSeries {
        shock_id: shock.id,
        samples,
        max_abs_log_rate: max_abs,
        max_log_decay: max_decay,
    })
}
