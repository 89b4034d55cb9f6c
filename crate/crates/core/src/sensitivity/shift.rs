use serde::Serialize;

use super::linearized::LinearizedField;
use super::partials::lambda_partials;
use crate::error::{Error, Result};
use crate::shockfront::{DeathCause, Origin, ShockSample};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShiftSample {
    pub t: f64,
    pub zeta: f64,
    /// w at the left and right faces.
    pub w_left: f64,
    pub w_right: f64,
}

/// First-order displacement ζ(t) of one shock.
#[derive(Clone, Debug, Serialize)]
pub struct ShockShift {
    pub shock_id: usize,
    pub activation: f64,
    pub samples: Vec<ShiftSample>,
    /// Set when the shock merged before the horizon; ζ stops there.
    pub merged_at: Option<f64>,
}

impl ShockShift {
    pub fn zeta_end(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.zeta)
    }
}

/// ζ of `shock_id`, zero at `activation` (or started from the shift of its
/// birth point when the shock appears later).
pub fn shock_shift(lin: &LinearizedField<'_>, shock_id: usize, activation: f64) -> Result<ShockShift> {
    let all = shock_shifts(lin, activation)?;
    all.into_iter()
        .nth(shock_id)
        .flatten()
        .ok_or_else(|| Error::Domain(format!("shock {shock_id} is not alive after t = {activation}")))
}

/// Shifts of every shock alive after `activation`, in shock-id order.
pub fn shock_shifts(lin: &LinearizedField<'_>, activation: f64) -> Result<Vec<Option<ShockShift>>> {
    let base = lin.base;
    let mut out: Vec<Option<ShockShift>> = Vec::with_capacity(base.shocks.len());
    for shock in &base.shocks {
        let merged_at = match shock.death {
            Some(d) if matches!(d.cause, DeathCause::MergedInto(_)) => Some(d.t),
            _ => None,
        };
        if merged_at.is_some_and(|t| t <= activation) {
            out.push(None);
            continue;
        }
        let samples: Vec<&ShockSample> = shock.samples.iter().filter(|s| s.t >= activation - 1e-12).collect();
        if samples.is_empty() {
            out.push(None);
            continue;
        }
        let zeta0 = if shock.birth_t < activation - 1e-12 {
            0.0
        } else {
            match &shock.origin {
                Origin::Formation { .. } => lin.at(samples[0].t, samples[0].y_left).0,
                Origin::Merge { inputs } => merged_shift(lin, &out, inputs, samples[0].speed)?,
            }
        };
        let mut zeta = zeta0;
        let mut prev: Option<(f64, f64, f64)> = None;
        let mut series = Vec::with_capacity(samples.len());
        for s in samples {
            let (a, b, wl, wr) = coefficients(lin, s);
            if let Some((t0, a0, b0)) = prev {
                let h = s.t - t0;
                if h > 0.0 {
                    zeta = advance(zeta, h, (a0, b0), (a, b));
                }
            }
            series.push(ShiftSample {
                t: s.t,
                zeta,
                w_left: wl,
                w_right: wr,
            });
            prev = Some((s.t, a, b));
        }
        out.push(Some(ShockShift {
            shock_id: shock.id,
            activation,
            samples: series,
            merged_at,
        }));
    }
    Ok(out)
}

/// One step of ζ̇ = a ζ + b: trapezoid, or backward Euler when stiff
/// (right after a birth, where u_x on the faces is large).
fn advance(zeta: f64, h: f64, (a0, b0): (f64, f64), (a, b): (f64, f64)) -> f64 {
    if h * a0.abs().max(a.abs()) < 1.0 {
        (zeta * (1.0 + 0.5 * h * a0) + 0.5 * h * (b0 + b)) / (1.0 - 0.5 * h * a)
    } else {
        (zeta + h * b) / (1.0 - h * a)
    }
}

/// Coefficients of ζ̇ = a ζ + b with a = Λ⁻u_x⁻ + Λ⁺u_x⁺ and b = Λ⁻w⁻ + Λ⁺w⁺.
fn coefficients(lin: &LinearizedField<'_>, s: &ShockSample) -> (f64, f64, f64, f64) {
    let flux = &lin.base.spec.flux;
    let (dp, dm) = lambda_partials(flux, s.u_right, s.u_left);
    let (xl, vl) = lin.at(s.t, s.y_left);
    let (xr, vr) = lin.at(s.t, s.y_right);
    let wl = vl - s.ux_left * xl;
    let wr = vr - s.ux_right * xr;
    (dm * s.ux_left + dp * s.ux_right, dm * wl + dp * wr, wl, wr)
}

/// Shift of a shock born from a merge: the outermost inputs meet at a
/// shifted time, after which the new shock moves at its own speed.
fn merged_shift(lin: &LinearizedField<'_>, done: &[Option<ShockShift>], inputs: &[usize], speed: f64) -> Result<f64> {
    let base = lin.base;
    let (first, last) = (inputs[0], inputs[inputs.len() - 1]);
    let end = |id: usize| -> Result<(f64, f64)> {
        let z = done
            .get(id)
            .and_then(|s| s.as_ref())
            .map(|s| s.zeta_end())
            .ok_or_else(|| Error::solver("shock shift", format!("input shock {id} has no shift")))?;
        let v = base.shocks[id].samples.last().map_or(0.0, |s| s.speed);
        Ok((z, v))
    };
    let ((z1, v1), (z2, v2)) = (end(first)?, end(last)?);
    if (v1 - v2).abs() < 1e-12 {
        return Ok(0.5 * (z1 + z2));
    }
    Ok(z1 + (v1 - speed) * (z2 - z1) / (v1 - v2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::FluxModel;

    fn run(tau: f64, t_end: f64, n: usize, coef: impl Fn(f64) -> (f64, f64)) -> f64 {
        let h = (t_end - tau) / n as f64;
        let mut z = 0.0;
        for k in 0..n {
            let t = tau + k as f64 * h;
            z = advance(z, h, coef(t), coef(t + h));
        }
        z
    }

    #[test]
    fn constant_states_give_linear_shift() {
        // u_x = 0 on both faces, constant traces
        let (wl, wr) = (0.4, -1.3);
        let (dp, dm) = lambda_partials(&FluxModel::burgers(), -2.0, 1.0);
        let b = dm * wl + dp * wr;
        let z = run(0.25, 0.9, 40, |_| (0.0, b));
        assert!((z - 0.5 * (wl + wr) * 0.65).abs() < 1e-14);
    }

    #[test]
    fn linear_coefficient_converges() {
        // ζ̇ = −ζ + 1, ζ(0) = 0
        let exact = 1.0 - (-1.0f64).exp();
        let e1 = (run(0.0, 1.0, 50, |_| (-1.0, 1.0)) - exact).abs();
        let e2 = (run(0.0, 1.0, 100, |_| (-1.0, 1.0)) - exact).abs();
        assert!(e1 < 1e-4 && (e1 / e2 - 4.0).abs() < 0.1);
        // a stiff step stays bounded
        let z = run(0.0, 1.0, 2, |_| (-50.0, 50.0));
        assert!(z > 0.0 && z <= 1.0);
    }
}
