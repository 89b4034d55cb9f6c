//! Smooth step, cutoff and bump functions built from `exp(-1/s)`.
//!
//! All functions come in two flavours: a plain `f64` evaluation and a jet
//! evaluation returning the first three derivatives.

use super::jet::Jet3;
use std::f64::consts::PI;

// Below this argument exp(-1/s) and its first three derivatives are under 1e-80.
const FLAT_EPS: f64 = 5e-3;

fn flat_exp(s: Jet3) -> Jet3 {
    if s.value() <= FLAT_EPS {
        Jet3::ZERO
    } else {
        (-s.recip()).exp()
    }
}

/// Monotone C-infinity step: 0 for s <= 0, 1 for s >= 1, all derivatives
/// vanishing at both ends.
pub fn smooth_step_jet(s: Jet3) -> Jet3 {
    let v = s.value();
    if v <= 0.0 {
        return Jet3::ZERO;
    }
    if v >= 1.0 {
        return Jet3::constant(1.0);
    }
    if v > 0.5 {
        // evaluate the upper half through B(s) = 1 - B(1 - s) so that
        // rounding stays monotone as B approaches 1
        return -smooth_step_jet(-s + 1.0) + 1.0;
    }
    let a = flat_exp(s);
    let b = flat_exp(-s + 1.0);
    a / (a + b)
}

pub fn smooth_step(s: f64) -> f64 {
    smooth_step_jet(Jet3::constant(s)).value()
}

/// Odd, compactly supported source shape: `x` on |x| <= 2π, zero for
/// |x| >= 4π, bridged by `x * B((4π - |x|) / 2π)` in between.
pub fn eta_jet(x: Jet3) -> Jet3 {
    if x.value() < 0.0 {
        return -eta_positive(-x);
    }
    eta_positive(x)
}

fn eta_positive(x: Jet3) -> Jet3 {
    let v = x.value();
    if v <= 2.0 * PI {
        x
    } else if v >= 4.0 * PI {
        Jet3::ZERO
    } else {
        let s = (-x + 4.0 * PI) * (1.0 / (2.0 * PI));
        x * smooth_step_jet(s)
    }
}

pub fn source_shape_eta(x: f64) -> f64 {
    eta_jet(Jet3::constant(x)).value()
}

/// Cutoff equal to 1 on |y| <= 1 and 0 on |y| >= 2.
pub fn cutoff_jet(y: Jet3) -> Jet3 {
    if y.value() < 0.0 {
        smooth_step_jet(y + 2.0)
    } else {
        smooth_step_jet(-y + 2.0)
    }
}

pub fn cutoff(y: f64) -> f64 {
    cutoff_jet(Jet3::constant(y)).value()
}

/// Bump `exp(-1 / (1 - s²))`, positive on |s| < 1 and zero outside.
pub fn bump_jet(s: Jet3) -> Jet3 {
    let v = s.value();
    if v.abs() >= 1.0 {
        return Jet3::ZERO;
    }
    flat_exp(-(s * s) + 1.0)
}

pub fn bump(s: f64) -> f64 {
    bump_jet(Jet3::constant(s)).value()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(f: impl Fn(Jet3) -> Jet3, x: f64) {
        let h = 1e-5;
        let val = |x: f64| f(Jet3::variable(x));
        let j = val(x);
        let d1 = (val(x + h).value() - val(x - h).value()) / (2.0 * h);
        let d2 = (val(x + h).d(1) - val(x - h).d(1)) / (2.0 * h);
        let d3 = (val(x + h).d(2) - val(x - h).d(2)) / (2.0 * h);
        let scale = |a: f64| a.abs().max(1.0);
        assert!((j.d(1) - d1).abs() < 1e-6 * scale(d1), "d1 at {x}");
        assert!((j.d(2) - d2).abs() < 1e-6 * scale(d2), "d2 at {x}");
        assert!((j.d(3) - d3).abs() < 1e-5 * scale(d3), "d3 at {x}");
    }

    #[test]
    fn eta_reference_values() {
        assert_eq!(source_shape_eta(PI), PI);
        assert_eq!(source_shape_eta(-PI), -PI);
        assert_eq!(source_shape_eta(5.0 * PI), 0.0);
        assert_eq!(source_shape_eta(-5.0 * PI), 0.0);
    }

    #[test]
    fn eta_is_exactly_odd() {
        for i in 0..400 {
            let x = -14.0 + 0.07 * i as f64;
            assert_eq!(source_shape_eta(-x), -source_shape_eta(x));
            let a = eta_jet(Jet3::variable(x));
            let b = eta_jet(Jet3::variable(-x));
            assert_eq!(a.d(1), b.d(1));
            assert_eq!(a.d(2), -b.d(2));
        }
    }

    #[test]
    fn bridge_derivatives_match_finite_differences() {
        for &x in &[6.5, 7.5, 9.0, 10.5, 12.0, -8.0] {
            fd_check(eta_jet, x);
        }
        for &y in &[1.2, 1.5, 1.9, -1.3] {
            fd_check(cutoff_jet, y);
        }
        for &s in &[-0.8, -0.2, 0.0, 0.4, 0.9] {
            fd_check(bump_jet, s);
        }
    }

    #[test]
    fn cutoff_plateau_and_support() {
        assert_eq!(cutoff(0.0), 1.0);
        assert_eq!(cutoff(1.0), 1.0);
        assert_eq!(cutoff(-1.0), 1.0);
        assert_eq!(cutoff(2.0), 0.0);
        assert_eq!(cutoff(-2.5), 0.0);
        let mid = cutoff(1.5);
        assert!((mid - 0.5).abs() < 1e-12);
    }

    #[test]
    fn smooth_step_is_monotone() {
        let mut prev = 0.0;
        for i in 0..=1000 {
            let s = i as f64 / 1000.0;
            let v = smooth_step(s);
            assert!(v >= prev);
            prev = v;
        }
    }
}
