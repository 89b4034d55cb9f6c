//! Third-order jets: a value together with its first three derivatives with
//! respect to one scalar parameter.
//!
//! Arithmetic on jets propagates derivatives exactly (Leibniz and Faà di
//! Bruno), which is how the y-derivatives of the characteristic system and
//! the derivatives of the smooth cutoff functions are obtained.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet3(pub [f64; 4]);

impl Jet3 {
    pub const ZERO: Jet3 = Jet3([0.0; 4]);

    pub fn constant(c: f64) -> Self {
        Jet3([c, 0.0, 0.0, 0.0])
    }

    /// The independent variable itself.
    pub fn variable(x: f64) -> Self {
        Jet3([x, 1.0, 0.0, 0.0])
    }

    pub fn value(self) -> f64 {
        self.0[0]
    }

    pub fn d(self, k: usize) -> f64 {
        self.0[k]
    }

    /// Composes a scalar function with this jet, given the function value and
    /// its first three derivatives at `self.value()`.
    pub fn compose(self, phi: [f64; 4]) -> Self {
        let [_, a1, a2, a3] = self.0;
        Jet3([
            phi[0],
            phi[1] * a1,
            phi[2] * a1 * a1 + phi[1] * a2,
            phi[3] * a1 * a1 * a1 + 3.0 * phi[2] * a1 * a2 + phi[1] * a3,
        ])
    }

    pub fn exp(self) -> Self {
        let e = self.0[0].exp();
        self.compose([e, e, e, e])
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.0[0].sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.0[0].sin_cos();
        self.compose([c, -s, -c, s])
    }

    pub fn recip(self) -> Self {
        let r = 1.0 / self.0[0];
        self.compose([r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r])
    }

    pub fn is_finite(self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

/// Partial derivatives of a function h(a, b) up to third order.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Partials2 {
    pub h: f64,
    pub a: f64,
    pub b: f64,
    pub aa: f64,
    pub ab: f64,
    pub bb: f64,
    pub aaa: f64,
    pub aab: f64,
    pub abb: f64,
    pub bbb: f64,
}

/// Composes h(a, b) with two jets in the same parameter.
pub fn compose2(a: Jet3, b: Jet3, p: &Partials2) -> Jet3 {
    let [_, a1, a2, a3] = a.0;
    let [_, b1, b2, b3] = b.0;
    let first = p.a * a1 + p.b * b1;
    let second = p.aa * a1 * a1 + 2.0 * p.ab * a1 * b1 + p.bb * b1 * b1 + p.a * a2 + p.b * b2;
    let third = p.aaa * a1 * a1 * a1
        + 3.0 * p.aab * a1 * a1 * b1
        + 3.0 * p.abb * a1 * b1 * b1
        + p.bbb * b1 * b1 * b1
        + 3.0 * (p.aa * a1 * a2 + p.ab * (a1 * b2 + a2 * b1) + p.bb * b1 * b2)
        + p.a * a3
        + p.b * b3;
    Jet3([p.h, first, second, third])
}

impl Add for Jet3 {
    type Output = Jet3;
    fn add(self, o: Jet3) -> Jet3 {
        Jet3([
            self.0[0] + o.0[0],
            self.0[1] + o.0[1],
            self.0[2] + o.0[2],
            self.0[3] + o.0[3],
        ])
    }
}

impl Sub for Jet3 {
    type Output = Jet3;
    fn sub(self, o: Jet3) -> Jet3 {
        self + (-o)
    }
}

impl Neg for Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        Jet3([-self.0[0], -self.0[1], -self.0[2], -self.0[3]])
    }
}

impl Mul for Jet3 {
    type Output = Jet3;
    fn mul(self, o: Jet3) -> Jet3 {
        let [a0, a1, a2, a3] = self.0;
        let [b0, b1, b2, b3] = o.0;
        Jet3([
            a0 * b0,
            a1 * b0 + a0 * b1,
            a2 * b0 + 2.0 * a1 * b1 + a0 * b2,
            a3 * b0 + 3.0 * a2 * b1 + 3.0 * a1 * b2 + a0 * b3,
        ])
    }
}

impl Div for Jet3 {
    type Output = Jet3;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet3) -> Jet3 {
        self * o.recip()
    }
}

impl Add<f64> for Jet3 {
    type Output = Jet3;
    fn add(mut self, c: f64) -> Jet3 {
        self.0[0] += c;
        self
    }
}

impl Sub<f64> for Jet3 {
    type Output = Jet3;
    fn sub(mut self, c: f64) -> Jet3 {
        self.0[0] -= c;
        self
    }
}

impl Mul<f64> for Jet3 {
    type Output = Jet3;
    fn mul(self, c: f64) -> Jet3 {
        Jet3([self.0[0] * c, self.0[1] * c, self.0[2] * c, self.0[3] * c])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule_matches_closed_form() {
        // (x^2)(sin x) at x = 0.7
        let x = Jet3::variable(0.7);
        let j = x * x * x.sin();
        let (s, c) = 0.7f64.sin_cos();
        let x0 = 0.7f64;
        assert!((j.d(1) - (2.0 * x0 * s + x0 * x0 * c)).abs() < 1e-14);
        assert!((j.d(2) - (2.0 * s + 4.0 * x0 * c - x0 * x0 * s)).abs() < 1e-14);
        assert!((j.d(3) - (6.0 * c - 6.0 * x0 * s - x0 * x0 * c)).abs() < 1e-13);
    }

    #[test]
    fn recip_and_exp_chain() {
        // exp(-1/x) at x = 0.5, derivatives against finite differences
        let f = |x: f64| (-1.0 / x).exp();
        let j = (-Jet3::variable(0.5).recip()).exp();
        let h = 1e-3;
        let d1 = (f(0.5 + h) - f(0.5 - h)) / (2.0 * h);
        let d2 = (f(0.5 + h) - 2.0 * f(0.5) + f(0.5 - h)) / (h * h);
        assert!((j.d(1) - d1).abs() < 1e-5);
        assert!((j.d(2) - d2).abs() < 1e-4);
    }

    #[test]
    fn compose2_reduces_to_product_for_bilinear() {
        // h(a, b) = a*b has h_a = b, h_b = a, h_ab = 1
        let a = Jet3([1.3, 0.2, -0.4, 0.9]);
        let b = Jet3([-0.6, 1.1, 0.3, -0.2]);
        let p = Partials2 {
            h: a.value() * b.value(),
            a: b.value(),
            b: a.value(),
            ab: 1.0,
            ..Default::default()
        };
        let via_compose = compose2(a, b, &p);
        let via_mul = a * b;
        for k in 0..4 {
            assert!((via_compose.d(k) - via_mul.d(k)).abs() < 1e-14);
        }
    }
}
