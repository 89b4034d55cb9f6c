use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A smooth flux function f(u).
///
/// `d3` and `d4` are optional; without them the third-order variational
/// system falls back to finite differences across neighbouring trajectories.
pub trait Flux: Send + Sync + fmt::Debug {
    fn eval(&self, u: f64) -> f64;
    fn d1(&self, u: f64) -> f64;
    fn d2(&self, u: f64) -> f64;
    fn d3(&self, _u: f64) -> Option<f64> {
        None
    }
    fn d4(&self, _u: f64) -> Option<f64> {
        None
    }
}

/// f(u) = u²/2.
#[derive(Clone, Copy, Debug, Default)]
pub struct Burgers;

impl Flux for Burgers {
    fn eval(&self, u: f64) -> f64 {
        0.5 * u * u
    }
    fn d1(&self, u: f64) -> f64 {
        u
    }
    fn d2(&self, _u: f64) -> f64 {
        1.0
    }
    fn d3(&self, _u: f64) -> Option<f64> {
        Some(0.0)
    }
    fn d4(&self, _u: f64) -> Option<f64> {
        Some(0.0)
    }
}

/// f(u) = Σ c_k u^k.
#[derive(Clone, Debug)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    fn derivative(&self, order: usize, u: f64) -> f64 {
        // Horner over c_k · k!/(k-order)! · u^(k-order), highest degree first.
        let mut acc = 0.0;
        for (k, &c) in self.coeffs.iter().enumerate().skip(order).rev() {
            let falling: f64 = (0..order).map(|i| (k - i) as f64).product();
            acc = acc * u + c * falling;
        }
        acc
    }
}

impl Flux for Polynomial {
    fn eval(&self, u: f64) -> f64 {
        self.derivative(0, u)
    }
    fn d1(&self, u: f64) -> f64 {
        self.derivative(1, u)
    }
    fn d2(&self, u: f64) -> f64 {
        self.derivative(2, u)
    }
    fn d3(&self, u: f64) -> Option<f64> {
        Some(self.derivative(3, u))
    }
    fn d4(&self, u: f64) -> Option<f64> {
        Some(self.derivative(4, u))
    }
}

/// A strictly convex flux with a certified lower bound on f″ over a working range.
#[derive(Clone)]
pub struct FluxModel {
    inner: Arc<dyn Flux>,
    convexity_floor: f64,
    range: (f64, f64),
}

impl fmt::Debug for FluxModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FluxModel")
            .field("flux", &self.inner)
            .field("convexity_floor", &self.convexity_floor)
            .field("range", &self.range)
            .finish()
    }
}

const CONVEXITY_SAMPLES: usize = 2001;

impl FluxModel {
    /// Wraps `flux`, sampling f″ on `range` to establish the convexity floor.
    pub fn new(flux: impl Flux + 'static, range: (f64, f64)) -> Result<Self> {
        Self::from_arc(Arc::new(flux), range)
    }

    pub fn from_arc(flux: Arc<dyn Flux>, range: (f64, f64)) -> Result<Self> {
        let (lo, hi) = range;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Model(format!("invalid flux working range [{lo}, {hi}]")));
        }
        let mut floor = f64::INFINITY;
        for i in 0..CONVEXITY_SAMPLES {
            let u = lo + (hi - lo) * i as f64 / (CONVEXITY_SAMPLES - 1) as f64;
            floor = floor.min(flux.d2(u));
        }
        if !(floor > 0.0) {
            return Err(Error::Model(format!(
                "flux is not strictly convex on [{lo}, {hi}]: min f'' = {floor}"
            )));
        }
        Ok(FluxModel {
            inner: flux,
            convexity_floor: floor,
            range,
        })
    }

    pub fn burgers() -> Self {
        FluxModel {
            inner: Arc::new(Burgers),
            convexity_floor: 1.0,
            range: (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn polynomial(coeffs: Vec<f64>, range: (f64, f64)) -> Result<Self> {
        Self::new(Polynomial::new(coeffs), range)
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        self.inner.eval(u)
    }
    #[inline]
    pub fn d1(&self, u: f64) -> f64 {
        self.inner.d1(u)
    }
    #[inline]
    pub fn d2(&self, u: f64) -> f64 {
        self.inner.d2(u)
    }
    pub fn d3(&self, u: f64) -> Option<f64> {
        self.inner.d3(u)
    }
    pub fn d4(&self, u: f64) -> Option<f64> {
        self.inner.d4(u)
    }

    pub fn convexity_floor(&self) -> f64 {
        self.convexity_floor
    }

    pub fn working_range(&self) -> (f64, f64) {
        self.range
    }

    pub fn has_higher_derivatives(&self) -> bool {
        self.inner.d3(0.0).is_some() && self.inner.d4(0.0).is_some()
    }

    /// (f′, f″, f‴, f⁗) at u, with missing higher derivatives reported as zero.
    pub(crate) fn speed_derivs(&self, u: f64) -> [f64; 4] {
        [
            self.d1(u),
            self.d2(u),
            self.d3(u).unwrap_or(0.0),
            self.d4(u).unwrap_or(0.0),
        ]
    }

    pub fn flux(&self) -> &Arc<dyn Flux> {
        &self.inner
    }
}

pub fn burgers_flux() -> FluxModel {
    FluxModel::burgers()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn burgers_reference_values() {
        let f = burgers_flux();
        assert_eq!(f.eval(2.0), 2.0);
        assert_eq!(f.d1(3.0), 3.0);
        assert_eq!(f.d2(-5.0), 1.0);
        assert_eq!(f.eval(0.0), 0.0);
        assert_eq!(f.convexity_floor(), 1.0);
        assert_eq!((f.eval(-2.0) - f.eval(2.0)) / (-2.0 - 2.0), 0.0);
    }

    #[test]
    fn polynomial_derivatives() {
        // f = 1 + 2u + 3u² + u⁴/4
        let p = Polynomial::new(vec![1.0, 2.0, 3.0, 0.0, 0.25]);
        let u = 1.5f64;
        assert!((p.eval(u) - (1.0 + 3.0 + 6.75 + 0.25 * u.powi(4))).abs() < 1e-12);
        assert!((p.d1(u) - (2.0 + 6.0 * u + u.powi(3))).abs() < 1e-12);
        assert!((p.d2(u) - (6.0 + 3.0 * u * u)).abs() < 1e-12);
        assert!((p.d3(u).unwrap() - 6.0 * u).abs() < 1e-12);
        assert!((p.d4(u).unwrap() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let f = FluxModel::polynomial(vec![0.0, -1.0, 0.7, 0.1, 0.05], (-3.0, 3.0)).unwrap();
        let h = 1e-5;
        for i in 0..=60 {
            let u = -3.0 + 0.1 * i as f64;
            let d1 = (f.eval(u + h) - f.eval(u - h)) / (2.0 * h);
            let d2 = (f.d1(u + h) - f.d1(u - h)) / (2.0 * h);
            assert!((d1 - f.d1(u)).abs() <= 1e-6 * f.d1(u).abs().max(1.0));
            assert!((d2 - f.d2(u)).abs() <= 1e-6 * f.d2(u).abs().max(1.0));
        }
    }

    #[test]
    fn rejects_non_convex() {
        assert!(FluxModel::polynomial(vec![0.0, 0.0, 0.0, 1.0], (-1.0, 1.0)).is_err());
        assert!(FluxModel::polynomial(vec![0.0, 0.0, 0.0, 0.0, 0.25], (-1.0, 1.0)).is_err());
        assert!(FluxModel::polynomial(vec![0.0, 0.0, 0.0, 0.0, 0.25], (0.1, 2.0)).is_ok());
    }
}
