use std::fmt;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use super::jet::{Jet3, Partials2};
use super::smooth::{eta_jet, source_shape_eta};

/// A bounded smooth source g(t, x, u, α).
///
/// `partials` returns all derivatives in (x, u) up to third order; sources
/// that cannot provide them return `None` and the integrator falls back to
/// finite differences for the higher variational orders.
pub trait Source: Send + Sync + fmt::Debug {
    fn eval(&self, t: f64, x: f64, u: f64, alpha: &[f64]) -> f64;
    fn dx(&self, t: f64, x: f64, u: f64, alpha: &[f64]) -> f64;
    fn du(&self, t: f64, x: f64, u: f64, alpha: &[f64]) -> f64;

    fn partials(&self, _t: f64, _x: f64, _u: f64, _alpha: &[f64]) -> Option<Partials2> {
        None
    }

    /// ∂g/∂α_k. The default is a central difference.
    fn dalpha(&self, t: f64, x: f64, u: f64, alpha: &[f64], k: usize) -> f64 {
        let h = 1e-6 * alpha[k].abs().max(1.0);
        let mut a = alpha.to_vec();
        a[k] += h;
        let up = self.eval(t, x, u, &a);
        a[k] -= 2.0 * h;
        let down = self.eval(t, x, u, &a);
        (up - down) / (2.0 * h)
    }

    /// Upper bound on |g| for unit-size controls.
    fn bound(&self) -> f64;

    fn is_zero(&self) -> bool {
        false
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroSource;

impl Source for ZeroSource {
    fn eval(&self, _: f64, _: f64, _: f64, _: &[f64]) -> f64 {
        0.0
    }
    fn dx(&self, _: f64, _: f64, _: f64, _: &[f64]) -> f64 {
        0.0
    }
    fn du(&self, _: f64, _: f64, _: f64, _: &[f64]) -> f64 {
        0.0
    }
    fn partials(&self, _: f64, _: f64, _: f64, _: &[f64]) -> Option<Partials2> {
        Some(Partials2::default())
    }
    fn dalpha(&self, _: f64, _: f64, _: f64, _: &[f64], _: usize) -> f64 {
        0.0
    }
    fn bound(&self) -> f64 {
        0.0
    }
    fn is_zero(&self) -> bool {
        true
    }
}

/// g = -η(x) α_channel.
#[derive(Clone, Copy, Debug, Default)]
pub struct EtaControl {
    pub channel: usize,
}

impl Source for EtaControl {
    fn eval(&self, _: f64, x: f64, _: f64, alpha: &[f64]) -> f64 {
        -source_shape_eta(x) * alpha[self.channel]
    }
    fn dx(&self, _: f64, x: f64, _: f64, alpha: &[f64]) -> f64 {
        -eta_jet(Jet3::variable(x)).d(1) * alpha[self.channel]
    }
    fn du(&self, _: f64, _: f64, _: f64, _: &[f64]) -> f64 {
        0.0
    }
    fn partials(&self, _: f64, x: f64, _: f64, alpha: &[f64]) -> Option<Partials2> {
        let a = alpha[self.channel];
        let e = eta_jet(Jet3::variable(x));
        Some(Partials2 {
            h: -e.d(0) * a,
            a: -e.d(1) * a,
            aa: -e.d(2) * a,
            aaa: -e.d(3) * a,
            ..Default::default()
        })
    }
    fn dalpha(&self, _: f64, x: f64, _: f64, _: &[f64], k: usize) -> f64 {
        if k == self.channel {
            -source_shape_eta(x)
        } else {
            0.0
        }
    }
    fn bound(&self) -> f64 {
        eta_sup()
    }
}

/// g = α_channel, uniform in space and state.
// sup |η|, attained on the bridge just past 2π
fn eta_sup() -> f64 {
    static SUP: OnceLock<f64> = OnceLock::new();
    *SUP.get_or_init(|| {
        let (lo, hi) = (2.0 * PI, 4.0 * PI);
        (0..=20_000)
            .map(|i| source_shape_eta(lo + (hi - lo) * i as f64 / 20_000.0))
            .fold(2.0 * PI, f64::max)
            * (1.0 + 1e-6)
    })
}

#[derive(Clone, Copy, Debug, Default)]
pub struct UniformControl {
    pub channel: usize,
}

impl Source for UniformControl {
    fn eval(&self, _: f64, _: f64, _: f64, alpha: &[f64]) -> f64 {
        alpha[self.channel]
    }
    fn dx(&self, _: f64, _: f64, _: f64, _: &[f64]) -> f64 {
        0.0
    }
    fn du(&self, _: f64, _: f64, _: f64, _: &[f64]) -> f64 {
        0.0
    }
    fn partials(&self, _: f64, _: f64, _: f64, alpha: &[f64]) -> Option<Partials2> {
        Some(Partials2 {
            h: alpha[self.channel],
            ..Default::default()
        })
    }
    fn dalpha(&self, _: f64, _: f64, _: f64, _: &[f64], k: usize) -> f64 {
        if k == self.channel {
            1.0
        } else {
            0.0
        }
    }
    fn bound(&self) -> f64 {
        1.0
    }
}

/// g = -rate · u. Unbounded in u, so `bound` reports the value over |u| <= 10.
#[derive(Clone, Copy, Debug)]
pub struct LinearDamping {
    pub rate: f64,
}

impl Source for LinearDamping {
    fn eval(&self, _: f64, _: f64, u: f64, _: &[f64]) -> f64 {
        -self.rate * u
    }
    fn dx(&self, _: f64, _: f64, _: f64, _: &[f64]) -> f64 {
        0.0
    }
    fn du(&self, _: f64, _: f64, _: f64, _: &[f64]) -> f64 {
        -self.rate
    }
    fn partials(&self, _: f64, _: f64, u: f64, _: &[f64]) -> Option<Partials2> {
        Some(Partials2 {
            h: -self.rate * u,
            b: -self.rate,
            ..Default::default()
        })
    }
    fn dalpha(&self, _: f64, _: f64, _: f64, _: &[f64], _: usize) -> f64 {
        0.0
    }
    fn bound(&self) -> f64 {
        10.0 * self.rate.abs()
    }
}

#[derive(Clone)]
pub struct SourceModel {
    inner: Arc<dyn Source>,
}

impl fmt::Debug for SourceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("SourceModel").field(&self.inner).finish()
    }
}

impl SourceModel {
    pub fn new(source: impl Source + 'static) -> Self {
        SourceModel {
            inner: Arc::new(source),
        }
    }

    pub fn from_arc(inner: Arc<dyn Source>) -> Self {
        SourceModel { inner }
    }

    pub fn none() -> Self {
        Self::new(ZeroSource)
    }

    /// The control-driven source -η(x)α(t) with a scalar control.
    pub fn eta_times_control() -> Self {
        Self::new(EtaControl { channel: 0 })
    }

    #[inline]
    pub fn eval(&self, t: f64, x: f64, u: f64, alpha: &[f64]) -> f64 {
        self.inner.eval(t, x, u, alpha)
    }
    #[inline]
    pub fn dx(&self, t: f64, x: f64, u: f64, alpha: &[f64]) -> f64 {
        self.inner.dx(t, x, u, alpha)
    }
    #[inline]
    pub fn du(&self, t: f64, x: f64, u: f64, alpha: &[f64]) -> f64 {
        self.inner.du(t, x, u, alpha)
    }
    pub fn dalpha(&self, t: f64, x: f64, u: f64, alpha: &[f64], k: usize) -> f64 {
        self.inner.dalpha(t, x, u, alpha, k)
    }
    pub fn bound(&self) -> f64 {
        self.inner.bound()
    }
    pub fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    pub fn has_higher_derivatives(&self) -> bool {
        self.inner.partials(0.0, 0.0, 0.0, &[0.0; 8]).is_some()
    }

    /// Full partials when available, otherwise the first-order ones with the
    /// higher entries zeroed.
    pub(crate) fn partials(&self, t: f64, x: f64, u: f64, alpha: &[f64]) -> Partials2 {
        self.inner.partials(t, x, u, alpha).unwrap_or_else(|| Partials2 {
            h: self.eval(t, x, u, alpha),
            a: self.dx(t, x, u, alpha),
            b: self.du(t, x, u, alpha),
            ..Default::default()
        })
    }

    pub fn source(&self) -> &Arc<dyn Source> {
        &self.inner
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_partials(src: &SourceModel, alpha: &[f64]) {
        let h = 1e-5;
        for i in 0..=80 {
            let x = -15.0 + 0.375 * i as f64;
            let u = 0.3 * (i as f64).sin();
            let dx_fd = (src.eval(0.1, x + h, u, alpha) - src.eval(0.1, x - h, u, alpha)) / (2.0 * h);
            let du_fd = (src.eval(0.1, x, u + h, alpha) - src.eval(0.1, x, u - h, alpha)) / (2.0 * h);
            let dx = src.dx(0.1, x, u, alpha);
            let du = src.du(0.1, x, u, alpha);
            assert!((dx - dx_fd).abs() <= 1e-6 * dx.abs().max(1.0), "dx at {x}");
            assert!((du - du_fd).abs() <= 1e-6 * du.abs().max(1.0), "du at {x}");
            let amax = alpha.iter().fold(1.0f64, |m, a| m.max(a.abs()));
            assert!(src.eval(0.1, x, u, alpha).abs() <= src.bound() * amax + 1e-12);
        }
    }

    #[test]
    fn eta_source_partials_consistent() {
        check_partials(&SourceModel::eta_times_control(), &[0.7]);
        check_partials(&SourceModel::new(LinearDamping { rate: 0.4 }), &[0.0]);
        check_partials(&SourceModel::new(UniformControl { channel: 0 }), &[0.3]);
    }

    #[test]
    fn eta_source_dalpha() {
        let s = SourceModel::eta_times_control();
        assert_eq!(s.dalpha(0.0, 1.0, 0.0, &[0.5], 0), -1.0);
        let generic = s.source().eval(0.0, 1.0, 0.0, &[0.5]);
        assert_eq!(generic, -0.5);
    }

    #[test]
    fn fallback_partials_zero_higher_orders() {
        #[derive(Debug)]
        struct Quadratic;
        impl Source for Quadratic {
            fn eval(&self, _: f64, x: f64, u: f64, _: &[f64]) -> f64 {
                x * u
            }
            fn dx(&self, _: f64, _: f64, u: f64, _: &[f64]) -> f64 {
                u
            }
            fn du(&self, _: f64, x: f64, _: f64, _: &[f64]) -> f64 {
                x
            }
            fn bound(&self) -> f64 {
                1.0
            }
        }
        let s = SourceModel::new(Quadratic);
        assert!(!s.has_higher_derivatives());
        let p = s.partials(0.0, 2.0, 3.0, &[]);
        assert_eq!((p.h, p.a, p.b, p.ab), (6.0, 3.0, 2.0, 0.0));
        assert!((s.dalpha(0.0, 2.0, 3.0, &[1.0], 0)).abs() < 1e-9);
    }
}
