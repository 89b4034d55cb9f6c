use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use super::jet::Jet3;
use super::smooth::cutoff_jet;
use crate::error::{Error, Result};

/// Initial datum ū(y) together with its first three derivatives.
pub trait Profile: Send + Sync + fmt::Debug {
    /// [ū, ū′, ū″, ū‴] at y.
    fn jet(&self, y: f64) -> [f64; 4];
}

/// ū(x) = sin x − x on [−2π, 2π], extended by the constants ±2π.
#[derive(Clone, Copy, Debug, Default)]
pub struct SineProfile;

impl Profile for SineProfile {
    fn jet(&self, y: f64) -> [f64; 4] {
        if y <= -2.0 * PI {
            [2.0 * PI, 0.0, 0.0, 0.0]
        } else if y > 2.0 * PI {
            [-2.0 * PI, 0.0, 0.0, 0.0]
        } else {
            let (s, c) = y.sin_cos();
            [s - y, c - 1.0, -s, -c]
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ConstantProfile(pub f64);

impl Profile for ConstantProfile {
    fn jet(&self, _y: f64) -> [f64; 4] {
        [self.0, 0.0, 0.0, 0.0]
    }
}

/// ū(y) = Σ c_k y^k.
#[derive(Clone, Debug)]
pub struct PolynomialProfile(pub Vec<f64>);

impl Profile for PolynomialProfile {
    fn jet(&self, y: f64) -> [f64; 4] {
        let mut acc = Jet3::ZERO;
        let x = Jet3::variable(y);
        for &c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc.0
    }
}

/// Smooth decreasing step ū(y) = mid − amp · tanh((y − center) / width).
#[derive(Clone, Copy, Debug)]
pub struct TanhStep {
    pub mid: f64,
    pub amp: f64,
    pub center: f64,
    pub width: f64,
}

impl Profile for TanhStep {
    fn jet(&self, y: f64) -> [f64; 4] {
        let s = (Jet3::variable(y) - self.center) * (1.0 / self.width);
        // tanh s = 1 - 2 / (exp(2s) + 1)
        let th = -((s * 2.0).exp() + 1.0).recip() * 2.0 + 1.0;
        (-th * self.amp + self.mid).0
    }
}

/// Tabulated profile: value and derivatives at sample points, each column
/// interpolated by a cubic Hermite using the next column as its slope.
#[derive(Clone, Debug)]
pub struct TableProfile {
    y: Vec<f64>,
    cols: [Vec<f64>; 4],
}

impl TableProfile {
    pub fn new(y: Vec<f64>, u: Vec<f64>, ux: Vec<f64>, uxx: Vec<f64>, uxxx: Vec<f64>) -> Result<Self> {
        let n = y.len();
        if n < 2 {
            return Err(Error::Model("profile table needs at least two rows".into()));
        }
        if [u.len(), ux.len(), uxx.len(), uxxx.len()].iter().any(|&l| l != n) {
            return Err(Error::Model("profile table columns differ in length".into()));
        }
        if y.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Model("profile table abscissae must increase".into()));
        }
        Ok(TableProfile {
            y,
            cols: [u, ux, uxx, uxxx],
        })
    }
}

impl Profile for TableProfile {
    fn jet(&self, y: f64) -> [f64; 4] {
        let n = self.y.len();
        if y <= self.y[0] {
            return std::array::from_fn(|c| self.cols[c][0]);
        }
        if y >= self.y[n - 1] {
            return std::array::from_fn(|c| self.cols[c][n - 1]);
        }
        let i = self.y.partition_point(|&v| v <= y) - 1;
        let h = self.y[i + 1] - self.y[i];
        let s = (y - self.y[i]) / h;
        let (h00, h10, h01, h11) = (
            2.0 * s * s * s - 3.0 * s * s + 1.0,
            s * s * s - 2.0 * s * s + s,
            -2.0 * s * s * s + 3.0 * s * s,
            s * s * s - s * s,
        );
        let mut out = [0.0; 4];
        for c in 0..3 {
            let (p0, p1) = (self.cols[c][i], self.cols[c][i + 1]);
            let (m0, m1) = (self.cols[c + 1][i], self.cols[c + 1][i + 1]);
            out[c] = h00 * p0 + h10 * h * m0 + h01 * p1 + h11 * h * m1;
        }
        out[3] = (1.0 - s) * self.cols[3][i] + s * self.cols[3][i + 1];
        out
    }
}

/// ū(y) + η((y − ȳ)/δ) · (λ₁ d + λ₂ d²/2 + λ₃ d³/6), d = y − ȳ.
#[derive(Clone, Debug)]
pub struct PerturbedProfile {
    pub base: InitialProfile,
    pub ybar: f64,
    pub lambda: [f64; 3],
    pub delta_scale: f64,
}

impl Profile for PerturbedProfile {
    fn jet(&self, y: f64) -> [f64; 4] {
        let base = Jet3(self.base.jet(y));
        let d = Jet3::variable(y) - self.ybar;
        let cut = cutoff_jet(d * (1.0 / self.delta_scale));
        let [l1, l2, l3] = self.lambda;
        let poly = d * l1 + d * d * (l2 / 2.0) + d * d * d * (l3 / 6.0);
        (base + cut * poly).0
    }
}

#[derive(Clone)]
pub struct InitialProfile {
    inner: Arc<dyn Profile>,
}

impl fmt::Debug for InitialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("InitialProfile").field(&self.inner).finish()
    }
}

impl InitialProfile {
    pub fn new(p: impl Profile + 'static) -> Self {
        InitialProfile { inner: Arc::new(p) }
    }

    pub fn jet(&self, y: f64) -> [f64; 4] {
        self.inner.jet(y)
    }
    pub fn eval(&self, y: f64) -> f64 {
        self.jet(y)[0]
    }
    pub fn d1(&self, y: f64) -> f64 {
        self.jet(y)[1]
    }
    pub fn d2(&self, y: f64) -> f64 {
        self.jet(y)[2]
    }
    pub fn d3(&self, y: f64) -> f64 {
        self.jet(y)[3]
    }

    pub fn constant(c: f64) -> Self {
        Self::new(ConstantProfile(c))
    }
}

pub fn sine_profile() -> InitialProfile {
    InitialProfile::new(SineProfile)
}

/// Three-parameter local perturbation of `base` around `ybar`.
pub fn perturbation_family(
    base: &InitialProfile,
    ybar: f64,
    lambda: [f64; 3],
    delta_scale: f64,
) -> Result<InitialProfile> {
    if lambda.iter().any(|l| !(l.abs() <= 1.0)) {
        return Err(Error::Domain(format!("perturbation parameters {lambda:?} outside [-1, 1]")));
    }
    if !(delta_scale > 0.0) {
        return Err(Error::Domain("perturbation scale must be positive".into()));
    }
    Ok(InitialProfile::new(PerturbedProfile {
        base: base.clone(),
        ybar,
        lambda,
        delta_scale,
    }))
}
