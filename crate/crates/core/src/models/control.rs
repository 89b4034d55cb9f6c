use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Piecewise-constant control α(t) on [0, T].
///
/// Interval k covers [t_k, t_{k+1}); lookups are right-continuous at interior
/// breakpoints and the terminal time returns the last interval's value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlSignal {
    breakpoints: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl ControlSignal {
    pub fn new(breakpoints: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::Model("control needs at least two breakpoints".into()));
        }
        if breakpoints[0] != 0.0 {
            return Err(Error::Model("control breakpoints must start at t = 0".into()));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Model("control breakpoints must be strictly increasing".into()));
        }
        if values.len() + 1 != breakpoints.len() {
            return Err(Error::Model(format!(
                "control has {} breakpoints but {} interval values",
                breakpoints.len(),
                values.len()
            )));
        }
        let m = values[0].len();
        if m == 0 || values.iter().any(|v| v.len() != m) {
            return Err(Error::Model("control values must share one positive dimension".into()));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Model("control values must be finite".into()));
        }
        Ok(ControlSignal { breakpoints, values })
    }

    /// Scalar control on `n` equal intervals of [0, horizon].
    pub fn uniform(horizon: f64, scalars: &[f64]) -> Result<Self> {
        let n = scalars.len();
        if n == 0 {
            return Err(Error::Model("control needs at least one interval".into()));
        }
        let mut bps: Vec<f64> = (0..n).map(|k| horizon * k as f64 / n as f64).collect();
        bps.push(horizon);
        Self::new(bps, scalars.iter().map(|&v| vec![v]).collect())
    }

    pub fn constant(horizon: f64, value: f64) -> Result<Self> {
        Self::uniform(horizon, &[value])
    }

    pub fn zero(horizon: f64) -> Self {
        Self::constant(horizon, 0.0).expect("zero control on a positive horizon")
    }

    pub fn dimension(&self) -> usize {
        self.values[0].len()
    }

    pub fn intervals(&self) -> usize {
        self.values.len()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn horizon(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    /// Index of the interval containing t (right-continuous, terminal time in
    /// the last interval). Callers are responsible for 0 <= t <= T.
    pub fn interval_index(&self, t: f64) -> usize {
        let n = self.values.len();
        // first breakpoint strictly greater than t, minus one
        let idx = self.breakpoints.partition_point(|&b| b <= t);
        idx.saturating_sub(1).min(n - 1)
    }

    pub fn eval(&self, t: f64) -> Result<&[f64]> {
        if !(t >= 0.0 && t <= self.horizon()) {
            return Err(Error::Domain(format!(
                "control evaluated at t = {t} outside [0, {}]",
                self.horizon()
            )));
        }
        Ok(&self.values[self.interval_index(t)])
    }

    /// Lookup without the domain check; times outside [0, T] clamp to the end intervals.
    pub fn eval_clamped(&self, t: f64) -> &[f64] {
        &self.values[self.interval_index(t)]
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn interval_len(&self, k: usize) -> f64 {
        self.breakpoints[k + 1] - self.breakpoints[k]
    }

    /// ∫ |α(t)|₁ dt.
    pub fn l1_norm(&self) -> f64 {
        (0..self.intervals())
            .map(|k| self.interval_len(k) * self.values[k].iter().map(|v| v.abs()).sum::<f64>())
            .sum()
    }

    /// ∫ |α(t)|² dt.
    pub fn l2_norm_sq(&self) -> f64 {
        (0..self.intervals())
            .map(|k| self.interval_len(k) * self.values[k].iter().map(|v| v * v).sum::<f64>())
            .sum()
    }

    /// Same breakpoints, new flattened values (interval-major).
    pub fn with_flat_values(&self, flat: &[f64]) -> Result<Self> {
        let m = self.dimension();
        if flat.len() != m * self.intervals() {
            return Err(Error::Model("flattened control has the wrong length".into()));
        }
        Self::new(
            self.breakpoints.clone(),
            flat.chunks(m).map(|c| c.to_vec()).collect(),
        )
    }

    pub fn flat_values(&self) -> Vec<f64> {
        self.values.iter().flatten().copied().collect()
    }

    /// A copy whose horizon is moved to `horizon`: later breakpoints are
    /// dropped and the last interval is stretched or shrunk.
    pub fn retimed(&self, horizon: f64) -> Result<Self> {
        let mut bps = vec![0.0];
        let mut vals = Vec::new();
        for k in 0..self.intervals() {
            if self.breakpoints[k] >= horizon {
                break;
            }
            if k > 0 {
                bps.push(self.breakpoints[k]);
            }
            vals.push(self.values[k].clone());
        }
        bps.push(horizon);
        Self::new(bps, vals)
    }

    /// Adds `other` interval-wise. Both signals must share breakpoints.
    pub fn add_scaled(&self, other: &ControlSignal, scale: f64) -> Result<Self> {
        if other.breakpoints != self.breakpoints || other.dimension() != self.dimension() {
            return Err(Error::Model("controls do not share breakpoints".into()));
        }
        let flat: Vec<f64> = self
            .flat_values()
            .iter()
            .zip(other.flat_values())
            .map(|(a, b)| a + scale * b)
            .collect();
        self.with_flat_values(&flat)
    }
}

pub fn eval_control(alpha: &ControlSignal, t: f64) -> Result<Vec<f64>> {
    alpha.eval(t).map(|v| v.to_vec())
}
