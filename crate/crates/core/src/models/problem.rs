use std::f64::consts::PI;

use super::control::ControlSignal;
use super::flux::FluxModel;
use super::profile::{sine_profile, InitialProfile};
use super::source::SourceModel;
use crate::error::{Error, Result};

const SPEED_SAMPLES: usize = 4001;

/// The controlled Cauchy problem u_t + f(u)_x = g(t, x, u, α(t)), u(0) = ū on [0, T].
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub flux: FluxModel,
    pub source: SourceModel,
    pub control: ControlSignal,
    pub initial: InitialProfile,
    pub horizon: f64,
    pub window: (f64, f64),
}

impl ProblemSpec {
    pub fn new(
        flux: FluxModel,
        source: SourceModel,
        control: ControlSignal,
        initial: InitialProfile,
        horizon: f64,
        window: (f64, f64),
    ) -> Result<Self> {
        let spec = ProblemSpec {
            flux,
            source,
            control,
            initial,
            horizon,
            window,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(Error::Model(format!("horizon must be positive, got {}", self.horizon)));
        }
        let (a, b) = self.window;
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Model(format!("invalid spatial window [{a}, {b}]")));
        }
        let ct = self.control.horizon();
        if (ct - self.horizon).abs() > 1e-12 * self.horizon.max(1.0) {
            return Err(Error::Model(format!(
                "control is defined on [0, {ct}] but the horizon is {}",
                self.horizon
            )));
        }
        let reach = self.max_wave_speed() * self.horizon;
        if reach > 0.5 * (b - a) {
            return Err(Error::Model(format!(
                "window [{a}, {b}] is too narrow: wave speeds reach {reach} within the horizon"
            )));
        }
        Ok(())
    }

    /// Bound on |u| over [0, T]: sup |ū| over the window widened by its own
    /// width on each side, plus the accumulated source.
    pub fn state_bound(&self) -> f64 {
        let (a, b) = (
            self.window.0 - (self.window.1 - self.window.0),
            self.window.1 + (self.window.1 - self.window.0),
        );
        let mut m: f64 = 0.0;
        for i in 0..SPEED_SAMPLES {
            let y = a + (b - a) * i as f64 / (SPEED_SAMPLES - 1) as f64;
            m = m.max(self.initial.eval(y).abs());
        }
        m + self.source.bound() * self.control.max_norm() * self.horizon
    }

    /// λ* = max |f′(u)| over |u| <= state_bound.
    pub fn max_wave_speed(&self) -> f64 {
        let ub = self.state_bound();
        let mut lam: f64 = 0.0;
        for i in 0..SPEED_SAMPLES {
            let u = -ub + 2.0 * ub * i as f64 / (SPEED_SAMPLES - 1) as f64;
            lam = lam.max(self.flux.d1(u).abs());
        }
        lam
    }

    /// A copy with a different horizon; the control is retimed to match.
    pub fn with_horizon(&self, horizon: f64) -> Result<Self> {
        let mut s = self.clone();
        s.control = self.control.retimed(horizon)?;
        s.horizon = horizon;
        s.validate()?;
        Ok(s)
    }

    pub fn with_control(&self, control: ControlSignal) -> Result<Self> {
        let mut s = self.clone();
        s.control = control;
        s.validate()?;
        Ok(s)
    }

    /// Grows a symmetric margin onto the window until λ*·T fits.
    pub fn fit_window(&mut self) {
        let reach = self.max_wave_speed() * self.horizon;
        let (a, b) = self.window;
        let half = 0.5 * (b - a);
        if reach > half {
            let grow = reach - half + 1e-9 * reach.max(1.0);
            self.window = (a - grow, b + grow);
        }
    }

    pub fn default_dt(&self) -> f64 {
        1e-3 * self.horizon
    }

    /// The window extended by λ*·T on both sides.
    pub fn characteristic_span(&self) -> (f64, f64) {
        let margin = self.max_wave_speed() * self.horizon;
        (self.window.0 - margin, self.window.1 + margin)
    }
}

pub const SINE_WINDOW: (f64, f64) = (-6.0 * PI, 6.0 * PI);

/// Burgers flux, no source, ū = sin x − x.
pub fn burgers_sine(horizon: f64) -> Result<ProblemSpec> {
    ProblemSpec::new(
        FluxModel::burgers(),
        SourceModel::none(),
        ControlSignal::zero(horizon),
        sine_profile(),
        horizon,
        SINE_WINDOW,
    )
}

/// Burgers flux, no source, constant data.
pub fn constant_data(value: f64, horizon: f64) -> Result<ProblemSpec> {
    ProblemSpec::new(
        FluxModel::burgers(),
        SourceModel::none(),
        ControlSignal::zero(horizon),
        InitialProfile::constant(value),
        horizon,
        SINE_WINDOW,
    )
}

/// Burgers flux with source −η(x)α(t), ū = sin x − x, horizon T = 1 − δ.
pub fn prop11_problem(delta: f64, control: ControlSignal) -> Result<ProblemSpec> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    ProblemSpec::new(
        FluxModel::burgers(),
        SourceModel::eta_times_control(),
        control,
        sine_profile(),
        1.0 - delta,
        SINE_WINDOW,
    )
}

/// Names accepted by [`preset`].
pub const PRESETS: [&str; 3] = ["burgers-sine", "constant-data", "prop11"];

/// A named problem. `horizon` defaults to 1.05 for the sine data and 1 for
/// constant data; the terminal-merge problem takes `delta` (default 0.1),
/// a zero control on `intervals` pieces (default 8) and T = 1 − δ.
pub fn preset(name: &str, horizon: Option<f64>, delta: Option<f64>, intervals: Option<usize>) -> Result<ProblemSpec> {
    match name {
        "burgers-sine" => burgers_sine(horizon.unwrap_or(1.05)),
        "constant-data" => constant_data(0.5, horizon.unwrap_or(1.0)),
        "prop11" => {
            let delta = delta.unwrap_or(0.1);
            if let Some(h) = horizon {
                if (h - (1.0 - delta)).abs() > 1e-12 {
                    return Err(Error::Config(format!(
                        "prop11 has horizon 1 - delta = {}, got {h}",
                        1.0 - delta
                    )));
                }
            }
            let n = intervals.unwrap_or(8);
            if n == 0 {
                return Err(Error::Config("intervals must be positive".into()));
            }
            prop11_problem(delta, ControlSignal::uniform(1.0 - delta, &vec![0.0; n])?)
        }
        other => Err(Error::Config(format!(
            "unknown preset {other:?}; expected one of {}",
            PRESETS.join(", ")
        ))),
    }
}
