use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use charshock::models::{
    preset, ControlSignal, FluxModel, InitialProfile, PolynomialProfile, ProblemSpec, SourceModel, TanhStep,
    UniformControl,
};
use charshock::optctl::OptimizeOptions;
use charshock::sensitivity::Direction;
use serde::{Deserialize, Serialize};

/// Problem description: a preset, optionally with fields overridden, or a
/// fully inline problem.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intervals: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flux: Option<FluxConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<ProfileConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<SourceConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub control: Option<ControlSignal>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum FluxConfig {
    Burgers,
    /// f(u) = Σ c_k u^k, strictly convex on `range`.
    Polynomial { coeffs: Vec<f64>, range: (f64, f64) },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileConfig {
    Sine,
    Constant { value: f64 },
    Polynomial { coeffs: Vec<f64> },
    Tanh { mid: f64, amp: f64, center: f64, width: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceConfig {
    None,
    /// g = −η(x) α(t).
    Eta,
    /// g = α(t).
    Uniform,
}

/// Everything one command needs; written back into the run manifest.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Number of fan characteristics.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ygrid: Option<usize>,
    /// Snapshot times for `simulate`; defaults to 0, T/2 and T.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile_times: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile_points: Option<usize>,
    /// Half-width of the genericity scan in y.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_nodes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Direction>,
    #[serde(default)]
    pub optimize: OptimizeOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

/// Command-line values that override the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub preset: Option<String>,
    pub out: Option<PathBuf>,
    pub dt: Option<f64>,
    pub ygrid: Option<usize>,
    pub horizon: Option<f64>,
    pub delta: Option<f64>,
    pub intervals: Option<usize>,
}

/// Reads a config file or the `config` member of a run manifest.
pub fn load(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("{}: not valid JSON", path.display()))?;
    if value.get("command").is_some() && value.get("config").is_some() {
        value = value["config"].take();
    }
    serde_json::from_value(value).with_context(|| format!("{}: invalid config", path.display()))
}

impl RunConfig {
    pub fn apply(&mut self, o: &Overrides) {
        if let Some(p) = &o.preset {
            self.problem.preset = Some(p.clone());
        }
        macro_rules! set {
            ($dst:expr, $src:expr) => {
                if let Some(v) = $src {
                    $dst = Some(v);
                }
            };
        }
        set!(self.problem.horizon, o.horizon);
        set!(self.problem.delta, o.delta);
        set!(self.problem.intervals, o.intervals);
        set!(self.dt, o.dt);
        set!(self.ygrid, o.ygrid);
        set!(self.output_dir, o.out.clone());
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir.clone().unwrap_or_else(|| PathBuf::from("out"))
    }
}

impl ProblemConfig {
    pub fn is_preset(&self, name: &str) -> bool {
        self.preset.as_deref() == Some(name)
    }

    /// Builds the problem. Without a preset every field except `delta` and
    /// `intervals` is required.
    pub fn build(&self) -> Result<ProblemSpec> {
        let mut spec = match &self.preset {
            Some(name) => preset(name, self.horizon, self.delta, self.intervals)?,
            None => {
                let horizon = self.horizon.context("problem.horizon: missing field")?;
                let window = self.window.context("problem.window: missing field")?;
                let flux = self.flux.as_ref().context("problem.flux: missing field")?;
                let initial = self.initial.as_ref().context("problem.initial: missing field")?;
                ProblemSpec {
                    flux: flux.build()?,
                    source: self.source.unwrap_or(SourceConfig::None).build(),
                    control: ControlSignal::zero(horizon),
                    initial: initial.build(),
                    horizon,
                    window,
                }
            }
        };
        if self.preset.is_some() {
            if let Some(f) = &self.flux {
                spec.flux = f.build()?;
            }
            if let Some(p) = &self.initial {
                spec.initial = p.build();
            }
            if let Some(s) = self.source {
                spec.source = s.build();
            }
            if let Some(w) = self.window {
                spec.window = w;
            }
        }
        if let Some(c) = &self.control {
            // deserialization skips the constructor checks
            spec.control = ControlSignal::new(c.breakpoints().to_vec(), c.values().to_vec()).context("problem.control")?;
        }
        if !(spec.horizon > 0.0) {
            bail!("problem.horizon: must be positive, got {}", spec.horizon);
        }
        spec.validate().context("problem")?;
        Ok(spec)
    }
}

impl FluxConfig {
    fn build(&self) -> Result<FluxModel> {
        Ok(match self {
            FluxConfig::Burgers => FluxModel::burgers(),
            FluxConfig::Polynomial { coeffs, range } => {
                FluxModel::polynomial(coeffs.clone(), *range).context("problem.flux")?
            }
        })
    }
}

impl ProfileConfig {
    fn build(&self) -> InitialProfile {
        match *self {
            ProfileConfig::Sine => charshock::models::sine_profile(),
            ProfileConfig::Constant { value } => InitialProfile::constant(value),
            ProfileConfig::Polynomial { ref coeffs } => InitialProfile::new(PolynomialProfile(coeffs.clone())),
            ProfileConfig::Tanh { mid, amp, center, width } => InitialProfile::new(TanhStep { mid, amp, center, width }),
        }
    }
}

impl SourceConfig {
    fn build(self) -> SourceModel {
        match self {
            SourceConfig::None => SourceModel::none(),
            SourceConfig::Eta => SourceModel::eta_times_control(),
            SourceConfig::Uniform => SourceModel::new(UniformControl { channel: 0 }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_horizon_is_named() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{"problem": {"flux": "burgers", "initial": "sine", "window": [-20, 20]}}"#,
        )
        .unwrap();
        let err = cfg.problem.build().unwrap_err();
        assert!(format!("{err:#}").contains("problem.horizon"));
    }

    #[test]
    fn inline_problem_builds() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{"problem": {"flux": {"polynomial": {"coeffs": [0, 0, 0.5], "range": [-10, 10]}},
                "initial": {"tanh": {"mid": 0.5, "amp": 1, "center": 0.3, "width": 0.4}},
                "horizon": 1.5, "window": [-4, 4]}}"#,
        )
        .unwrap();
        let spec = cfg.problem.build().unwrap();
        assert_eq!(spec.horizon, 1.5);
        assert!((spec.initial.eval(0.3) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn overrides_win() {
        let mut cfg = RunConfig::default();
        cfg.problem.preset = Some("burgers-sine".into());
        cfg.apply(&Overrides {
            horizon: Some(0.8),
            dt: Some(2e-3),
            ..Overrides::default()
        });
        assert_eq!(cfg.problem.build().unwrap().horizon, 0.8);
        assert_eq!(cfg.dt, Some(2e-3));
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), cfg);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"problem": {"preset": "prop11"}, "dtt": 1}"#).is_err());
    }
}
