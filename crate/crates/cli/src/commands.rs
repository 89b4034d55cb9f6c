use std::f64::consts::PI;
use std::path::PathBuf;

use charshock::characteristics::{blowup_map, default_y_grid, genericity_scan, uniform_grid};
use charshock::io;
use charshock::models::{ControlSignal, ProblemSpec};
use charshock::optctl::{
    optimize, proposition11_experiment, terminal_shock_gap, CostSpec, Prop11Options,
};
use charshock::sensitivity::{cost_first_variation, linearized_along_fan, shock_shifts, Direction};
use charshock::shockfront::{build_solution, sample_profile, SolutionField};
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;

/// A failed stage, mapped to an exit status by the caller.
#[derive(Debug)]
pub enum Failure {
    Config(anyhow::Error),
    Solver(anyhow::Error),
    Check(Vec<String>),
}

impl From<charshock::Error> for Failure {
    fn from(e: charshock::Error) -> Self {
        Failure::Solver(e.into())
    }
}

pub type Outcome = Result<(), Failure>;

/// Output directory, the written files and the acceptance findings of a run.
pub struct Run<'a> {
    pub command: &'static str,
    pub config: &'a RunConfig,
    pub spec: ProblemSpec,
    pub out: PathBuf,
    files: Vec<String>,
    failures: Vec<String>,
    checks: Vec<String>,
}

impl<'a> Run<'a> {
    pub fn new(command: &'static str, config: &'a RunConfig) -> Result<Self, Failure> {
        let spec = config.problem.build().map_err(Failure::Config)?;
        let out = config.output_dir();
        std::fs::create_dir_all(&out).map_err(|e| Failure::Solver(e.into()))?;
        Ok(Run {
            command,
            config,
            spec,
            out,
            files: Vec::new(),
            failures: Vec::new(),
            checks: Vec::new(),
        })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.files.push(name.to_string());
        self.out.join(name)
    }

    fn check(&mut self, name: &str, ok: bool, detail: String) {
        let line = format!("{name}: {detail}");
        if !ok {
            self.failures.push(line.clone());
        }
        self.checks.push(format!("[{}] {line}", if ok { "pass" } else { "FAIL" }));
    }

    fn y_grid(&self) -> Vec<f64> {
        match self.config.ygrid {
            Some(n) => {
                let (a, b) = self.spec.characteristic_span();
                uniform_grid(a, b, n.max(4))
            }
            None => default_y_grid(&self.spec),
        }
    }

    fn dt(&self) -> f64 {
        self.config.dt.unwrap_or_else(|| self.spec.default_dt())
    }

    fn solve(&self) -> Result<SolutionField, Failure> {
        Ok(build_solution(&self.spec, &self.y_grid(), self.dt())?)
    }

    /// Writes the manifest; with `check` set, failed checks become an error.
    pub fn finish(mut self, check: bool) -> Outcome {
        let manifest = self.out.join("manifest.json");
        let checks = if check { Some(&self.checks) } else { None };
        self.files.sort();
        io::write_json(
            &manifest,
            &json!({
                "command": self.command,
                "version": env!("CARGO_PKG_VERSION"),
                "config": self.config,
                "files": self.files,
                "checks": checks,
            }),
        )?;
        for c in &self.checks {
            if check {
                println!("{c}");
            }
        }
        if check && !self.failures.is_empty() {
            return Err(Failure::Check(self.failures));
        }
        Ok(())
    }
}

fn is(run: &Run<'_>, name: &str) -> bool {
    run.config.problem.is_preset(name)
}

pub fn simulate(run: &mut Run<'_>) -> Outcome {
    let sol = run.solve()?;
    let horizon = run.spec.horizon;
    io::write_shocks(&run.path("shocks.csv"), &sol)?;
    io::write_events(&run.path("events.csv"), &sol)?;
    io::write_singular_points(&run.path("singular_points.csv"), &sol)?;
    let times = run
        .config
        .profile_times
        .clone()
        .unwrap_or_else(|| vec![0.0, 0.5 * horizon, horizon]);
    let (a, b) = run.spec.window;
    let xs = uniform_grid(a, b, run.config.profile_points.unwrap_or(401).max(2));
    let profiles = times
        .iter()
        .map(|&t| sample_profile(&sol, t, &xs))
        .collect::<charshock::Result<Vec<_>>>()?;
    io::write_profile(&run.path("profiles.csv"), &profiles)?;
    let formations: Vec<f64> = sol.events.iter().filter(|e| e.label() == "formation").map(|e| e.t).collect();
    let merges: Vec<(f64, f64)> = sol.events.iter().filter(|e| e.label() == "merge").map(|e| (e.t, e.x)).collect();
    io::write_json(
        &run.path("summary.json"),
        &json!({
            "shocks": sol.shocks.len(),
            "formations": formations.len(),
            "merges": merges.len(),
            "total_index": sol.total_index,
            "terminal_shock_gap": terminal_shock_gap(&sol),
        }),
    )?;

    if is(run, "burgers-sine") {
        let ok = formations.len() == 2 && formations.iter().all(|t| (t - 0.5).abs() < 1e-4);
        run.check("formations", ok, format!("{} at {formations:?}", formations.len()));
        if horizon > 1.0 + 1e-3 {
            let ok = merges.len() == 1 && (merges[0].0 - 1.0).abs() < 1e-3 && merges[0].1.abs() < 1e-3;
            run.check("merge", ok, format!("{merges:?}"));
        }
    } else if is(run, "constant-data") {
        run.check("no shocks", sol.shocks.is_empty(), format!("{} shocks", sol.shocks.len()));
    } else if is(run, "prop11") {
        run.check("formations", formations.len() == 2, format!("{formations:?}"));
    }
    Ok(())
}

pub fn blowup(run: &mut Run<'_>) -> Outcome {
    let map = blowup_map(&run.spec, &run.y_grid())?;
    io::write_blowup_map(&run.path("blowup_map.csv"), &map)?;
    io::write_seeds(&run.path("seeds.csv"), &map)?;
    if is(run, "burgers-sine") {
        let worst = map
            .grid
            .iter()
            .zip(&map.t_of_y)
            .filter_map(|(y, t)| t.map(|t| ((t * (1.0 - y.cos()) - 1.0).abs(), *y)))
            .fold(0.0f64, |m, (e, _)| m.max(e));
        run.check("closed form", worst < 1e-6, format!("max relative error {worst:e}"));
        let ok = map.seeds.len() == 2 && map.seeds.iter().all(|s| (s.y.abs() - PI).abs() < 1e-3);
        run.check("seeds", ok, format!("{} seeds", map.seeds.len()));
    }
    Ok(())
}

pub fn genericity(run: &mut Run<'_>) -> Outcome {
    let k = run.config.k.unwrap_or(2.0 * PI);
    if !(k > 0.0) {
        return Err(Failure::Config(anyhow::anyhow!("k: must be positive, got {k}")));
    }
    let horizon = run.spec.horizon;
    let nt = run.config.time_nodes.unwrap_or(101).max(2);
    let t_grid: Vec<f64> = (0..nt).map(|i| horizon * i as f64 / (nt - 1) as f64).collect();
    let y_grid = uniform_grid(-k, k, run.config.ygrid.unwrap_or(201).max(2));
    let report = genericity_scan(&run.spec, k, &t_grid, &y_grid)?;
    io::write_violations(&run.path("violations.csv"), &report)?;
    io::write_json(&run.path("genericity.json"), &report)?;
    if is(run, "burgers-sine") {
        let n = report.violations.len();
        run.check("violations", n == 0, format!("{n} cells"));
    }
    Ok(())
}

pub fn sensitivity(run: &mut Run<'_>) -> Outcome {
    let sol = run.solve()?;
    let horizon = run.spec.horizon;
    let direction = match &run.config.direction {
        Some(d) => d.clone(),
        None => Direction::Control(
            ControlSignal::new(
                vec![0.0, horizon],
                vec![vec![1.0; run.spec.control.dimension()]],
            )?,
        ),
    };
    let lin = linearized_along_fan(&sol, direction.clone()).map_err(|e| Failure::Config(e.into()))?;
    let shifts: Vec<_> = shock_shifts(&lin, direction.activation())?.into_iter().flatten().collect();
    io::write_shifts(&run.path("shifts.csv"), &shifts)?;
    let fv = cost_first_variation(&sol, &CostSpec::prop11(), direction)?;
    #[derive(Serialize)]
    struct Summary<'s> {
        first_variation: charshock::sensitivity::FirstVariation,
        zeta_end: Vec<(usize, f64)>,
        merged: Vec<(usize, Option<f64>)>,
        shock_count: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        note: Option<&'s str>,
    }
    let zeta_end: Vec<(usize, f64)> = shifts.iter().map(|s| (s.shock_id, s.zeta_end())).collect();
    let summary = Summary {
        first_variation: fv,
        merged: shifts.iter().map(|s| (s.shock_id, s.merged_at)).collect(),
        zeta_end: zeta_end.clone(),
        shock_count: sol.shocks.len(),
        note: (!fv.reliable).then_some("shocks meet at the horizon; the cost is not differentiable there"),
    };
    io::write_json(&run.path("sensitivity.json"), &summary)?;
    if is(run, "prop11") && zeta_end.len() == 2 {
        let odd = (zeta_end[0].1 + zeta_end[1].1).abs();
        run.check("mirrored shifts", odd < 1e-8, format!("|zeta1 + zeta2| = {odd:e}"));
        run.check("reliable", fv.reliable, format!("{fv:?}"));
    }
    Ok(())
}

pub fn optimize_cmd(run: &mut Run<'_>) -> Outcome {
    let opts = &run.config.optimize;
    let out_opts = charshock::optctl::OptimizeOptions {
        dt: opts.dt.or(run.config.dt),
        ..opts.clone()
    };
    if is(run, "prop11") {
        let delta = 1.0 - run.spec.horizon;
        let p = Prop11Options {
            intervals: run.spec.control.intervals(),
            optimize: out_opts,
            ..Prop11Options::default()
        };
        let (report, result, best) = proposition11_experiment(delta, &p)?;
        io::write_json(&run.path("prop11_report.json"), &report)?;
        io::write_cost_history(&run.path("cost_history.csv"), &result)?;
        io::write_alpha(&run.path("alpha_star.csv"), &result)?;
        io::write_shocks(&run.path("shocks.csv"), &best)?;
        run.check("two shocks", report.two_shocks, format!("formations at {:?}", report.formation_times));
        run.check("improved", report.improved, format!("J[0] = {}, J[a*] = {}", report.j_zero, report.j_star));
        run.check(
            "merge time",
            report.merge_in_band,
            format!("{:?} in [{}, {}]", report.merge_time, report.merge_band.0, report.merge_band.1),
        );
        run.check("tail check", report.tail_check.non_improving, format!("dJ = {:e}", report.tail_check.delta_j));
        run.check("scale check", report.scale_check.non_improving, format!("dJ = {:e}", report.scale_check.delta_j));
        return Ok(());
    }
    let cost = CostSpec::prop11();
    let alpha0 = run.spec.control.clone();
    let result = optimize(&run.spec, &cost, &alpha0, &out_opts)?;
    io::write_json(&run.path("optimization.json"), &result)?;
    io::write_cost_history(&run.path("cost_history.csv"), &result)?;
    io::write_alpha(&run.path("alpha_star.csv"), &result)?;
    let monotone = result.j_history.windows(2).all(|w| w[1] <= w[0]);
    run.check("monotone", monotone, format!("{} values", result.j_history.len()));
    Ok(())
}
