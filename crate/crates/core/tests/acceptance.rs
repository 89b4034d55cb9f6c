//! One pass/fail line per acceptance criterion; the test fails if any does.

use std::f64::consts::PI;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use charshock::characteristics::*;
use charshock::io;
use charshock::models::*;
use charshock::optctl::*;
use charshock::sensitivity::*;
use charshock::shockfront::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = (bool, String);

fn line(text: &str) {
    // bypasses the test harness capture so the lines land in the log
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{text}");
}

fn criterion(n: usize, title: &str, f: impl FnOnce() -> Verdict) -> bool {
    let start = Instant::now();
    let (pass, detail) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(v) => v,
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panicked: {msg}"))
        }
    };
    line(&format!(
        "criterion {n:>2} [{}] {title}: {detail} ({:.1} s)",
        if pass { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64()
    ));
    pass
}

fn within(elapsed: Duration, limit: f64) -> bool {
    elapsed.as_secs_f64() < limit
}

fn blowup_closed_form() -> Verdict {
    let start = Instant::now();
    // T(y) reaches 1/(1 - cos(pi/4)) ~ 3.41 on the sampled range
    let mut spec = burgers_sine(1.0).unwrap();
    spec.horizon = 3.5;
    spec.control = ControlSignal::zero(3.5);
    spec.fit_window();
    let ys: Vec<f64> = (0..100).map(|i| PI / 4.0 + 1.5 * PI * i as f64 / 99.0).collect();
    let map = blowup_map(&spec, &ys).unwrap();
    let mut worst: f64 = 0.0;
    let mut missing = 0;
    for (y, t) in ys.iter().zip(&map.t_of_y) {
        let exact = 1.0 / (1.0 - y.cos());
        match t {
            Some(t) => worst = worst.max(((t - exact) / exact).abs()),
            None => missing += 1,
        }
    }
    let elapsed = start.elapsed();
    (
        worst < 1e-6 && missing == 0 && within(elapsed, 5.0),
        format!("max rel err {worst:.2e} over 100 samples, {missing} missing, {elapsed:.2?}"),
    )
}

fn shock_formation(sol: &SolutionField) -> Verdict {
    let seeds = &sol.blowup.seeds;
    let ok = seeds.len() == 2
        && seeds.iter().zip([-1.0, 1.0]).all(|(s, sign)| {
            (s.y - sign * PI).abs() < 1e-3 && (s.tau - 0.5).abs() < 1e-4 && (s.x - sign * PI / 2.0).abs() < 1e-3
        });
    let desc: Vec<String> = seeds.iter().map(|s| format!("y {:.6} tau {:.8} x {:.6}", s.y, s.tau, s.x)).collect();
    (ok, desc.join("; "))
}

fn paths_and_merge(sol: &SolutionField, build_time: Duration) -> Verdict {
    let (a, b) = (&sol.shocks[0], &sol.shocks[1]);
    let mut worst: f64 = 0.0;
    for k in 0..=400 {
        let t = 0.55 + 0.4 * k as f64 / 400.0;
        worst = worst
            .max((a.position_at(t).unwrap() - PI * (t - 1.0)).abs())
            .max((b.position_at(t).unwrap() - PI * (1.0 - t)).abs());
    }
    let merges: Vec<&Event> = sol.events.iter().filter(|e| e.label() == "merge").collect();
    let merge_ok = merges.len() == 1 && (merges[0].t - 1.0).abs() < 1e-3 && merges[0].x.abs() < 1e-3;
    (
        worst < 2e-3 && merge_ok && within(build_time, 30.0),
        format!(
            "sup path error {worst:.2e}; merge at t = {:.6}, x = {:.1e}; build {build_time:.2?}",
            merges.first().map_or(f64::NAN, |m| m.t),
            merges.first().map_or(f64::NAN, |m| m.x)
        ),
    )
}

fn variational_consistency() -> Verdict {
    let spec = burgers_sine(1.0).unwrap();
    let h = 1e-3;
    let mut worst: f64 = 0.0;
    for y in [0.4, 1.3, 2.0, PI, 4.5, 5.9, -2.2] {
        let at = |y: f64| integrate_characteristic(&spec, y, 1.0, 1e-3).unwrap();
        let (c, m, p) = (at(y), at(y - h), at(y + h));
        for k in (0..c.states.len()).step_by(20) {
            let (s, a, b) = (&c.states[k], &m.states[k], &p.states[k]);
            for (exact, fd) in [
                (s.theta, (b.xi - a.xi) / (2.0 * h)),
                (s.theta_y, (b.theta - a.theta) / (2.0 * h)),
                (s.theta_yy, (b.theta_y - a.theta_y) / (2.0 * h)),
            ] {
                worst = worst.max((exact - fd).abs() / exact.abs().max(1.0));
            }
        }
    }
    (worst < 1e-4, format!("max error {worst:.2e} relative to max(|value|, 1)"))
}

fn conservation() -> Verdict {
    let base = burgers_sine(1.0).unwrap();
    let controlled = ProblemSpec::new(
        base.flux.clone(),
        SourceModel::eta_times_control(),
        ControlSignal::constant(1.0, 0.3).unwrap(),
        base.initial.clone(),
        1.0,
        base.window,
    )
    .unwrap();
    let windows = [(-1.0, 1.0), (-3.0, 0.0), (0.5, 2.5), (-3.0, 3.0)];
    let spans = [(0.0, 0.25), (0.3, 0.6), (0.6, 0.9)];
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for spec in [&base, &controlled] {
        let sol = build_default(spec).unwrap();
        for &(a, b) in &windows {
            for &(t0, t1) in &spans {
                worst = worst.max(weak_balance_residual(&sol, a, b, t0, t1).unwrap().residual);
                count += 1;
            }
        }
    }
    (worst < 1e-4, format!("max residual {worst:.2e} over {count} window/span pairs"))
}

fn singularity_indices() -> Verdict {
    let table = [
        ((1, 0, false), 0),
        ((0, 2, false), 0),
        ((0, 3, false), 1),
        ((2, 0, false), 1),
        ((0, 2, true), 1),
        ((1, 0, true), 1),
    ];
    let table_ok = table.iter().all(|&((m, n, term), idx)| singularity_index(m, n, term) == idx);
    let events = vec![
        Event::formation(0.3, -3.0, 10),
        Event::merge(0.3, -3.0, &[1, 2], Some(11)),
        Event::merge(0.5, -1.0, &[3, 4], Some(12)),
        Event::merge(0.5, -1.0, &[12, 5], Some(13)),
        Event::merge(1.0, 1.0, &[6, 7], None),
        Event::merge(1.0, 1.0, &[7, 8], None),
        Event::formation(1.0, 2.5, 14),
        Event::formation(0.2, 4.0, 15),
        Event::merge(0.7, 5.0, &[15, 9], Some(16)),
    ];
    let idx: Vec<i64> = classify_events(&events, 1.0, 1e-3).iter().map(|p| p.index).collect();
    (
        table_ok && idx == [2, 1, 2, 1, 0, 0],
        format!("index table {}; configuration indices {idx:?}", if table_ok { "exact" } else { "wrong" }),
    )
}

fn shift_differentials() -> Verdict {
    let bps = [0.0, 0.4, 0.8];
    let zero = ControlSignal::new(bps.to_vec(), vec![vec![0.0]; 2]).unwrap();
    let spec = prop11_problem(0.2, zero.clone()).unwrap();
    let base = build_default(&spec).unwrap();
    let dir = ControlSignal::new(bps.to_vec(), vec![vec![1.0]; 2]).unwrap();
    let lin = linearized_along_fan(&base, Direction::Control(dir.clone())).unwrap();
    let (z1, z2) = (shock_shift(&lin, 0, 0.0).unwrap(), shock_shift(&lin, 1, 0.0).unwrap());
    let odd = z1.samples.iter().zip(&z2.samples).map(|(a, b)| (a.zeta + b.zeta).abs()).fold(0.0, f64::max);
    let x2 = base.shocks[1].position_at(0.8).unwrap();
    let defect = |eps: f64| {
        let s = spec.with_control(zero.add_scaled(&dir, eps).unwrap()).unwrap();
        let sol = build_solution(&s, &default_y_grid(&s), s.default_dt()).unwrap();
        (sol.shocks[1].position_at(0.8).unwrap() - x2 - eps * z2.zeta_end()).abs() / eps
    };
    let (d1, d2) = (defect(1e-2), defect(1e-3));
    let ratio = d1 / d2;
    (
        (5.0..=20.0).contains(&ratio) && odd < 1e-8 && merge_time(&base).is_none(),
        format!(
            "zeta2(T) = {:.6}; defect/eps {d1:.2e} -> {d2:.2e}, ratio {ratio:.2}; max |zeta1 + zeta2| = {odd:.1e}",
            z2.zeta_end()
        ),
    )
}

fn lambda_partials_battery() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let (a, b, c): (f64, f64, f64) = (rng.gen_range(0.1..3.0), rng.gen_range(0.0..2.0), rng.gen_range(-1.0..1.0));
        let flux = FluxModel::polynomial(vec![0.0, c, a / 2.0, 0.0, b / 12.0], (-3.0, 3.0)).unwrap();
        let (up, um): (f64, f64) = (rng.gen_range(-2.5..2.5), rng.gen_range(-2.5..2.5));
        if up == um {
            continue;
        }
        let (dp, dm) = lambda_partials(&flux, up, um);
        ok &= dp > 0.0 && dm > 0.0;
        worst = worst.max((dp + dm - (flux.d1(up) - flux.d1(um)) / (up - um)).abs());
    }
    let (bp, bm) = lambda_partials(&FluxModel::burgers(), 1.7, -0.4);
    let burgers = (bp - 0.5).abs().max((bm - 0.5).abs());
    (
        ok && worst < 1e-10 && burgers < 1e-12,
        format!("positive: {ok}; sum identity error {worst:.1e}; Burgers |value - 1/2| {burgers:.1e}"),
    )
}

fn proposition11() -> Verdict {
    let start = Instant::now();
    let opts = Prop11Options::default();
    let (r, _, _) = proposition11_experiment(0.1, &opts).unwrap();
    let (r2, _, _) = proposition11_experiment(0.05, &opts).unwrap();
    let elapsed = start.elapsed();
    let formations_early = r.formation_times.iter().all(|&t| t < 0.55);
    let ok = r.two_shocks
        && formations_early
        && r.improved
        && r.merge_in_band
        && r.tail_check.non_improving
        && r.scale_check.non_improving
        && r2.l1_norm < r.l1_norm
        && within(elapsed, 600.0);
    (
        ok,
        format!(
            "delta 0.1: J {:.4} -> {:.4}, merge {:?} in [{:.3}, {:.3}], tail dJ {:.2e}, scale dJ {:.2e}, \
             formations {:?}; L1 {:.4} -> {:.4} at delta 0.05 (ratio {:.3}); {elapsed:.1?}",
            r.j_zero,
            r.j_star,
            r.merge_time,
            r.merge_band.0,
            r.merge_band.1,
            r.tail_check.delta_j,
            r.scale_check.delta_j,
            r.formation_times,
            r.l1_norm,
            r2.l1_norm,
            r2.l1_norm / r.l1_norm
        ),
    )
}

fn transversality() -> Verdict {
    let spec = burgers_sine(1.0).unwrap();
    let margins: Vec<f64> = [PI / 2.0, PI, 1.5 * PI]
        .iter()
        .map(|&y| transversality_witness(&spec, y).unwrap().margin)
        .collect();
    let mut controlled = spec.clone();
    controlled.source = SourceModel::eta_times_control();
    controlled.control = ControlSignal::constant(1.0, 0.5).unwrap();
    let tr = integrate_characteristic(&controlled, 1.3, 1.0, 1e-3).unwrap();
    let (x1, y1) = linearized_characteristic(&tr, (0.3, -0.2), None);
    let (x2, y2) = linearized_characteristic(&tr, (-1.1, 0.9), None);
    let (x3, y3) = linearized_characteristic(&tr, (-0.8, 0.7), None);
    let sup = (0..x1.len())
        .map(|k| (x1[k] + x2[k] - x3[k]).abs().max((y1[k] + y2[k] - y3[k]).abs()))
        .fold(0.0, f64::max);
    (
        margins.iter().all(|&m| m > 0.0) && sup < 1e-8,
        format!("margins {margins:.3?}; superposition defect {sup:.1e}"),
    )
}

fn write_all(dir: &std::path::Path, sol: &SolutionField) {
    io::write_shocks(&dir.join("shocks.csv"), sol).unwrap();
    io::write_events(&dir.join("events.csv"), sol).unwrap();
    io::write_singular_points(&dir.join("singular_points.csv"), sol).unwrap();
    let (a, b) = sol.spec.window;
    let xs = uniform_grid(a, b, 201);
    let t = sol.horizon();
    let profiles: Vec<_> = [0.0, 0.5 * t, t].iter().map(|&s| sample_profile(sol, s, &xs).unwrap()).collect();
    io::write_profile(&dir.join("profiles.csv"), &profiles).unwrap();
    io::write_blowup_map(&dir.join("blowup_map.csv"), &sol.blowup).unwrap();
}

fn determinism() -> Verdict {
    let tmp = tempfile::tempdir().unwrap();
    let mut identical = 0;
    let mut differing = Vec::new();
    for name in PRESETS {
        let spec = preset(name, None, None, None).unwrap();
        let (a, b) = (tmp.path().join(format!("{name}-1")), tmp.path().join(format!("{name}-2")));
        for d in [&a, &b] {
            std::fs::create_dir_all(d).unwrap();
            write_all(d, &build_default(&spec).unwrap());
        }
        for f in ["shocks.csv", "events.csv", "singular_points.csv", "profiles.csv", "blowup_map.csv"] {
            if std::fs::read(a.join(f)).unwrap() == std::fs::read(b.join(f)).unwrap() {
                identical += 1;
            } else {
                differing.push(format!("{name}/{f}"));
            }
        }
    }
    (
        differing.is_empty(),
        format!("{identical} CSV pairs byte-identical across {} presets; differing {differing:?}", PRESETS.len()),
    )
}

#[test]
fn acceptance_criteria() {
    let start = Instant::now();
    let sol = build_default(&burgers_sine(1.05).unwrap()).unwrap();
    let build_time = start.elapsed();
    let results = [
        criterion(1, "blow-up map", blowup_closed_form),
        criterion(2, "shock formation", || shock_formation(&sol)),
        criterion(3, "shock paths and merge", || paths_and_merge(&sol, build_time)),
        criterion(4, "variational consistency", variational_consistency),
        criterion(5, "conservation", conservation),
        criterion(6, "singularity indices", singularity_indices),
        criterion(7, "shift differentials", shift_differentials),
        criterion(8, "Rankine-Hugoniot speed partials", lambda_partials_battery),
        criterion(9, "terminal-merge optimum", proposition11),
        criterion(10, "transversality witness", transversality),
        criterion(11, "determinism", determinism),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, p)| !**p).map(|(i, _)| i + 1).collect();
    line(&format!("acceptance: {}/11 criteria pass", 11 - failed.len()));
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
