use std::f64::consts::PI;

use charshock::models::*;
use charshock::optctl::*;
use charshock::shockfront::build_default;

fn prop11(delta: f64, values: &[f64]) -> ProblemSpec {
    prop11_problem(delta, ControlSignal::uniform(1.0 - delta, values).unwrap()).unwrap()
}

#[test]
fn psi_well_shape() {
    assert_eq!(psi_well(0.0), 1.0);
    assert_eq!(psi_well(1.0), 0.0);
    assert_eq!(psi_well(-1.5), 0.0);
    assert!((psi_well(0.5) - 0.5625).abs() < 1e-15);
    assert!((0..200).all(|i| psi_well(-3.0 + 0.03 * i as f64) >= 0.0));
}

#[test]
fn uncontrolled_terminal_cost_is_the_middle_gap() {
    let spec = prop11(0.1, &[0.0]);
    let sol = build_default(&spec).unwrap();
    let c = evaluate_cost(&sol, &CostSpec::prop11()).unwrap();
    assert_eq!(c.running, 0.0);
    // Ψ <= 1 with Ψ(0) = 1 on a middle region of width 2πδ
    assert!(c.total > 0.55 && c.total < 2.0 * PI * 0.1, "J = {}", c.total);
    let gap = terminal_shock_gap(&sol);
    assert!((gap - 2.0 * PI * 0.1).abs() < 1e-3, "gap {gap}");
    let at_t = sol.shocks_at(0.9);
    assert!((at_t[0].1 + at_t[1].1).abs() < 1e-6);
    assert!((total_cost(&spec, &CostSpec::prop11()).unwrap() - c.total).abs() < 1e-12);
}

#[test]
fn energy_only_cost() {
    for c in [0.0, 0.3, -1.2] {
        let spec = prop11(0.2, &[c]);
        let j = total_cost(&spec, &CostSpec::control_energy()).unwrap();
        assert!((j - c * c * 0.8).abs() < 1e-12, "c = {c}");
    }
    let spec = prop11(0.2, &[0.5, -0.25]);
    let j = total_cost(&spec, &CostSpec::prop11().with_terminal_scale(0.0)).unwrap();
    assert!((j - (0.25 + 0.0625) * 0.4).abs() < 1e-12);
}

#[test]
fn early_merge_leaves_only_running_cost() {
    let spec = prop11(0.1, &[1.0]);
    let sol = build_default(&spec).unwrap();
    let t = merge_time(&sol).unwrap();
    assert!(t < 0.85, "merge at {t}");
    let c = evaluate_cost(&sol, &CostSpec::prop11()).unwrap();
    assert!(c.terminal.abs() < 1e-6, "terminal {}", c.terminal);
    assert!((c.total - 0.9).abs() < 1e-6);
}

#[test]
fn merge_times() {
    let sol = build_default(&burgers_sine(1.05).unwrap()).unwrap();
    assert!((merge_time(&sol).unwrap() - 1.0).abs() < 1e-3);
    assert_eq!(merge_time(&build_default(&burgers_sine(0.9).unwrap()).unwrap()), None);
    assert_eq!(merge_time(&build_default(&constant_data(0.5, 1.0).unwrap()).unwrap()), None);
    let spec = burgers_sine(0.9).unwrap();
    let y = charshock::characteristics::default_y_grid(&spec.with_horizon(0.95).unwrap());
    let t = merge_time_extended(&spec, &y, 1e-3, 0.15).unwrap().unwrap();
    assert!((t - 1.0).abs() < 1e-3);
}

fn coarse() -> OptimizeOptions {
    OptimizeOptions {
        dt: Some(2e-3),
        y_spacing: Some(0.05),
        ..OptimizeOptions::default()
    }
}

#[test]
fn energy_only_optimum_is_zero() {
    let spec = prop11(0.2, &[0.0; 4]);
    let alpha0 = ControlSignal::uniform(0.8, &[0.7, -0.3, 1.1, 0.2]).unwrap();
    for cost in [CostSpec::control_energy(), CostSpec::prop11().with_terminal_scale(0.0)] {
        let r = optimize(&spec, &cost, &alpha0, &coarse()).unwrap();
        assert!(r.iterations <= 5, "{} iterations", r.iterations);
        assert!(r.alpha_star.flat_values().iter().all(|v| v.abs() < 1e-6));
        assert!(r.j_history.last().unwrap().abs() < 1e-10);
        assert!(r.j_history.windows(2).all(|w| w[1] <= w[0]));
    }
}

#[test]
fn gradient_methods_agree_without_terminal_merge() {
    let spec = prop11(0.2, &[0.1; 4]);
    let cost = CostSpec::prop11();
    let fd_opts = OptimizeOptions {
        fd_step: 1e-5,
        ..OptimizeOptions::default()
    };
    let mut ev = Evaluator::new(&spec, &cost, 2.0, &fd_opts).unwrap();
    let fd = ev.gradient(&spec.control, &fd_opts).unwrap();
    let fv_opts = OptimizeOptions {
        gradient: GradientMethod::FirstVariation,
        ..fd_opts
    };
    let fv = ev.gradient(&spec.control, &fv_opts).unwrap();
    for (a, b) in fd.iter().zip(&fv) {
        assert!(((a - b) / a).abs() < 1e-2, "{fd:?} vs {fv:?}");
    }
}

#[test]
fn coarse_prop11_descent() {
    let spec = prop11(0.1, &[0.0; 4]);
    let r = optimize(&spec, &CostSpec::prop11(), &spec.control, &coarse()).unwrap();
    assert!(r.j_history.windows(2).all(|w| w[1] <= w[0]));
    assert!(r.j_history.last().unwrap() < &(0.5 * r.j_history[0]));
    assert!(r.alpha_star.flat_values().iter().all(|&v| v >= -1e-6));
    let t = r.merge_time.unwrap();
    assert!((t - 0.9).abs() < 0.02, "merge at {t}");
}

#[test]
fn option_validation() {
    let spec = prop11(0.2, &[0.0; 2]);
    let bad = OptimizeOptions {
        bounds: (1.0, -1.0),
        ..OptimizeOptions::default()
    };
    assert!(optimize(&spec, &CostSpec::prop11(), &spec.control, &bad).is_err());
    let short = ControlSignal::uniform(0.5, &[0.0]).unwrap();
    assert!(optimize(&spec, &CostSpec::prop11(), &short, &OptimizeOptions::default()).is_err());
}
