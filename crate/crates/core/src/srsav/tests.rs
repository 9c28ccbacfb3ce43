use super::*;
use crate::fields::Grid;
use crate::psav::PsavStepper;
use std::f64::consts::PI;

const TAU: f64 = 2.0 * PI;

fn tg_grid(n: usize) -> Grid {
    Grid::periodic(n, n, (0.0, TAU, 0.0, TAU)).unwrap()
}

fn taylor_green(grid: Grid) -> VectorField {
    VectorField::from_fn(grid, |x, y| (-x.cos() * y.sin(), x.sin() * y.cos()))
}

fn sr_cfg(dt: f64, eps: f64, order: TimeOrder, s: usize) -> SrConfig {
    let mut cfg = SrConfig::new(SchemeConfig::new(dt, 1.0, eps, order));
    cfg.s = s;
    cfg
}

fn zero_state(grid: Grid) -> FlowState {
    FlowState::new(VectorField::zeros(grid), ScalarField::zeros(grid), 0.0)
}

#[test]
fn zero_data_gives_zero_trajectory() {
    let grid = tg_grid(8);
    let stepper = SrStepper::new(grid, sr_cfg(0.1, 1e-3, TimeOrder::First, 3), None).unwrap();
    let mut state = zero_state(grid);
    for _ in 0..3 {
        let (next, diag) = stepper.step_first_order(&state).unwrap();
        assert_eq!(next.u.linf(), 0.0);
        assert_eq!(next.p.norms().linf, 0.0);
        assert_eq!(next.q, 1.0);
        assert_eq!(diag.constraint_residual, 0.0);
        state = next;
    }
}

#[test]
fn zero_iterations_rejected() {
    let grid = tg_grid(8);
    assert!(SrStepper::new(grid, sr_cfg(0.1, 1e-3, TimeOrder::First, 0), None).is_err());
}

#[test]
fn damped_constraint_identity_is_definitional_first_order() {
    let grid = tg_grid(16);
    let stepper = SrStepper::new(grid, sr_cfg(0.05, 0.05, TimeOrder::First, 2), None).unwrap();
    let mut state = FlowState::new(taylor_green(grid), ScalarField::zeros(grid), 0.0);
    for _ in 0..4 {
        let (next, diag) = stepper.step_first_order(&state).unwrap();
        assert!(
            diag.constraint_residual <= 64.0 * f64::EPSILON,
            "relative constraint residual {:.3e}",
            diag.constraint_residual
        );
        state = next;
    }
}

#[test]
fn damped_constraint_identity_is_definitional_second_order() {
    let grid = tg_grid(16);
    let stepper = SrStepper::new(grid, sr_cfg(0.05, 0.05, TimeOrder::Second, 2), None).unwrap();
    let s0 = FlowState::new(taylor_green(grid), ScalarField::zeros(grid), 0.0);
    let (half, _) = stepper.start_second_order(&s0).unwrap();
    let (s1, d1) = stepper
        .step_second_order(&s0, &PrevState::HalfStep(&half))
        .unwrap();
    assert!(d1.constraint_residual <= 64.0 * f64::EPSILON);
    let (_, d2) = stepper
        .step_second_order(&s1, &PrevState::Previous(&s0))
        .unwrap();
    assert!(d2.constraint_residual <= 64.0 * f64::EPSILON);
}

#[test]
fn momentum_residual_of_final_iterate_is_small() {
    let grid = tg_grid(32);
    let mut cfg = sr_cfg(0.1, 1e-5, TimeOrder::First, 2);
    cfg.base.solver_tol = 1e-10;
    let stepper = SrStepper::new(grid, cfg, None).unwrap();
    let mut state = FlowState::new(taylor_green(grid), ScalarField::zeros(grid), 0.0);
    for _ in 0..3 {
        let (next, diag) = stepper.step_first_order(&state).unwrap();
        // gamma is (1/dt+beta)/eps here, so the measurement floor sits an
        // order of magnitude above the plain penalty scheme's
        assert!(
            diag.residual_momentum <= 1e-8,
            "momentum residual {:.3e}",
            diag.residual_momentum
        );
        state = next;
    }
}

#[test]
fn startup_equals_independent_half_step_rerun() {
    let grid = tg_grid(16);
    let dt = 0.08;
    let second = SrStepper::new(grid, sr_cfg(dt, 0.01, TimeOrder::Second, 2), None).unwrap();
    // a first-order SR stepper at dt/2 has the same damped operator
    let first = SrStepper::new(grid, sr_cfg(dt / 2.0, 0.01, TimeOrder::First, 2), None).unwrap();
    let s0 = FlowState::new(taylor_green(grid), ScalarField::zeros(grid), 0.0);
    let (a, _) = second.start_second_order(&s0).unwrap();
    let (b, _) = first.step_first_order(&s0).unwrap();
    assert_eq!(a.u.x, b.u.x);
    assert_eq!(a.u.y, b.u.y);
    assert_eq!(a.q, b.q);
}

#[test]
fn sr_divergence_is_far_below_plain_penalty() {
    // same eps, same dt, free decay: the damped recursion should keep
    // div(u) orders of magnitude below the penalty value eps*|p|.
    let grid = tg_grid(32);
    let dt = 1.0 / 16.0;
    let eps = 1e-3;
    let steps = 8;

    let psav = PsavStepper::new(grid, SchemeConfig::new(dt, 1.0, eps, TimeOrder::First), None)
        .unwrap();
    let mut ps = FlowState::new(taylor_green(grid), ScalarField::zeros(grid), 0.0);
    let mut div_psav = 0.0;
    for _ in 0..steps {
        let (next, diag) = psav.step_first_order(&ps).unwrap();
        div_psav = diag.div_linf;
        ps = next;
    }

    let sr = SrStepper::new(grid, sr_cfg(dt, eps, TimeOrder::First, 2), None).unwrap();
    let mut ss = FlowState::new(taylor_green(grid), ScalarField::zeros(grid), 0.0);
    let mut div_sr = 0.0;
    for _ in 0..steps {
        let (next, diag) = sr.step_first_order(&ss).unwrap();
        div_sr = diag.div_linf;
        ss = next;
    }
    assert!(
        div_sr < 1e-2 * div_psav,
        "sr div {div_sr:.3e} vs penalty div {div_psav:.3e}"
    );
}

#[test]
fn warm_start_changes_the_iteration_but_stays_stable() {
    let grid = tg_grid(16);
    let mut cold_cfg = sr_cfg(0.1, 0.05, TimeOrder::First, 1);
    let mut warm_cfg = cold_cfg;
    warm_cfg.warm_start = true;
    cold_cfg.warm_start = false;
    let cold = SrStepper::new(grid, cold_cfg, None).unwrap();
    let warm = SrStepper::new(grid, warm_cfg, None).unwrap();
    let mut sc = FlowState::new(taylor_green(grid), ScalarField::zeros(grid), 0.0);
    let mut sw = sc.clone();
    for _ in 0..3 {
        sc = cold.step_first_order(&sc).unwrap().0;
        sw = warm.step_first_order(&sw).unwrap().0;
        assert!(sw.u.linf().is_finite());
    }
    let mut diff = sc.u.clone();
    diff.axpy(-1.0, &sw.u);
    assert!(diff.linf() > 0.0, "warm start should alter the trajectory");
}

#[test]
fn energy_stays_bounded_on_free_decay() {
    let grid = tg_grid(16);
    for order in [TimeOrder::First, TimeOrder::Second] {
        let stepper = SrStepper::new(grid, sr_cfg(0.25, 1e-3, order, 2), None).unwrap();
        let s0 = FlowState::new(taylor_green(grid), ScalarField::zeros(grid), 0.0);
        let e0 = energy(&s0.u, s0.q);
        match order {
            TimeOrder::First => {
                let mut state = s0;
                for _ in 0..8 {
                    let (next, diag) = stepper.step_first_order(&state).unwrap();
                    assert!(diag.energy.is_finite() && diag.energy < 10.0 * e0.abs() + 1.0);
                    state = next;
                }
            }
            TimeOrder::Second => {
                let (half, _) = stepper.start_second_order(&s0).unwrap();
                let (mut state, _) = stepper
                    .step_second_order(&s0, &PrevState::HalfStep(&half))
                    .unwrap();
                let mut prev = s0;
                for _ in 0..8 {
                    let (next, diag) = stepper
                        .step_second_order(&state, &PrevState::Previous(&prev))
                        .unwrap();
                    assert!(diag.energy.is_finite() && diag.energy < 10.0 * e0.abs() + 1.0);
                    prev = state;
                    state = next;
                }
            }
        }
    }
}
