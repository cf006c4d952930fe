mod common;

use common::{p, random_gauges, same_function};
use gaugeforge::calculus::{
    energy_balance_residual, energy_function, euler_lagrange, helmholtz_check, is_null, CalculusError, NullCertificate,
    FIRST_DERIVATIVE, NONDEGENERACY, SYMMETRIC_COUNTERPART,
};
use gaugeforge::dynamics::{simulate, OscillatorConfig, Trajectory};
use gaugeforge::gauge::{driven_lagrangian, gauge_scalar, Drive, LagrangianSpec};
use gaugeforge::sampling::{CheckOptions, Sampler};
use gaugeforge::{Bindings, Expr, Var};

fn residual(l: &str) -> Expr {
    euler_lagrange(&p(l)).unwrap().residual
}

fn max_abs(values: &[f64]) -> f64 {
    values.iter().map(|r| r.abs()).fold(0.0, f64::max)
}

#[test]
fn euler_lagrange_examples() {
    assert_eq!(residual("0.5*(v^2 - c*x^2)"), p("a + c*x").simplify());
    assert!(residual("C1*v*x + C2*(v*t + x) + C4*v + C6").is_zero());
    assert_eq!(residual("0.5*v^2"), Expr::a());
}

#[test]
fn lagrangian_with_acceleration_is_rejected() {
    assert!(matches!(
        euler_lagrange(&p("a*x")),
        Err(CalculusError::InvalidLagrangian(_))
    ));
}

#[test]
fn residual_without_kinetic_term_is_affine_in_acceleration() {
    for l in ["x*t + v*x^2", "sin(t)*v*x + exp(x)", "v*t^2 + x^3*cos(t)", "C1*v + x"] {
        let r = residual(l);
        assert!(r.diff(Var::A).diff(Var::A).is_zero(), "{l}: {r}");
        assert!(!r.depends_on(Var::A), "{l}: {r}");
    }
}

#[test]
fn euler_lagrange_is_linear() {
    let ls = [
        "0.5*v^2 - 2*x^2",
        "t*v*x + sin(x)",
        "exp(0.1*t)*v^2 + x*v",
        "C1*x^3 + v*cos(t)",
    ];
    for a in ls {
        for b in ls {
            let whole = residual(&format!("({a}) + 3*({b})"));
            let parts = residual(a) + 3.0 * residual(b);
            assert!(same_function(&whole, &parts), "{a} | {b}");
        }
    }
}

#[test]
fn total_derivatives_of_random_gauges_are_null() {
    for g in random_gauges(11, 40) {
        let l = gauge_scalar(&g).total_time_derivative().unwrap();
        let report = is_null(&l, &CheckOptions::default()).unwrap();
        assert!(report.certificate.is_null(), "{l}");
        let r = euler_lagrange(&l).unwrap().residual;
        let mut sampler = Sampler::new(3, &Bindings::new());
        for _ in 0..100 {
            assert!(r.eval(&sampler.draw(&r.constants())).unwrap().abs() < 1e-9);
        }
    }
}

#[test]
fn null_family_requires_the_constraints() {
    let family = |c3: &str, c5: &str| p(&format!("C1*v*x + C2*v*t + ({c3})*x*t + C4*v + ({c5})*x + C6"));
    let certified = is_null(&family("0", "C2"), &CheckOptions::default()).unwrap();
    assert_eq!(certified.certificate, NullCertificate::Symbolic);
    let broken = is_null(&family("1", "C2"), &CheckOptions::default()).unwrap();
    match broken.certificate {
        NullCertificate::NotNull { witness, residual } => {
            assert!(residual.abs() > 1e-9);
            assert!(witness.var(Var::T).is_some());
        }
        other => panic!("expected a witness, got {other:?}"),
    }
    let shifted = is_null(&family("0", "C2 + 1"), &CheckOptions::default()).unwrap();
    assert!(!shifted.certificate.is_null());
    assert_eq!(
        is_null(&Expr::zero(), &CheckOptions::default()).unwrap().certificate,
        NullCertificate::Symbolic
    );
}

#[test]
fn null_check_is_reproducible_per_seed() {
    let opts = CheckOptions::default().with_seed(99);
    let a = is_null(&p("x*t"), &opts).unwrap();
    let b = is_null(&p("x*t"), &opts).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.certificate.verdict(), "not_null");
}

#[test]
fn null_check_rejects_bad_options() {
    assert!(is_null(&p("x"), &CheckOptions::default().with_samples(0)).is_err());
    assert!(is_null(&p("x"), &CheckOptions::default().with_tol(0.0)).is_err());
}

#[test]
fn energy_function_examples() {
    let standard = energy_function(&p("0.5*(v^2 - omega0^2*x^2)")).unwrap();
    assert_eq!(standard, p("0.5*(v^2 + omega0^2*x^2)").simplify());
    let gauged = energy_function(&p("0.5*(v^2 - omega0^2*x^2) + C1*v*x + C2*(v*t + x) + C4*v + C6")).unwrap();
    assert_eq!(gauged, p("0.5*(v^2 + omega0^2*x^2) - (C2*x + C6)").simplify());
    assert!(energy_function(&Expr::zero()).unwrap().is_zero());
}

#[test]
fn time_independent_gauges_leave_the_energy_unchanged() {
    let l = p("0.5*(v^2 - 3*x^2) + x*v^3");
    for phi in ["0.5*C1*x^2", "C4*x", "sin(x)", "x^3 - 2*exp(x)"] {
        let gauged = l.clone() + p(phi).total_time_derivative().unwrap();
        let a = energy_function(&l).unwrap();
        let b = energy_function(&gauged).unwrap();
        assert!(same_function(&a, &b), "{phi}");
    }
}

#[test]
fn time_dependent_gauges_shift_the_energy_by_minus_the_partial_in_t() {
    let l = p("0.5*(v^2 - 3*x^2)");
    for phi in ["C2*x*t", "C6*t", "t^2*x^2", "sin(t)*x"] {
        let phi = p(phi);
        let gauged = l.clone() + phi.total_time_derivative().unwrap();
        let shift = energy_function(&gauged).unwrap() - energy_function(&l).unwrap();
        assert!(same_function(&shift, &-phi.diff(Var::T)), "{phi}");
    }
}

#[test]
fn helmholtz_accepts_undamped_equations_for_any_stiffness() {
    for c in ["-4", "0", "0.5", "9"] {
        let report = helmholtz_check(&p(&format!("a + ({c})*x")), &CheckOptions::default()).unwrap();
        assert!(report.overall, "c = {c}");
        assert!(report.witness.is_none());
    }
    assert!(helmholtz_check(&p("a"), &CheckOptions::default()).unwrap().overall);
}

#[test]
fn helmholtz_flags_damping_on_the_first_derivative_condition() {
    let report = helmholtz_check(&p("a + 0.3*v + c*x"), &CheckOptions::default()).unwrap();
    assert!(!report.overall);
    assert!(report.condition(NONDEGENERACY).unwrap().passed);
    let first = report.condition(FIRST_DERIVATIVE).unwrap();
    assert!(!first.passed);
    assert!((first.max_violation - 0.3).abs() < 1e-12);
    assert!(report.condition(SYMMETRIC_COUNTERPART).unwrap().passed);
    assert!(report.witness.is_some());
}

#[test]
fn helmholtz_overall_is_the_conjunction() {
    for phi in [
        "a + x",
        "a + 0.3*v",
        "t*a + v + x",
        "x*a + v^2",
        "a + v*x",
        "exp(t)*a + exp(t)*v + x",
    ] {
        let report = helmholtz_check(&p(phi), &CheckOptions::default()).unwrap();
        let all = report.conditions.iter().all(|c| c.passed);
        assert_eq!(report.overall, all, "{phi}");
    }
}

#[test]
fn helmholtz_passes_for_residuals_of_lagrangians() {
    for l in ["0.5*v^2 - 2*x^2", "exp(0.2*t)*(v^2 - x^2)", "0.5*x^2*v^2 + t*x"] {
        let r = residual(l);
        assert!(
            helmholtz_check(&r, &CheckOptions::default()).unwrap().overall,
            "{l}: {r}"
        );
    }
}

#[test]
fn helmholtz_rejects_non_second_order_input() {
    for phi in ["v + x", "a^2 + x", "sin(a)"] {
        assert!(
            matches!(
                helmholtz_check(&p(phi), &CheckOptions::default()),
                Err(CalculusError::NotSecondOrder { .. })
            ),
            "{phi}"
        );
    }
}

fn oscillator_run(omega0: f64, force: &str) -> Trajectory {
    let cfg = OscillatorConfig::oscillator(omega0).with_state(1.0, 0.0);
    simulate(&cfg, &p(force), &Bindings::new()).unwrap()
}

#[test]
fn balance_holds_for_the_undriven_oscillator() {
    let traj = oscillator_run(2.0, "0");
    let r = energy_balance_residual(&p("0.5*(v^2 - 4*x^2)"), &traj, &Bindings::new()).unwrap();
    assert_eq!(r.len(), traj.len());
    assert!(max_abs(&r) <= 1e-6, "{}", max_abs(&r));
}

#[test]
fn balance_holds_for_the_constant_force_driven_lagrangian() {
    let consts = Bindings::new().with("C2", 0.5).with("C6", 1.0);
    let spec = LagrangianSpec::new(1.0, 1.0).with_drive(Drive {
        force: p("C2"),
        shift: p("C6"),
    });
    let l = driven_lagrangian(&spec).unwrap();
    let cfg = OscillatorConfig::oscillator(1.0);
    let traj = simulate(&cfg, &p("C2"), &consts).unwrap();
    let r = energy_balance_residual(&l, &traj, &consts).unwrap();
    assert!(max_abs(&r) <= 1e-5, "{}", max_abs(&r));
}

#[test]
fn balance_holds_for_the_gauged_lagrangian_along_its_own_motion() {
    // The gauge terms leave the equation of motion undriven.
    let consts = Bindings::new()
        .with("C1", 0.3)
        .with("C2", 0.5)
        .with("C4", -1.0)
        .with("C6", 1.0);
    let l = p("0.5*(v^2 - x^2) + C1*v*x + C2*(v*t + x) + C4*v + C6");
    let traj = oscillator_run(1.0, "0");
    let r = energy_balance_residual(&l, &traj, &consts).unwrap();
    assert!(max_abs(&r) <= 1e-6, "{}", max_abs(&r));
}

#[test]
fn balance_exposes_a_mismatched_trajectory() {
    let traj = oscillator_run(2.2, "0");
    let r = energy_balance_residual(&p("0.5*(v^2 - 4*x^2)"), &traj, &Bindings::new()).unwrap();
    assert!(max_abs(&r) > 1e-2, "{}", max_abs(&r));
}

#[test]
fn balance_needs_three_samples() {
    let traj = Trajectory {
        t: vec![0.0, 1.0],
        x: vec![0.0; 2],
        v: vec![0.0; 2],
        ..Default::default()
    };
    assert_eq!(
        energy_balance_residual(&p("0.5*v^2"), &traj, &Bindings::new()),
        Err(CalculusError::TrajectoryTooShort(2))
    );
}
