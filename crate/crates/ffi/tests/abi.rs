use std::ffi::{c_char, CStr, CString};
use std::ptr;

use gaugeforge_ffi::*;

fn parse(text: &str) -> *mut GfExpr {
    let text = CString::new(text).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { gf_expr_parse(text.as_ptr(), &mut out) }, GfStatus::Ok);
    out
}

fn text(e: *const GfExpr) -> String {
    unsafe {
        let s = gf_expr_to_string(e);
        let owned = CStr::from_ptr(s).to_str().unwrap().to_owned();
        gf_string_free(s);
        owned
    }
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(gf_last_error()).to_str().unwrap().to_owned() }
}

fn simplified(s: &str) -> String {
    let e = parse(s);
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(gf_expr_simplify(e, &mut out), GfStatus::Ok);
        let t = text(out);
        gf_expr_free(e);
        gf_expr_free(out);
        t
    }
}

#[test]
fn parse_errors_carry_status_and_message() {
    let input = CString::new("2*").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { gf_expr_parse(input.as_ptr(), &mut out) }, GfStatus::Syntax);
    assert!(out.is_null());
    assert!(last_error().contains('2'), "{}", last_error());
    assert_eq!(unsafe { gf_expr_parse(ptr::null(), &mut out) }, GfStatus::NullPointer);
    let bad = [0xffu8 as c_char, 0];
    assert_eq!(unsafe { gf_expr_parse(bad.as_ptr(), &mut out) }, GfStatus::InvalidUtf8);
}

#[test]
fn eval_and_bindings() {
    let e = parse("0.5*(v^2 - c*x^2)");
    unsafe {
        let b = gf_bindings_new();
        for (name, value) in [("v", 2.0), ("x", 1.0), ("c", 4.0)] {
            let name = CString::new(name).unwrap();
            assert_eq!(gf_bindings_set(b, name.as_ptr(), value), GfStatus::Ok);
        }
        let mut value = f64::NAN;
        assert_eq!(gf_expr_eval(e, b, &mut value), GfStatus::Ok);
        assert_eq!(value, 0.0);
        assert_eq!(gf_expr_eval(e, ptr::null(), &mut value), GfStatus::UnboundSymbol);

        let pole = parse("x/t");
        let b2 = gf_bindings_new();
        for (name, value) in [("x", 1.0), ("t", 0.0)] {
            let name = CString::new(name).unwrap();
            gf_bindings_set(b2, name.as_ptr(), value);
        }
        assert_eq!(gf_expr_eval(pole, b2, &mut value), GfStatus::Domain);
        gf_expr_free(pole);
        gf_bindings_free(b2);
        gf_bindings_free(b);
        gf_expr_free(e);
    }
}

#[test]
fn derivatives() {
    let e = parse("0.5*C1*x^2");
    unsafe {
        let mut d = ptr::null_mut();
        assert_eq!(gf_expr_diff(e, GfVar::X, &mut d), GfStatus::Ok);
        assert_eq!(text(d), simplified("C1*x"));
        gf_expr_free(d);
        assert_eq!(gf_expr_total_time_derivative(e, &mut d), GfStatus::Ok);
        assert_eq!(text(d), simplified("C1*x*v"));
        gf_expr_free(d);
        gf_expr_free(e);

        let jerk = parse("a*x");
        assert_eq!(gf_expr_total_time_derivative(jerk, &mut d), GfStatus::HigherOrder);
        gf_expr_free(jerk);
    }
}

#[test]
fn variational_operators() {
    unsafe {
        let l = parse("0.5*(v^2 - c*x^2)");
        let mut r = ptr::null_mut();
        assert_eq!(gf_euler_lagrange(l, &mut r), GfStatus::Ok);
        assert_eq!(text(r), simplified("a + c*x"));
        gf_expr_free(r);
        assert_eq!(gf_energy_function(l, &mut r), GfStatus::Ok);
        assert_eq!(text(r), simplified("0.5*(v^2 + c*x^2)"));
        gf_expr_free(r);
        gf_expr_free(l);

        let bad = parse("a*x");
        assert_eq!(gf_euler_lagrange(bad, &mut r), GfStatus::InvalidLagrangian);
        gf_expr_free(bad);
    }
}

#[test]
fn null_certificates() {
    unsafe {
        let mut verdict = GfNullVerdict::NotNull;
        let mut residual = f64::NAN;
        let mut witness = ptr::null_mut();
        let l = parse("C1*v*x + C2*(v*t + x) + C4*v + C6");
        assert_eq!(
            gf_is_null(l, ptr::null(), 1000, 1e-9, 1, &mut verdict, &mut residual, &mut witness),
            GfStatus::Ok
        );
        assert_eq!(verdict, GfNullVerdict::CertifiedSymbolic);
        assert!(witness.is_null());
        gf_expr_free(l);

        let l = parse("x*t");
        assert_eq!(
            gf_is_null(l, ptr::null(), 1000, 1e-9, 1, &mut verdict, &mut residual, &mut witness),
            GfStatus::Ok
        );
        assert_eq!(verdict, GfNullVerdict::NotNull);
        assert!(!witness.is_null());
        // The residual of x*t is -t, so it equals minus the witness time.
        let minus_t = parse("-t");
        let mut value = f64::NAN;
        assert_eq!(gf_expr_eval(minus_t, witness, &mut value), GfStatus::Ok);
        assert_eq!(value, residual);
        gf_expr_free(minus_t);
        gf_bindings_free(witness);
        assert_eq!(
            gf_is_null(l, ptr::null(), 0, 1e-9, 1, &mut verdict, &mut residual, ptr::null_mut()),
            GfStatus::InvalidArgument
        );
        gf_expr_free(l);
    }
}

#[test]
fn helmholtz() {
    unsafe {
        let mut overall = false;
        let mut passed = [false; 3];
        let mut json = ptr::null_mut();
        let phi = parse("a + 0.3*v + 4*x");
        assert_eq!(
            gf_helmholtz_check(phi, 1000, 1e-9, 7, &mut overall, passed.as_mut_ptr(), &mut json),
            GfStatus::Ok
        );
        assert!(!overall);
        assert_eq!(passed, [true, false, true]);
        let report: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(report["conditions"][1]["name"], "first_derivative");
        gf_string_free(json);
        gf_expr_free(phi);

        let phi = parse("v + x");
        assert_eq!(
            gf_helmholtz_check(phi, 1000, 1e-9, 7, &mut overall, ptr::null_mut(), ptr::null_mut()),
            GfStatus::NotSecondOrder
        );
        gf_expr_free(phi);
    }
}

#[test]
fn gauge_pipeline() {
    unsafe {
        let f2 = parse("sin(nu*t)");
        let (mut force, mut shift) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(
            gf_extract_force(ptr::null(), f2, ptr::null(), ptr::null(), &mut force, &mut shift),
            GfStatus::Ok
        );
        assert_eq!(text(force), simplified("sin(nu*t) + nu*t*cos(nu*t)"));
        assert_eq!(text(shift), "0");
        gf_expr_free(force);
        gf_expr_free(shift);

        let mut l = ptr::null_mut();
        let f1 = parse("t");
        assert_eq!(
            gf_null_lagrangian(f1, ptr::null(), ptr::null(), ptr::null(), &mut l),
            GfStatus::Ok
        );
        assert_eq!(text(l), simplified("t*v*x + 0.5*x^2"));
        gf_expr_free(l);

        let bad = parse("x");
        assert_eq!(
            gf_null_lagrangian(bad, ptr::null(), ptr::null(), ptr::null(), &mut l),
            GfStatus::NotTimeOnly
        );
        for e in [f1, f2, bad] {
            gf_expr_free(e);
        }
    }
}

#[test]
fn simulation_and_energy() {
    let cfg = GfSimConfig {
        stiffness: 1.0,
        x0: 0.0,
        v0: 0.0,
        t0: 0.0,
        t_end: 10.0,
        dt: 1e-3,
    };
    unsafe {
        let force = parse("F");
        let consts = gf_bindings_new();
        let name = CString::new("F").unwrap();
        gf_bindings_set(consts, name.as_ptr(), 0.5);
        let mut traj = ptr::null_mut();
        assert_eq!(gf_simulate(&cfg, force, consts, &mut traj), GfStatus::Ok);
        assert_eq!(gf_trajectory_len(traj), 10_001);

        let (mut t, mut x, mut n) = (ptr::null(), ptr::null(), 0usize);
        assert_eq!(gf_trajectory_column(traj, GfColumn::Time, &mut t, &mut n), GfStatus::Ok);
        assert_eq!(
            gf_trajectory_column(traj, GfColumn::Position, &mut x, &mut n),
            GfStatus::Ok
        );
        let (t, x) = (std::slice::from_raw_parts(t, n), std::slice::from_raw_parts(x, n));
        let err = t
            .iter()
            .zip(x)
            .map(|(t, x)| (x - 0.5 * (1.0 - t.cos())).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-6, "{err}");
        let mut missing = ptr::null();
        assert_eq!(
            gf_trajectory_column(traj, GfColumn::Energy, &mut missing, &mut n),
            GfStatus::InvalidArgument
        );

        let shift = parse("1");
        let mut tracked = ptr::null_mut();
        let mut summary = GfEnergySummary::default();
        assert_eq!(
            gf_track_energy(traj, 1.0, 1.0, force, shift, consts, &mut tracked, &mut summary),
            GfStatus::Ok
        );
        assert!(summary.max_energy_drift <= 1e-6);
        assert!(summary.max_hamiltonian_drift >= 0.1);
        assert!(summary.max_balance_residual <= 1e-5);
        let mut e = ptr::null();
        assert_eq!(
            gf_trajectory_column(tracked, GfColumn::Energy, &mut e, &mut n),
            GfStatus::Ok
        );
        assert_eq!(n, 10_001);

        let csv = gf_trajectory_to_csv(tracked);
        assert!(CStr::from_ptr(csv)
            .to_str()
            .unwrap()
            .starts_with("t,x,v,E,H,balance_residual\n"));
        gf_string_free(csv);

        gf_trajectory_free(tracked);
        gf_trajectory_free(traj);
        gf_expr_free(shift);
        gf_expr_free(force);
        gf_bindings_free(consts);

        let bad = GfSimConfig { dt: -1.0, ..cfg };
        assert_eq!(
            gf_simulate(&bad, ptr::null(), ptr::null(), &mut traj),
            GfStatus::InvalidArgument
        );
        let blowup = GfSimConfig {
            stiffness: -1e6,
            x0: 1.0,
            dt: 0.1,
            ..cfg
        };
        assert_eq!(
            gf_simulate(&blowup, ptr::null(), ptr::null(), &mut traj),
            GfStatus::NonFiniteState
        );
    }
}

#[test]
fn free_functions_accept_null() {
    unsafe {
        gf_expr_free(ptr::null_mut());
        gf_bindings_free(ptr::null_mut());
        gf_trajectory_free(ptr::null_mut());
        gf_string_free(ptr::null_mut());
        assert!(gf_expr_to_string(ptr::null()).is_null());
        assert_eq!(gf_trajectory_len(ptr::null()), 0);
    }
}
