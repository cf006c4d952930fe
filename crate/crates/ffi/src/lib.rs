//! C ABI over `gaugeforge`.
//!
//! Objects cross the boundary as opaque handles (`GfExpr`, `GfBindings`,
//! `GfTrajectory`) that the caller releases with the matching `*_free`
//! function. Fallible calls return a [`GfStatus`] and write results through
//! out-pointers; the message of the last failure on the calling thread is
//! available from [`gf_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gaugeforge::calculus::{self, CalculusError, NullCertificate};
use gaugeforge::dynamics::{self, DynamicsError, OscillatorConfig, Trajectory};
use gaugeforge::expr::{self, Bindings, Expr, ExprError, Var};
use gaugeforge::gauge::{self, Drive, GaugeError, GaugeSet, LagrangianSpec};
use gaugeforge::sampling::CheckOptions;

/// Status code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Syntax = 3,
    UnknownIdentifier = 4,
    UnboundSymbol = 5,
    Domain = 6,
    HigherOrder = 7,
    InvalidLagrangian = 8,
    NotSecondOrder = 9,
    InvalidArgument = 10,
    NonFiniteState = 11,
    NotTimeOnly = 12,
    Internal = 13,
    Panic = 14,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GfVar {
    T = 0,
    X = 1,
    V = 2,
    A = 3,
}

impl From<GfVar> for Var {
    fn from(v: GfVar) -> Var {
        match v {
            GfVar::T => Var::T,
            GfVar::X => Var::X,
            GfVar::V => Var::V,
            GfVar::A => Var::A,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GfNullVerdict {
    CertifiedSymbolic = 0,
    CertifiedNumeric = 1,
    NotNull = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GfColumn {
    Time = 0,
    Position = 1,
    Velocity = 2,
    Energy = 3,
    Hamiltonian = 4,
    BalanceResidual = 5,
}

/// Time grid and initial state of `ẍ + stiffness·x = force(t)`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GfSimConfig {
    pub stiffness: f64,
    pub x0: f64,
    pub v0: f64,
    pub t0: f64,
    pub t_end: f64,
    pub dt: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct GfEnergySummary {
    pub max_energy_drift: f64,
    pub max_hamiltonian_drift: f64,
    pub max_balance_residual: f64,
    pub samples: usize,
}

/// Opaque expression handle.
pub struct GfExpr(Expr);

/// Opaque map from constant or variable names to values.
pub struct GfBindings(Bindings);

/// Opaque sampled trajectory.
pub struct GfTrajectory(Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let message = CString::new(message.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = message);
}

struct Failure(GfStatus, String);

impl Failure {
    fn null(what: &str) -> Failure {
        Failure(GfStatus::NullPointer, format!("{what} is null"))
    }

    fn invalid(message: impl Into<String>) -> Failure {
        Failure(GfStatus::InvalidArgument, message.into())
    }
}

impl From<ExprError> for Failure {
    fn from(e: ExprError) -> Failure {
        let status = match e {
            ExprError::Syntax { .. } => GfStatus::Syntax,
            ExprError::UnknownIdentifier { .. } => GfStatus::UnknownIdentifier,
            ExprError::UnboundSymbol(_) => GfStatus::UnboundSymbol,
            ExprError::Domain(_) => GfStatus::Domain,
            ExprError::HigherOrder => GfStatus::HigherOrder,
        };
        Failure(status, e.to_string())
    }
}

impl From<CalculusError> for Failure {
    fn from(e: CalculusError) -> Failure {
        let status = match e {
            CalculusError::Expr(inner) => return inner.into(),
            CalculusError::InvalidLagrangian(_) => GfStatus::InvalidLagrangian,
            CalculusError::NotSecondOrder { .. } => GfStatus::NotSecondOrder,
            CalculusError::TrajectoryTooShort(_) | CalculusError::InvalidOptions(_) => GfStatus::InvalidArgument,
            CalculusError::NoValidSamples(_) => GfStatus::Domain,
        };
        Failure(status, e.to_string())
    }
}

impl From<GaugeError> for Failure {
    fn from(e: GaugeError) -> Failure {
        let status = match e {
            GaugeError::Calculus(inner) => return inner.into(),
            GaugeError::NotTimeOnly { .. } => GfStatus::NotTimeOnly,
            GaugeError::MissingDrive => GfStatus::InvalidArgument,
            GaugeError::InternalNullViolation(_) => GfStatus::Internal,
        };
        Failure(status, e.to_string())
    }
}

impl From<DynamicsError> for Failure {
    fn from(e: DynamicsError) -> Failure {
        let status = match e {
            DynamicsError::Calculus(inner) => return inner.into(),
            DynamicsError::Gauge(inner) => return inner.into(),
            DynamicsError::Eval { source, .. } => return source.into(),
            DynamicsError::NonFiniteState { .. } => GfStatus::NonFiniteState,
            DynamicsError::ConflictingParameters(_)
            | DynamicsError::InvalidParameter(_)
            | DynamicsError::ForceContainsState(_)
            | DynamicsError::NotAffine(_) => GfStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

/// Runs `body`, records any failure for [`gf_last_error`] and converts it to
/// a status code.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> GfStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            GfStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            GfStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(GfStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure::null(what))
}

/// Nullable bindings argument; null means "no bindings".
unsafe fn bindings_arg(p: *const GfBindings) -> Bindings {
    p.as_ref().map(|b| b.0.clone()).unwrap_or_default()
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_expr(out: *mut *mut GfExpr, e: Expr) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::null("out"));
    }
    out.write(Box::into_raw(Box::new(GfExpr(e))));
    Ok(())
}

/// Message of the last failed call on this thread, or an empty string. The
/// pointer stays valid until the next call into this library on the same
/// thread.
#[no_mangle]
pub extern "C" fn gf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn gf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an expression; unknown identifiers become named constants.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gf_expr_parse(text: *const c_char, out: *mut *mut GfExpr) -> GfStatus {
    guard(|| {
        let e = expr::parse(str_arg(text, "text")?)?;
        put_expr(out, e)
    })
}

/// # Safety
/// `e` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gf_expr_free(e: *mut GfExpr) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Canonical text of `e`; free with [`gf_string_free`]. Null on a null handle.
///
/// # Safety
/// `e` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gf_expr_to_string(e: *const GfExpr) -> *mut c_char {
    match e.as_ref() {
        Some(e) => CString::new(e.0.to_string()).map_or(ptr::null_mut(), CString::into_raw),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `e` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gf_expr_simplify(e: *const GfExpr, out: *mut *mut GfExpr) -> GfStatus {
    guard(|| put_expr(out, handle(e, "e")?.0.simplify()))
}

/// # Safety
/// `e` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gf_expr_diff(e: *const GfExpr, var: GfVar, out: *mut *mut GfExpr) -> GfStatus {
    guard(|| put_expr(out, handle(e, "e")?.0.diff(var.into())))
}

/// # Safety
/// `e` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gf_expr_total_time_derivative(e: *const GfExpr, out: *mut *mut GfExpr) -> GfStatus {
    guard(|| put_expr(out, handle(e, "e")?.0.total_time_derivative()?))
}

/// Evaluates `e`; `b` may be null when `e` has no free symbols.
///
/// # Safety
/// `e` must be a live handle, `b` null or a live handle, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn gf_expr_eval(e: *const GfExpr, b: *const GfBindings, out: *mut f64) -> GfStatus {
    guard(|| {
        let value = handle(e, "e")?.0.eval(&bindings_arg(b))?;
        put(out, value, "out")
    })
}

#[no_mangle]
pub extern "C" fn gf_bindings_new() -> *mut GfBindings {
    Box::into_raw(Box::new(GfBindings(Bindings::new())))
}

/// Binds a variable (`t`, `x`, `v`, `a`) or a named constant.
///
/// # Safety
/// `b` must be a live handle and `name` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn gf_bindings_set(b: *mut GfBindings, name: *const c_char, value: f64) -> GfStatus {
    guard(|| {
        let b = b.as_mut().ok_or_else(|| Failure::null("b"))?;
        let name = str_arg(name, "name")?;
        if name.is_empty() {
            return Err(Failure::invalid("empty name"));
        }
        b.0.set(name, value);
        Ok(())
    })
}

/// # Safety
/// `b` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gf_bindings_free(b: *mut GfBindings) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}

/// Euler–Lagrange residual `d/dt(∂L/∂v) − ∂L/∂x`.
///
/// # Safety
/// `l` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gf_euler_lagrange(l: *const GfExpr, out: *mut *mut GfExpr) -> GfStatus {
    guard(|| put_expr(out, calculus::euler_lagrange(&handle(l, "l")?.0)?.residual))
}

/// Energy function `v ∂L/∂v − L`.
///
/// # Safety
/// `l` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gf_energy_function(l: *const GfExpr, out: *mut *mut GfExpr) -> GfStatus {
    guard(|| put_expr(out, calculus::energy_function(&handle(l, "l")?.0)?))
}

/// Null certificate of `l`. `max_residual` receives the largest sampled
/// residual (0 for a symbolic certificate, the offending value otherwise);
/// `witness`, when not null, receives the failing binding or null.
///
/// # Safety
/// Handles must be live; `fixed` may be null; out-pointers valid except
/// `witness`, which may be null.
#[no_mangle]
pub unsafe extern "C" fn gf_is_null(
    l: *const GfExpr,
    fixed: *const GfBindings,
    samples: usize,
    tol: f64,
    seed: u64,
    verdict: *mut GfNullVerdict,
    max_residual: *mut f64,
    witness: *mut *mut GfBindings,
) -> GfStatus {
    guard(|| {
        let opts = CheckOptions::default()
            .with_samples(samples)
            .with_tol(tol)
            .with_seed(seed)
            .with_fixed(bindings_arg(fixed));
        let report = calculus::is_null(&handle(l, "l")?.0, &opts)?;
        let (v, r, w) = match report.certificate {
            NullCertificate::Symbolic => (GfNullVerdict::CertifiedSymbolic, 0.0, None),
            NullCertificate::Numeric { max_residual } => (GfNullVerdict::CertifiedNumeric, max_residual, None),
            NullCertificate::NotNull { witness, residual } => (GfNullVerdict::NotNull, residual, Some(witness)),
        };
        put(verdict, v, "verdict")?;
        put(max_residual, r, "max_residual")?;
        if !witness.is_null() {
            let w = w.map_or(ptr::null_mut(), |b| Box::into_raw(Box::new(GfBindings(b))));
            witness.write(w);
        }
        Ok(())
    })
}

/// Helmholtz check of `phi = 0`. `overall` receives the verdict and
/// `passed[3]`, when not null, the three condition verdicts in the order
/// nondegeneracy, first-derivative, symmetric counterpart. `json`, when not
/// null, receives the full report (free with [`gf_string_free`]).
///
/// # Safety
/// `phi` must be a live handle, `overall` valid, `passed` null or pointing to
/// three writable bools, `json` null or valid.
#[no_mangle]
pub unsafe extern "C" fn gf_helmholtz_check(
    phi: *const GfExpr,
    samples: usize,
    tol: f64,
    seed: u64,
    overall: *mut bool,
    passed: *mut bool,
    json: *mut *mut c_char,
) -> GfStatus {
    guard(|| {
        let opts = CheckOptions::default()
            .with_samples(samples)
            .with_tol(tol)
            .with_seed(seed);
        let report = calculus::helmholtz_check(&handle(phi, "phi")?.0, &opts)?;
        put(overall, report.overall, "overall")?;
        if !passed.is_null() {
            for (i, c) in report.conditions.iter().enumerate() {
                passed.add(i).write(c.passed);
            }
        }
        if !json.is_null() {
            let text = serde_json::to_string(&report).map_err(|e| Failure(GfStatus::Internal, e.to_string()))?;
            json.write(CString::new(text).map_or(ptr::null_mut(), CString::into_raw));
        }
        Ok(())
    })
}

unsafe fn gauge_set(
    f1: *const GfExpr,
    f2: *const GfExpr,
    f4: *const GfExpr,
    f6: *const GfExpr,
) -> Result<GaugeSet, Failure> {
    let f = |p: *const GfExpr| p.as_ref().map_or_else(Expr::zero, |e| e.0.clone());
    Ok(GaugeSet::new(f(f1), f(f2), f(f4), f(f6))?)
}

/// Force `ℱ(t)` and shift `G(t)` of the gauge set `(f1, f2, f4, f6)`; null
/// gauge functions count as zero.
///
/// # Safety
/// Gauge handles must be null or live; `force` and `shift` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn gf_extract_force(
    f1: *const GfExpr,
    f2: *const GfExpr,
    f4: *const GfExpr,
    f6: *const GfExpr,
    force: *mut *mut GfExpr,
    shift: *mut *mut GfExpr,
) -> GfStatus {
    guard(|| {
        if force.is_null() || shift.is_null() {
            return Err(Failure::null("out"));
        }
        let Drive { force: f, shift: s } = gauge::extract_force(&gauge_set(f1, f2, f4, f6)?);
        put_expr(force, f)?;
        put_expr(shift, s)
    })
}

/// Null Lagrangian `dΦ/dt` of the gauge set; null gauge functions count as
/// zero.
///
/// # Safety
/// Gauge handles must be null or live; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gf_null_lagrangian(
    f1: *const GfExpr,
    f2: *const GfExpr,
    f4: *const GfExpr,
    f6: *const GfExpr,
    out: *mut *mut GfExpr,
) -> GfStatus {
    guard(|| put_expr(out, gauge::null_lagrangian_from_gauge(&gauge_set(f1, f2, f4, f6)?)?))
}

fn oscillator(cfg: &GfSimConfig) -> OscillatorConfig {
    OscillatorConfig::stiffness(cfg.stiffness)
        .with_state(cfg.x0, cfg.v0)
        .with_span(cfg.t0, cfg.t_end)
        .with_dt(cfg.dt)
}

/// RK4 integration of `ẍ + stiffness·x = force(t)`. `force` may be null for
/// the undriven system and `constants` null when the force has none.
///
/// # Safety
/// `cfg` and `out` valid pointers; handles null or live.
#[no_mangle]
pub unsafe extern "C" fn gf_simulate(
    cfg: *const GfSimConfig,
    force: *const GfExpr,
    constants: *const GfBindings,
    out: *mut *mut GfTrajectory,
) -> GfStatus {
    guard(|| {
        let cfg = handle(cfg, "cfg")?;
        let force = force.as_ref().map_or_else(Expr::zero, |f| f.0.clone());
        let traj = dynamics::simulate(&oscillator(cfg), &force, &bindings_arg(constants))?;
        put(out, Box::into_raw(Box::new(GfTrajectory(traj))), "out")
    })
}

/// Adds energy, standard energy and balance-residual columns for the
/// Lagrangian `½ c_o (v² − c x²) + force·x + shift`. Null `force`/`shift`
/// count as zero.
///
/// # Safety
/// `traj` and `out` valid; expression and bindings handles null or live;
/// `summary` null or valid.
#[no_mangle]
pub unsafe extern "C" fn gf_track_energy(
    traj: *const GfTrajectory,
    c_o: f64,
    c: f64,
    force: *const GfExpr,
    shift: *const GfExpr,
    constants: *const GfBindings,
    out: *mut *mut GfTrajectory,
    summary: *mut GfEnergySummary,
) -> GfStatus {
    guard(|| {
        let traj = handle(traj, "traj")?;
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let expr_or_zero = |p: *const GfExpr| p.as_ref().map_or_else(Expr::zero, |e| e.0.clone());
        let spec = LagrangianSpec::new(c_o, c).with_drive(Drive {
            force: expr_or_zero(force),
            shift: expr_or_zero(shift),
        });
        let (tracked, s) = dynamics::track_energy(&traj.0, &spec, &bindings_arg(constants))?;
        if !summary.is_null() {
            summary.write(GfEnergySummary {
                max_energy_drift: s.max_energy_drift,
                max_hamiltonian_drift: s.max_hamiltonian_drift,
                max_balance_residual: s.max_balance_residual,
                samples: s.samples,
            });
        }
        out.write(Box::into_raw(Box::new(GfTrajectory(tracked))));
        Ok(())
    })
}

/// Number of samples; 0 for a null handle.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gf_trajectory_len(traj: *const GfTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.len())
}

/// Borrowed view of one column, valid while `traj` lives. Columns that were
/// not computed yield `GF_STATUS_INVALID_ARGUMENT`.
///
/// # Safety
/// `traj` live; `data` and `len` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn gf_trajectory_column(
    traj: *const GfTrajectory,
    column: GfColumn,
    data: *mut *const f64,
    len: *mut usize,
) -> GfStatus {
    guard(|| {
        let t = &handle(traj, "traj")?.0;
        let col = match column {
            GfColumn::Time => Some(&t.t),
            GfColumn::Position => Some(&t.x),
            GfColumn::Velocity => Some(&t.v),
            GfColumn::Energy => t.energy.as_ref(),
            GfColumn::Hamiltonian => t.hamiltonian.as_ref(),
            GfColumn::BalanceResidual => t.balance_residual.as_ref(),
        }
        .ok_or_else(|| Failure::invalid(format!("column {column:?} was not computed")))?;
        put(data, col.as_ptr(), "data")?;
        put(len, col.len(), "len")
    })
}

/// Trajectory as CSV text; free with [`gf_string_free`]. Null on a null
/// handle.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gf_trajectory_to_csv(traj: *const GfTrajectory) -> *mut c_char {
    match traj.as_ref() {
        Some(t) => CString::new(t.0.to_csv_string()).map_or(ptr::null_mut(), CString::into_raw),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `traj` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gf_trajectory_free(traj: *mut GfTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}
