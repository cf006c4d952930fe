//! Variational operators on Lagrangians `L(t, x, v)`.
//!
//! * [`euler_lagrange`]: the residual `d/dt(∂L/∂v) − ∂L/∂x`, an expression
//!   in `(t, x, v, a)`.
//! * [`is_null`]: two-tier null certificate. A residual that simplifies to the
//!   literal `0` is certified symbolically; otherwise it is sampled on
//!   [−10, 10]⁴ with free constants in [−5, 5].
//! * [`helmholtz_check`]: the three Helmholtz conditions for a single
//!   second-order equation `Φ(t, x, v, a) = 0` affine in `a`:
//!   1. nondegeneracy, `∂Φ/∂a ≠ 0` on the sample domain;
//!   2. first-derivative condition, `∂Φ/∂v = d/dt(∂Φ/∂a)`, checked with `a`
//!      taken from the equation itself;
//!   3. the symmetric counterpart `∂Φ/∂x − ∂Φ/∂x = ½ d/dt(∂Φ/∂v − ∂Φ/∂v)`,
//!      which holds identically for one dependent variable and is evaluated
//!      as such.
//! * [`energy_function`] and [`energy_balance_residual`]: `E = v ∂L/∂v − L`
//!   and the sampled balance `dE/dt + ∂L/∂t` along a trajectory.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::dynamics::Trajectory;
use crate::expr::{Bindings, Expr, ExprError, Var};
use crate::sampling::{self, CheckOptions, Sampler};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CalculusError {
    #[error("invalid Lagrangian `{0}`: it must not depend on the acceleration `a`")]
    InvalidLagrangian(String),
    #[error("`{expr}` is not a second-order equation: {reason}")]
    NotSecondOrder { expr: String, reason: &'static str },
    #[error("trajectory too short: {0} samples, need at least 3")]
    TrajectoryTooShort(usize),
    #[error("invalid check options: {0}")]
    InvalidOptions(&'static str),
    #[error("no sample point avoided the poles of `{0}`")]
    NoValidSamples(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Euler–Lagrange residual of a Lagrangian.
#[derive(Debug, Clone, PartialEq)]
pub struct ElResidual {
    pub lagrangian: Expr,
    pub residual: Expr,
}

fn require_lagrangian(l: &Expr) -> Result<Expr, CalculusError> {
    let simplified = l.simplify();
    if simplified.depends_on(Var::A) {
        return Err(CalculusError::InvalidLagrangian(l.to_string()));
    }
    Ok(simplified)
}

pub fn euler_lagrange(l: &Expr) -> Result<ElResidual, CalculusError> {
    let l = require_lagrangian(l)?;
    let momentum = l.diff(Var::V);
    let residual = (momentum.total_time_derivative()? - l.diff(Var::X)).simplify();
    Ok(ElResidual {
        lagrangian: l,
        residual,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum NullCertificate {
    /// The residual simplified to the literal `0`.
    Symbolic,
    /// Every sampled residual stayed within tolerance.
    Numeric { max_residual: f64 },
    /// First sampled point whose residual exceeded tolerance.
    NotNull { witness: Bindings, residual: f64 },
}

impl NullCertificate {
    pub fn is_null(&self) -> bool {
        !matches!(self, NullCertificate::NotNull { .. })
    }

    pub fn verdict(&self) -> &'static str {
        match self {
            NullCertificate::Symbolic => "certified_symbolic",
            NullCertificate::Numeric { .. } => "certified_numeric",
            NullCertificate::NotNull { .. } => "not_null",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NullReport {
    pub lagrangian: Expr,
    pub residual: Expr,
    pub certificate: NullCertificate,
}

fn check_options(opts: &CheckOptions) -> Result<(), CalculusError> {
    if opts.samples == 0 {
        return Err(CalculusError::InvalidOptions("samples must be at least 1"));
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(CalculusError::InvalidOptions("tolerance must be positive"));
    }
    Ok(())
}

pub fn is_null(l: &Expr, opts: &CheckOptions) -> Result<NullReport, CalculusError> {
    check_options(opts)?;
    let ElResidual { lagrangian, residual } = euler_lagrange(l)?;
    if residual.is_zero() {
        return Ok(NullReport {
            lagrangian,
            residual,
            certificate: NullCertificate::Symbolic,
        });
    }
    let constants = residual.constants();
    let mut sampler = Sampler::new(opts.seed, &opts.fixed);
    let mut evaluated = 0;
    let mut max_residual: f64 = 0.0;
    for _ in 0..opts.samples * 10 {
        if evaluated == opts.samples {
            break;
        }
        let b = sampler.draw(&constants);
        let value = match residual.eval(&b) {
            Ok(value) => value,
            Err(ExprError::Domain(_)) => continue,
            Err(err) => return Err(err.into()),
        };
        evaluated += 1;
        if value.abs() > opts.tol {
            let certificate = NullCertificate::NotNull {
                witness: b,
                residual: value,
            };
            return Ok(NullReport {
                lagrangian,
                residual,
                certificate,
            });
        }
        max_residual = max_residual.max(value.abs());
    }
    if evaluated == 0 {
        return Err(CalculusError::NoValidSamples(residual.to_string()));
    }
    Ok(NullReport {
        lagrangian,
        residual,
        certificate: NullCertificate::Numeric { max_residual },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionResult {
    pub name: &'static str,
    pub passed: bool,
    /// Whether the verdict was settled by simplification alone.
    #[serde(skip)]
    pub symbolic: bool,
    pub max_violation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HelmholtzReport {
    pub equation: Expr,
    pub conditions: [ConditionResult; 3],
    pub overall: bool,
    pub witness: Option<Bindings>,
}

impl HelmholtzReport {
    pub fn condition(&self, name: &str) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

pub const NONDEGENERACY: &str = "nondegeneracy";
pub const FIRST_DERIVATIVE: &str = "first_derivative";
pub const SYMMETRIC_COUNTERPART: &str = "symmetric_counterpart";

pub fn helmholtz_check(phi: &Expr, opts: &CheckOptions) -> Result<HelmholtzReport, CalculusError> {
    check_options(opts)?;
    let phi = phi.simplify();
    let not_second_order = |reason| CalculusError::NotSecondOrder {
        expr: phi.to_string(),
        reason,
    };
    let lead = phi.diff(Var::A);
    if sampling::is_identically_zero(&lead, opts) {
        return Err(not_second_order("no dependence on the acceleration"));
    }
    if !sampling::is_identically_zero(&lead.diff(Var::A), opts) {
        return Err(not_second_order("nonlinear in the acceleration"));
    }
    let lead_rate = lead
        .total_time_derivative()
        .map_err(|_| not_second_order("nonlinear in the acceleration"))?;
    let rest = phi.substitute_var(Var::A, &Expr::zero()).simplify();
    let first_derivative = (phi.diff(Var::V) - lead_rate).simplify();
    // With one dependent variable the antisymmetric parts ∂Φ/∂x − ∂Φ/∂x and
    // ∂Φ/∂v − ∂Φ/∂v cancel term by term.
    let phi_x = phi.diff(Var::X);
    let symmetric = (phi_x.clone() - phi_x).simplify();

    let mut constants = phi.constants();
    constants.extend(first_derivative.constants());
    let mut sampler = Sampler::new(opts.seed, &opts.fixed);
    let mut min_lead = f64::INFINITY;
    let mut min_lead_at = None;
    let mut worst = [0.0_f64; 2];
    let mut worst_at: [Option<Bindings>; 2] = [None, None];
    let mut evaluated = 0;
    for _ in 0..opts.samples * 10 {
        if evaluated == opts.samples {
            break;
        }
        let mut b = sampler.draw(&constants);
        let (Ok(lead_value), Ok(rest_value)) = (lead.eval(&b), rest.eval(&b)) else {
            continue;
        };
        if lead_value.abs() < min_lead {
            min_lead = lead_value.abs();
            min_lead_at = Some(b.clone());
        }
        if lead_value == 0.0 {
            evaluated += 1;
            continue;
        }
        // Evaluate along the motion the equation itself prescribes.
        b.set_var(Var::A, -rest_value / lead_value);
        let (Ok(r2), Ok(r3)) = (first_derivative.eval(&b), symmetric.eval(&b)) else {
            continue;
        };
        evaluated += 1;
        for (slot, value) in [r2, r3].into_iter().enumerate() {
            if value.abs() > worst[slot] || worst_at[slot].is_none() {
                worst[slot] = value.abs();
                worst_at[slot] = Some(b.clone());
            }
        }
    }
    if evaluated == 0 {
        return Err(CalculusError::NoValidSamples(phi.to_string()));
    }

    let lead_is_literal = lead.as_number().is_some_and(|c| c != 0.0);
    let nondegenerate = ConditionResult {
        name: NONDEGENERACY,
        passed: min_lead > opts.tol,
        symbolic: lead_is_literal,
        max_violation: (opts.tol - min_lead).max(0.0),
    };
    let second = ConditionResult {
        name: FIRST_DERIVATIVE,
        passed: first_derivative.is_zero() || worst[0] <= opts.tol,
        symbolic: first_derivative.is_zero(),
        max_violation: if first_derivative.is_zero() { 0.0 } else { worst[0] },
    };
    let third = ConditionResult {
        name: SYMMETRIC_COUNTERPART,
        passed: symmetric.is_zero() || worst[1] <= opts.tol,
        symbolic: symmetric.is_zero(),
        max_violation: if symmetric.is_zero() { 0.0 } else { worst[1] },
    };
    let witness = if !nondegenerate.passed {
        min_lead_at
    } else if !second.passed {
        worst_at[0].clone()
    } else if !third.passed {
        worst_at[1].clone()
    } else {
        None
    };
    let overall = nondegenerate.passed && second.passed && third.passed;
    Ok(HelmholtzReport {
        equation: phi,
        conditions: [nondegenerate, second, third],
        overall,
        witness,
    })
}

/// `v ∂L/∂v − L`, simplified.
pub fn energy_function(l: &Expr) -> Result<Expr, CalculusError> {
    let l = require_lagrangian(l)?;
    Ok((Expr::v() * l.diff(Var::V) - l).simplify())
}

/// Weights of the first derivative at `z` from values at `nodes` (Fornberg's
/// recursion, valid for any distinct nodes).
fn derivative_weights(z: f64, nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut c = vec![[0.0_f64; 2]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z;
    for i in 1..n {
        let mn = i.min(1);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|w| w[1]).collect()
}

const STENCIL: usize = 5;

/// Finite-difference derivative of samples on a possibly non-uniform grid.
/// Five-point stencils (fourth order) are centered in the interior and
/// shifted inward near the ends; shorter series use every sample.
pub fn sampled_derivative(t: &[f64], f: &[f64]) -> Result<Vec<f64>, CalculusError> {
    let n = t.len();
    if n < 3 || f.len() != n {
        return Err(CalculusError::TrajectoryTooShort(n.min(f.len())));
    }
    let width = STENCIL.min(n);
    Ok((0..n)
        .map(|i| {
            let start = i.saturating_sub(width / 2).min(n - width);
            let window = start..start + width;
            derivative_weights(t[i], &t[window.clone()])
                .iter()
                .zip(&f[window])
                .map(|(w, v)| w * v)
                .sum()
        })
        .collect())
}

/// Per-sample `dE/dt + ∂L/∂t` along `traj`, with `dE/dt` differenced from
/// the sampled energy and `∂L/∂t` evaluated symbolically.
pub fn energy_balance_residual(l: &Expr, traj: &Trajectory, constants: &Bindings) -> Result<Vec<f64>, CalculusError> {
    if traj.len() < 3 {
        return Err(CalculusError::TrajectoryTooShort(traj.len()));
    }
    let energy = energy_function(l)?;
    let explicit_rate = l.diff(Var::T);
    let mut b = constants.clone();
    let mut e_series = Vec::with_capacity(traj.len());
    let mut rate_series = Vec::with_capacity(traj.len());
    for i in 0..traj.len() {
        b.set_var(Var::T, traj.t[i])
            .set_var(Var::X, traj.x[i])
            .set_var(Var::V, traj.v[i]);
        e_series.push(energy.eval(&b)?);
        rate_series.push(explicit_rate.eval(&b)?);
    }
    let de_dt = sampled_derivative(&traj.t, &e_series)?;
    Ok(de_dt.iter().zip(&rate_series).map(|(d, r)| d + r).collect())
}

impl Serialize for NullReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let (max_violation, witness) = match &self.certificate {
            NullCertificate::Symbolic => (0.0, None),
            NullCertificate::Numeric { max_residual } => (*max_residual, None),
            NullCertificate::NotNull { witness, residual } => (residual.abs(), Some(witness)),
        };
        let condition = ConditionResult {
            name: "euler_lagrange_residual",
            passed: self.certificate.is_null(),
            symbolic: matches!(self.certificate, NullCertificate::Symbolic),
            max_violation,
        };
        let mut s = serializer.serialize_struct("NullReport", 6)?;
        s.serialize_field("overall", &self.certificate.is_null())?;
        s.serialize_field("verdict", self.certificate.verdict())?;
        s.serialize_field("lagrangian", &self.lagrangian)?;
        s.serialize_field("residual", &self.residual)?;
        s.serialize_field("conditions", &[condition])?;
        s.serialize_field("witness", &witness)?;
        s.end()
    }
}

impl Serialize for HelmholtzReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("HelmholtzReport", 4)?;
        s.serialize_field("overall", &self.overall)?;
        s.serialize_field("equation", &self.equation)?;
        s.serialize_field("conditions", &self.conditions)?;
        s.serialize_field("witness", &self.witness)?;
        s.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    fn residual(l: &str) -> Expr {
        euler_lagrange(&p(l)).unwrap().residual
    }

    #[test]
    fn el_of_standard_lagrangian() {
        assert_eq!(residual("0.5*(v^2 - c*x^2)"), p("a + c*x").simplify());
        assert_eq!(residual("0.5*v^2"), p("a"));
    }

    #[test]
    fn el_of_primary_null_lagrangian_vanishes() {
        assert!(residual("C1*v*x + C2*(v*t + x) + C4*v + C6").is_zero());
    }

    #[test]
    fn el_rejects_acceleration() {
        assert!(matches!(
            euler_lagrange(&p("a*x")),
            Err(CalculusError::InvalidLagrangian(_))
        ));
        // Cancels after simplification, so it is a valid Lagrangian.
        assert!(euler_lagrange(&p("a - a + v")).is_ok());
    }

    #[test]
    fn mixed_plus_single_variable_lagrangian() {
        let opts = CheckOptions::default();
        let null = is_null(&p("C1*v*x + C2*v*t + 0*x*t + C4*v + C2*x + C6"), &opts).unwrap();
        assert_eq!(null.certificate, NullCertificate::Symbolic);
        let broken = is_null(&p("C1*v*x + C2*v*t + 1*x*t + C4*v + C5*x + C6"), &opts).unwrap();
        let NullCertificate::NotNull { witness, residual } = broken.certificate else {
            panic!("expected a witness");
        };
        // Residual is C2 - C5 - t.
        let expected = witness.constant("C2").unwrap() - witness.constant("C5").unwrap() - witness.var(Var::T).unwrap();
        assert!((residual - expected).abs() < 1e-12);
    }

    #[test]
    fn zero_lagrangian_is_null() {
        let r = is_null(&Expr::zero(), &CheckOptions::default()).unwrap();
        assert_eq!(r.certificate, NullCertificate::Symbolic);
    }

    #[test]
    fn numeric_tier_catches_trig_identity() {
        // d/dt of (sin(t)^2 + cos(t)^2)*x is null, but the residual only
        // vanishes through sin² + cos² = 1.
        let l = p("(sin(t)^2 + cos(t)^2)*v - x + x*(sin(t)^2 + cos(t)^2)");
        let r = is_null(&l, &CheckOptions::default()).unwrap();
        assert!(matches!(r.certificate, NullCertificate::Numeric { max_residual } if max_residual < 1e-12));
    }

    #[test]
    fn invalid_options() {
        let bad = CheckOptions::default().with_samples(0);
        assert!(matches!(is_null(&p("x"), &bad), Err(CalculusError::InvalidOptions(_))));
        let bad = CheckOptions::default().with_tol(0.0);
        assert!(matches!(is_null(&p("x"), &bad), Err(CalculusError::InvalidOptions(_))));
    }

    #[test]
    fn helmholtz_conservative_passes() {
        for c in ["-4", "0", "0.5", "9"] {
            let report = helmholtz_check(&p(&format!("a + {c}*x")), &CheckOptions::default()).unwrap();
            assert!(report.overall, "c = {c}");
            assert!(report.witness.is_none());
        }
        assert!(helmholtz_check(&p("a"), &CheckOptions::default()).unwrap().overall);
    }

    #[test]
    fn helmholtz_damped_fails_first_derivative() {
        let report = helmholtz_check(&p("a + 0.3*v + 4*x"), &CheckOptions::default()).unwrap();
        assert!(!report.overall);
        let cond = report.condition(FIRST_DERIVATIVE).unwrap();
        assert!(!cond.passed);
        assert!((cond.max_violation - 0.3).abs() < 1e-12);
        assert!(report.condition(NONDEGENERACY).unwrap().passed);
        assert!(report.condition(SYMMETRIC_COUNTERPART).unwrap().passed);
        assert!(report.witness.is_some());
    }

    #[test]
    fn helmholtz_position_dependent_mass() {
        // E-L expression of L = ½(1 + x²)v²: (1 + x²)a + x v².
        let phi = residual("0.5*(1 + x^2)*v^2");
        assert!(helmholtz_check(&phi, &CheckOptions::default()).unwrap().overall);
        // Dropping the velocity term breaks self-adjointness.
        let report = helmholtz_check(&p("(1 + x^2)*a"), &CheckOptions::default()).unwrap();
        assert!(!report.condition(FIRST_DERIVATIVE).unwrap().passed);
    }

    #[test]
    fn helmholtz_rejects_non_second_order() {
        for bad in ["v + x", "a^2 + x", "a*a*x"] {
            assert!(
                matches!(
                    helmholtz_check(&p(bad), &CheckOptions::default()),
                    Err(CalculusError::NotSecondOrder { .. })
                ),
                "{bad}"
            );
        }
    }

    #[test]
    fn energy_functions() {
        let e = energy_function(&p("0.5*(v^2 - omega0^2*x^2)")).unwrap();
        assert_eq!(e, p("0.5*(v^2 + omega0^2*x^2)").simplify());
        let with_gauge = energy_function(&p("0.5*(v^2 - omega0^2*x^2) + C1*v*x + C2*(v*t + x) + C4*v + C6")).unwrap();
        assert_eq!(with_gauge, p("0.5*(v^2 + omega0^2*x^2) - (C2*x + C6)").simplify());
        assert!(energy_function(&Expr::zero()).unwrap().is_zero());
    }

    #[test]
    fn sampled_derivative_is_exact_on_quartics() {
        let t = [0.0_f64, 0.1, 0.3, 0.35, 0.6, 0.7, 0.75];
        let f: Vec<f64> = t.iter().map(|s| s.powi(4) - 3.0 * s * s - s + 2.0).collect();
        let d = sampled_derivative(&t, &f).unwrap();
        for (s, d) in t.iter().zip(d) {
            assert!((d - (4.0 * s.powi(3) - 6.0 * s - 1.0)).abs() < 1e-10, "{d}");
        }
        let d = sampled_derivative(&t[..3], &f[..3]).unwrap();
        assert!(d.iter().all(|d| d.is_finite()));
        assert!(matches!(
            sampled_derivative(&t[..2], &f[..2]),
            Err(CalculusError::TrajectoryTooShort(2))
        ));
    }

    #[test]
    fn report_json_shape() {
        let r = helmholtz_check(&p("a + 0.3*v + 4*x"), &CheckOptions::default()).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["overall"], false);
        assert_eq!(json["conditions"][1]["name"], "first_derivative");
        assert!(json["witness"].is_object());
        let n = is_null(&p("x*t"), &CheckOptions::default()).unwrap();
        let json = serde_json::to_value(&n).unwrap();
        assert_eq!(json["verdict"], "not_null");
        assert!(json["witness"]["t"].is_number());
    }
}
