//! Gauge functions for the linear oscillator and what they contribute.
//!
//! A [`GaugeSet`] holds four functions of time `f1, f2, f4, f6` defining the
//! scalar gauge function
//!
//! ```text
//! Φ(t, x) = ½ f1 x² + f2 x t + f4 x + f6 t
//! ```
//!
//! Its total time derivative is a null Lagrangian. Added to the standard
//! Lagrangian `½ C_o (v² − c x²)` it leaves the equation of motion unchanged
//! but shifts the energy function by `−∂Φ/∂t`, which splits into a driving
//! force `ℱ(t) = f2 + ḟ2 t + ḟ4`, an energy shift `G(t) = f6 + ḟ6 t`, and a
//! frequency-shift term `−½ ḟ1 x²`.
//!
//! All quantities are per unit mass; `ℱ` has units of acceleration.

use serde::Serialize;
use thiserror::Error;

use crate::calculus::{self, CalculusError};
use crate::expr::{Expr, Var};
use crate::sampling::{self, CheckOptions};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaugeError {
    #[error("gauge function {name} = `{expr}` must depend on t only")]
    NotTimeOnly { name: &'static str, expr: String },
    #[error("internal error: `{0}` failed null certification")]
    InternalNullViolation(String),
    #[error("the Lagrangian has no drive terms")]
    MissingDrive,
    #[error(transparent)]
    Calculus(#[from] CalculusError),
}

pub const GAUGE_NAMES: [&str; 4] = ["f1", "f2", "f4", "f6"];

#[derive(Debug, Clone, PartialEq)]
pub struct GaugeSet {
    pub f1: Expr,
    pub f2: Expr,
    pub f4: Expr,
    pub f6: Expr,
    /// All four functions are constant in time.
    pub primary: bool,
}

impl GaugeSet {
    pub fn new(f1: Expr, f2: Expr, f4: Expr, f6: Expr) -> Result<GaugeSet, GaugeError> {
        let fs = [f1, f2, f4, f6];
        for (name, f) in GAUGE_NAMES.into_iter().zip(&fs) {
            if [Var::X, Var::V, Var::A].into_iter().any(|var| f.depends_on(var)) {
                return Err(GaugeError::NotTimeOnly {
                    name,
                    expr: f.to_string(),
                });
            }
        }
        let primary = fs.iter().all(|f| !f.depends_on(Var::T));
        let [f1, f2, f4, f6] = fs;
        Ok(GaugeSet {
            f1,
            f2,
            f4,
            f6,
            primary,
        })
    }

    pub fn zero() -> GaugeSet {
        primary_gauge(0.0, 0.0, 0.0, 0.0)
    }

    pub fn functions(&self) -> [(&'static str, &Expr); 4] {
        [("f1", &self.f1), ("f2", &self.f2), ("f4", &self.f4), ("f6", &self.f6)]
    }
}

/// Gauge set with constant coefficients `C1, C2, C4, C6`.
pub fn primary_gauge(c1: impl Into<Expr>, c2: impl Into<Expr>, c4: impl Into<Expr>, c6: impl Into<Expr>) -> GaugeSet {
    GaugeSet {
        f1: c1.into(),
        f2: c2.into(),
        f4: c4.into(),
        f6: c6.into(),
        primary: true,
    }
}

pub fn gauge_scalar(g: &GaugeSet) -> Expr {
    let (t, x) = (Expr::t, Expr::x);
    (0.5 * g.f1.clone() * x().powi(2) + g.f2.clone() * x() * t() + g.f4.clone() * x() + g.f6.clone() * t()).simplify()
}

/// `dΦ/dt`, certified null before it is returned.
pub fn null_lagrangian_from_gauge(g: &GaugeSet) -> Result<Expr, GaugeError> {
    let l = gauge_scalar(g)
        .total_time_derivative()
        .map_err(CalculusError::from)?
        .simplify();
    let report = calculus::is_null(&l, &CheckOptions::default())?;
    if !report.certificate.is_null() {
        return Err(GaugeError::InternalNullViolation(l.to_string()));
    }
    Ok(l)
}

/// A driving force `ℱ(t)` and energy shift `G(t)` entering the Lagrangian as
/// `ℱ(t) x + G(t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Drive {
    pub force: Expr,
    pub shift: Expr,
}

impl Drive {
    pub fn none() -> Drive {
        Drive {
            force: Expr::zero(),
            shift: Expr::zero(),
        }
    }
}

pub fn extract_force(g: &GaugeSet) -> Drive {
    let t = Expr::t();
    let force = (g.f2.clone() + g.f2.diff(Var::T) * t.clone() + g.f4.diff(Var::T)).simplify();
    let shift = (g.f6.clone() + g.f6.diff(Var::T) * t).simplify();
    Drive { force, shift }
}

/// Standard part `½ C_o (v² − c x²)` plus optional gauge and drive parts.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianSpec {
    pub c_o: Expr,
    pub c: Expr,
    pub gauge: Option<GaugeSet>,
    pub drive: Option<Drive>,
}

impl LagrangianSpec {
    pub fn new(c_o: impl Into<Expr>, c: impl Into<Expr>) -> LagrangianSpec {
        LagrangianSpec {
            c_o: c_o.into(),
            c: c.into(),
            gauge: None,
            drive: None,
        }
    }

    pub fn with_gauge(mut self, gauge: GaugeSet) -> LagrangianSpec {
        self.gauge = Some(gauge);
        self
    }

    pub fn with_drive(mut self, drive: Drive) -> LagrangianSpec {
        self.drive = Some(drive);
        self
    }

    pub fn standard(&self) -> Expr {
        (0.5 * self.c_o.clone() * (Expr::v().powi(2) - self.c.clone() * Expr::x().powi(2))).simplify()
    }

    /// `½ C_o (v² + c x²)`.
    pub fn standard_energy(&self) -> Expr {
        (0.5 * self.c_o.clone() * (Expr::v().powi(2) + self.c.clone() * Expr::x().powi(2))).simplify()
    }

    fn drive_terms(&self) -> Option<Expr> {
        self.drive
            .as_ref()
            .map(|d| d.force.clone() * Expr::x() + d.shift.clone())
    }

    pub fn assemble(&self) -> Result<Expr, GaugeError> {
        let mut l = self.standard();
        if let Some(g) = &self.gauge {
            l = l + null_lagrangian_from_gauge(g)?;
        }
        if let Some(d) = self.drive_terms() {
            l = l + d;
        }
        Ok(l.simplify())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyDecomposition {
    /// `½ C_o (v² + c x²)`.
    pub standard: Expr,
    /// Everything the gauge and drive terms add.
    pub gauge: Expr,
    pub total: Expr,
}

pub fn energy_decomposition(spec: &LagrangianSpec) -> EnergyDecomposition {
    let standard = spec.standard_energy();
    let mut extra = Expr::zero();
    if let Some(g) = &spec.gauge {
        let (t, x) = (Expr::t(), Expr::x());
        let df1 = g.f1.diff(Var::T);
        let df2 = g.f2.diff(Var::T);
        let df4 = g.f4.diff(Var::T);
        let df6 = g.f6.diff(Var::T);
        extra = -(0.5 * df1 * x.clone().powi(2) + df2 * x.clone() * t.clone())
            - ((g.f2.clone() + df4) * x + g.f6.clone() + df6 * t);
    }
    if let Some(d) = spec.drive_terms() {
        extra = extra - d;
    }
    let gauge = extra.simplify();
    let total = (standard.clone() + gauge.clone()).simplify();
    EnergyDecomposition { standard, gauge, total }
}

/// `c − ḟ1 / C_o`: the stiffness seen by the energy function once the
/// frequency-shift term of `f1` is folded into the potential.
pub fn effective_stiffness(spec: &LagrangianSpec) -> Expr {
    match &spec.gauge {
        Some(g) => (spec.c.clone() - g.f1.diff(Var::T) / spec.c_o.clone()).simplify(),
        None => spec.c.simplify(),
    }
}

/// `½ C_o (v² − c x²) + ℱ(t) x + G(t)`.
pub fn driven_lagrangian(spec: &LagrangianSpec) -> Result<Expr, GaugeError> {
    let d = spec.drive_terms().ok_or(GaugeError::MissingDrive)?;
    Ok((spec.standard() + d).simplify())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Role {
    #[serde(rename = "F-gauge")]
    FGauge,
    #[serde(rename = "E-gauge")]
    EGauge,
    #[serde(rename = "frequency-shift")]
    FrequencyShift,
    #[serde(rename = "force-only")]
    ForceOnly,
    #[serde(rename = "inert")]
    Inert,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartialVerdict {
    pub name: &'static str,
    pub contributes_to_energy: bool,
    pub contributes_to_force: bool,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaugeClassification {
    pub partials: [PartialVerdict; 4],
}

impl GaugeClassification {
    pub fn roles(&self) -> [Role; 4] {
        self.partials.each_ref().map(|p| p.role)
    }
}

pub fn classify_gauges(g: &GaugeSet) -> GaugeClassification {
    let opts = CheckOptions::default();
    let nonzero = |e: Expr| !sampling::is_identically_zero(&e, &opts);
    let t = Expr::t();
    let shifts_frequency = nonzero(g.f1.diff(Var::T));
    let forces = nonzero(g.f2.clone() + g.f2.diff(Var::T) * t.clone());
    let pushes = nonzero(g.f4.diff(Var::T));
    let shifts_energy = nonzero(g.f6.clone() + g.f6.diff(Var::T) * t);
    let verdict = |name, energy, force, active, role| PartialVerdict {
        name,
        contributes_to_energy: energy,
        contributes_to_force: force,
        role: if active { role } else { Role::Inert },
    };
    GaugeClassification {
        partials: [
            verdict("phi1", shifts_frequency, false, shifts_frequency, Role::FrequencyShift),
            verdict("phi2", forces, forces, forces, Role::FGauge),
            verdict("phi3", pushes, pushes, pushes, Role::ForceOnly),
            verdict("phi4", shifts_energy, false, shifts_energy, Role::EGauge),
        ],
    }
}
