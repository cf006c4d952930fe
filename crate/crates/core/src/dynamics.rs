//! Fixed-step RK4 integration of the (driven) linear oscillator
//!
//! ```text
//! ẍ + c x = ℱ(t)
//! ```
//!
//! and energy bookkeeping along the resulting trajectory. The linear pendulum
//! is the same equation with `c = g / L`, so both modes share one code path.
//! A non-positive stiffness `c` is integrated as is and flagged as
//! non-oscillatory.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculus::{self, CalculusError};
use crate::expr::{Bindings, Expr, ExprError, Var};
use crate::gauge::{GaugeError, LagrangianSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("conflicting frequency parameters: {0}")]
    ConflictingParameters(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("state became non-finite at step {step} (t = {t})")]
    NonFiniteState { step: usize, t: f64 },
    #[error("force `{0}` must depend on t only")]
    ForceContainsState(String),
    #[error("`{0}` is not affine in the acceleration with a nonzero coefficient")]
    NotAffine(String),
    #[error("evaluation failed at step {step}: {source}")]
    Eval { step: usize, source: ExprError },
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error(transparent)]
    Gauge(#[from] GaugeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Oscillator,
    /// Small-angle pendulum: `x` is the angle in radians.
    Pendulum,
}

pub const DEFAULT_T0: f64 = 0.0;
pub const DEFAULT_T_END: f64 = 10.0;
pub const DEFAULT_DT: f64 = 1e-3;

/// One frequency parameterization plus initial state and time grid.
///
/// Frequency is given by exactly one of `omega0`, `c`, `(k, m)` (oscillator)
/// or `(g, length)` (pendulum).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorConfig {
    #[serde(default)]
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(default)]
    pub x0: f64,
    #[serde(default)]
    pub v0: f64,
    #[serde(default = "default_t0")]
    pub t0: f64,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
}

fn default_t0() -> f64 {
    DEFAULT_T0
}

fn default_t_end() -> f64 {
    DEFAULT_T_END
}

fn default_dt() -> f64 {
    DEFAULT_DT
}

impl Default for OscillatorConfig {
    fn default() -> Self {
        OscillatorConfig {
            mode: Mode::Oscillator,
            omega0: None,
            c: None,
            k: None,
            m: None,
            g: None,
            length: None,
            x0: 0.0,
            v0: 0.0,
            t0: DEFAULT_T0,
            t_end: DEFAULT_T_END,
            dt: DEFAULT_DT,
        }
    }
}

impl OscillatorConfig {
    pub fn oscillator(omega0: f64) -> Self {
        OscillatorConfig {
            omega0: Some(omega0),
            ..Default::default()
        }
    }

    pub fn spring(k: f64, m: f64) -> Self {
        OscillatorConfig {
            k: Some(k),
            m: Some(m),
            ..Default::default()
        }
    }

    pub fn pendulum(g: f64, length: f64) -> Self {
        OscillatorConfig {
            mode: Mode::Pendulum,
            g: Some(g),
            length: Some(length),
            ..Default::default()
        }
    }

    pub fn stiffness(c: f64) -> Self {
        OscillatorConfig {
            c: Some(c),
            ..Default::default()
        }
    }

    pub fn with_state(mut self, x0: f64, v0: f64) -> Self {
        self.x0 = x0;
        self.v0 = v0;
        self
    }

    pub fn with_span(mut self, t0: f64, t_end: f64) -> Self {
        self.t0 = t0;
        self.t_end = t_end;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    fn validate_grid(&self) -> Result<(), DynamicsError> {
        let invalid = |msg: String| Err(DynamicsError::InvalidParameter(msg));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return invalid(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t0.is_finite() && self.t_end.is_finite() && self.t_end > self.t0) {
            return invalid(format!("need t0 < t_end, got [{}, {}]", self.t0, self.t_end));
        }
        if !(self.x0.is_finite() && self.v0.is_finite()) {
            return invalid("initial state must be finite".into());
        }
        Ok(())
    }

    /// Sample times `t0 + i dt`, with the last one moved onto `t_end`.
    pub fn grid(&self) -> Result<Vec<f64>, DynamicsError> {
        self.validate_grid()?;
        let steps = (self.t_end - self.t0) / self.dt;
        let nearest = steps.round();
        let n = if (steps - nearest).abs() <= 1e-9 * nearest.max(1.0) {
            nearest
        } else {
            steps.ceil()
        };
        let n = (n as usize).max(1);
        let mut t: Vec<f64> = (0..n).map(|i| self.t0 + i as f64 * self.dt).collect();
        t.push(self.t_end);
        Ok(t)
    }
}

/// Stiffness `c` of `ẍ + c x = 0` and, when `c > 0`, its frequency `√c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Frequency {
    pub c: f64,
    pub omega: Option<f64>,
    pub oscillatory: bool,
}

pub fn derive_frequency(cfg: &OscillatorConfig) -> Result<Frequency, DynamicsError> {
    let positive = |name: &str, value: f64| {
        if value > 0.0 && value.is_finite() {
            Ok(value)
        } else {
            Err(DynamicsError::InvalidParameter(format!(
                "{name} must be positive, got {value}"
            )))
        }
    };
    let mut given = Vec::new();
    if cfg.omega0.is_some() {
        given.push("omega0");
    }
    if cfg.c.is_some() {
        given.push("c");
    }
    if cfg.k.is_some() || cfg.m.is_some() {
        given.push("k/m");
    }
    if cfg.g.is_some() || cfg.length.is_some() {
        given.push("g/length");
    }
    if given.len() > 1 {
        return Err(DynamicsError::ConflictingParameters(given.join(", ")));
    }
    let c = match given.first() {
        None => {
            return Err(DynamicsError::InvalidParameter(
                "no frequency given (omega0, c, k/m or g/length)".into(),
            ))
        }
        Some(&"omega0") => {
            let omega0 = cfg.omega0.unwrap_or_default();
            if !omega0.is_finite() {
                return Err(DynamicsError::InvalidParameter(format!(
                    "omega0 must be finite, got {omega0}"
                )));
            }
            omega0 * omega0
        }
        Some(&"c") => {
            let c = cfg.c.unwrap_or_default();
            if !c.is_finite() {
                return Err(DynamicsError::InvalidParameter(format!("c must be finite, got {c}")));
            }
            c
        }
        Some(&"k/m") => {
            if cfg.mode == Mode::Pendulum {
                return Err(DynamicsError::ConflictingParameters(
                    "k/m given in pendulum mode".into(),
                ));
            }
            let k = cfg
                .k
                .ok_or_else(|| DynamicsError::InvalidParameter("k is missing".into()))?;
            let m = cfg
                .m
                .ok_or_else(|| DynamicsError::InvalidParameter("m is missing".into()))?;
            positive("k", k)? / positive("m", m)?
        }
        Some(_) => {
            if cfg.mode == Mode::Oscillator {
                return Err(DynamicsError::ConflictingParameters(
                    "g/length given in oscillator mode".into(),
                ));
            }
            let g = cfg
                .g
                .ok_or_else(|| DynamicsError::InvalidParameter("g is missing".into()))?;
            let l = cfg
                .length
                .ok_or_else(|| DynamicsError::InvalidParameter("length is missing".into()))?;
            positive("g", g)? / positive("length", l)?
        }
    };
    if !c.is_finite() {
        return Err(DynamicsError::InvalidParameter(format!(
            "derived stiffness {c} is not finite"
        )));
    }
    let oscillatory = c > 0.0;
    Ok(Frequency {
        c,
        omega: oscillatory.then(|| c.sqrt()),
        oscillatory,
    })
}

/// Sampled solution with optional energy columns.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    #[serde(rename = "E", skip_serializing_if = "Option::is_none")]
    pub energy: Option<Vec<f64>>,
    #[serde(rename = "H", skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub balance_residual: Option<Vec<f64>>,
}

pub const CSV_HEADER: &str = "t,x,v,E,H,balance_residual";

impl Trajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn last_state(&self) -> Option<(f64, f64, f64)> {
        let i = self.len().checked_sub(1)?;
        Some((self.t[i], self.x[i], self.v[i]))
    }

    /// CSV with every column; columns that were not computed are left empty.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        let cell = |col: &Option<Vec<f64>>, i: usize| match col {
            Some(values) => format!("{:.16e}", values[i]),
            None => String::new(),
        };
        for i in 0..self.len() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{},{},{}",
                self.t[i],
                self.x[i],
                self.v[i],
                cell(&self.energy, i),
                cell(&self.hamiltonian, i),
                cell(&self.balance_residual, i)
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}

fn rk4<F>(cfg: &OscillatorConfig, mut accel: F) -> Result<Trajectory, DynamicsError>
where
    F: FnMut(usize, f64, f64, f64) -> Result<f64, DynamicsError>,
{
    let times = cfg.grid()?;
    let mut traj = Trajectory {
        t: Vec::with_capacity(times.len()),
        x: Vec::with_capacity(times.len()),
        v: Vec::with_capacity(times.len()),
        ..Default::default()
    };
    let (mut x, mut v) = (cfg.x0, cfg.v0);
    traj.t.push(times[0]);
    traj.x.push(x);
    traj.v.push(v);
    for (step, w) in times.windows(2).enumerate() {
        let (t, h) = (w[0], w[1] - w[0]);
        let k1x = v;
        let k1v = accel(step, t, x, v)?;
        let k2x = v + 0.5 * h * k1v;
        let k2v = accel(step, t + 0.5 * h, x + 0.5 * h * k1x, k2x)?;
        let k3x = v + 0.5 * h * k2v;
        let k3v = accel(step, t + 0.5 * h, x + 0.5 * h * k2x, k3x)?;
        let k4x = v + h * k3v;
        let k4v = accel(step, t + h, x + h * k3x, k4x)?;
        x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if !(x.is_finite() && v.is_finite()) {
            return Err(DynamicsError::NonFiniteState {
                step: step + 1,
                t: w[1],
            });
        }
        traj.t.push(w[1]);
        traj.x.push(x);
        traj.v.push(v);
    }
    Ok(traj)
}

/// Integrates `ẍ = ℱ(t) − c x` from `(x0, v0)`.
pub fn simulate(cfg: &OscillatorConfig, force: &Expr, constants: &Bindings) -> Result<Trajectory, DynamicsError> {
    if [Var::X, Var::V, Var::A].into_iter().any(|var| force.depends_on(var)) {
        return Err(DynamicsError::ForceContainsState(force.to_string()));
    }
    let c = derive_frequency(cfg)?.c;
    let force = force.substitute_constants(constants).simplify();
    let constant_force = force.as_number();
    let mut b = constants.clone();
    rk4(cfg, |step, t, x, _| {
        let f = match constant_force {
            Some(f) => f,
            None => {
                b.set_var(Var::T, t);
                force.eval(&b).map_err(|source| DynamicsError::Eval { step, source })?
            }
        };
        Ok(f - c * x)
    })
}

/// Integrates `Φ(t, x, v, a) = 0` for an equation affine in `a`, solving
/// `a = −Φ(t, x, v, 0) / ∂Φ/∂a` at every stage.
pub fn simulate_ode(
    cfg: &OscillatorConfig,
    residual: &Expr,
    constants: &Bindings,
) -> Result<Trajectory, DynamicsError> {
    let phi = residual.substitute_constants(constants).simplify();
    let lead = phi.diff(Var::A);
    if lead.is_zero() || lead.depends_on(Var::A) {
        return Err(DynamicsError::NotAffine(residual.to_string()));
    }
    let rest = phi.substitute_var(Var::A, &Expr::zero()).simplify();
    let mut b = constants.clone();
    rk4(cfg, |step, t, x, v| {
        b.set_var(Var::T, t).set_var(Var::X, x).set_var(Var::V, v);
        let eval = |e: &Expr| e.eval(&b).map_err(|source| DynamicsError::Eval { step, source });
        let lead = eval(&lead)?;
        if lead == 0.0 {
            return Err(DynamicsError::NotAffine(phi.to_string()));
        }
        Ok(-eval(&rest)? / lead)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergySummary {
    pub max_energy_drift: f64,
    pub max_hamiltonian_drift: f64,
    pub max_balance_residual: f64,
    pub samples: usize,
}

fn max_drift(series: &[f64]) -> f64 {
    series.iter().map(|e| (e - series[0]).abs()).fold(0.0, f64::max)
}

/// Adds the energy function of `spec`'s Lagrangian, the standard energy
/// `½ C_o (v² + c x²)` and the balance residual `dE/dt + ∂L/∂t`.
pub fn track_energy(
    traj: &Trajectory,
    spec: &LagrangianSpec,
    constants: &Bindings,
) -> Result<(Trajectory, EnergySummary), DynamicsError> {
    if traj.len() < 3 {
        return Err(CalculusError::TrajectoryTooShort(traj.len()).into());
    }
    let l = spec.assemble()?;
    let energy = calculus::energy_function(&l)?
        .substitute_constants(constants)
        .simplify();
    let hamiltonian = spec.standard_energy().substitute_constants(constants).simplify();
    let mut b = constants.clone();
    let mut e_col = Vec::with_capacity(traj.len());
    let mut h_col = Vec::with_capacity(traj.len());
    for step in 0..traj.len() {
        b.set_var(Var::T, traj.t[step])
            .set_var(Var::X, traj.x[step])
            .set_var(Var::V, traj.v[step]);
        let eval = |e: &Expr| e.eval(&b).map_err(|source| DynamicsError::Eval { step, source });
        e_col.push(eval(&energy)?);
        h_col.push(eval(&hamiltonian)?);
    }
    let balance = calculus::energy_balance_residual(&l, traj, constants)?;
    let summary = EnergySummary {
        max_energy_drift: max_drift(&e_col),
        max_hamiltonian_drift: max_drift(&h_col),
        max_balance_residual: balance.iter().map(|r| r.abs()).fold(0.0, f64::max),
        samples: traj.len(),
    };
    let tracked = Trajectory {
        energy: Some(e_col),
        hamiltonian: Some(h_col),
        balance_residual: Some(balance),
        ..traj.clone()
    };
    Ok((tracked, summary))
}
