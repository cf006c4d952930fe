//! Command-line front end.
//!
//! Every command reads one or more TOML run configs (`--config`, repeatable
//! for sweeps) and prints a JSON report on stdout. Exit codes:
//!
//! | code | meaning                                   |
//! |------|-------------------------------------------|
//! | 0    | success, positive verdict                 |
//! | 1    | negative verdict (not null, check failed) |
//! | 2    | configuration or input error              |
//! | 3    | numeric failure during a run              |
//!
//! Defaults:
//!
//! | key                      | default        |
//! |--------------------------|----------------|
//! | `system.t0`              | 0              |
//! | `system.t_end`           | 10             |
//! | `system.dt`              | 1e-3           |
//! | `system.x0`, `system.v0` | 0              |
//! | `system.c_o`             | 1              |
//! | `system.mode`            | `oscillator`   |
//! | `drive.shift`            | `"0"`          |
//! | `output.dir`             | `.`            |
//! | `output.trajectory`      | `trajectory`   |
//! | `output.format`          | `csv`          |
//! | `tolerances.null_tol`    | 1e-9           |
//! | `tolerances.balance_tol` | 1e-5           |
//! | `tolerances.samples`     | 1000           |
//!
//! Expression values in `[gauge]` and `[drive]` may only use names declared
//! in `[constants]`. `GAUGEFORGE_SEED` sets the seed of the sampled checks.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::calculus::{self, CalculusError};
use crate::dynamics::{self, DynamicsError, Mode, OscillatorConfig};
use crate::expr::{self, Bindings, Expr};
use crate::gauge::{self, Drive, GaugeError, GaugeSet, LagrangianSpec};
use crate::sampling::{CheckOptions, DEFAULT_SEED};

pub const SEED_ENV: &str = "GAUGEFORGE_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "gaugeforge",
    version,
    about = "Null Lagrangians, gauge-derived forces and driven oscillators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Run config; repeat to sweep over several files.
    #[arg(long, global = true)]
    pub config: Vec<PathBuf>,
    /// Output directory for written files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Trajectory file format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Certify that the gauge null Lagrangian (or --lagrangian) is null.
    VerifyNull {
        /// Check this Lagrangian instead of the gauge-derived one.
        #[arg(long, allow_hyphen_values = true)]
        lagrangian: Option<String>,
    },
    /// Driving force, energy shift and gauge roles of the [gauge] block.
    DeriveForce,
    /// Integrate the driven system and write the trajectory.
    Simulate,
    /// Check the Helmholtz conditions of an equation `Φ(t, x, v, a) = 0`.
    CheckHelmholtz {
        /// Equation to check instead of the config's equation of motion.
        #[arg(long, allow_hyphen_values = true)]
        ode: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
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
    #[serde(default = "one")]
    pub c_o: f64,
    #[serde(default)]
    pub x0: f64,
    #[serde(default)]
    pub v0: f64,
    #[serde(default)]
    pub t0: f64,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
}

impl SystemSection {
    pub fn oscillator(&self) -> OscillatorConfig {
        OscillatorConfig {
            mode: self.mode,
            omega0: self.omega0,
            c: self.c,
            k: self.k,
            m: self.m,
            g: self.g,
            length: self.length,
            x0: self.x0,
            v0: self.v0,
            t0: self.t0,
            t_end: self.t_end,
            dt: self.dt,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeSection {
    pub f1: String,
    pub f2: String,
    pub f4: String,
    pub f6: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    pub force: String,
    #[serde(default = "zero_text")]
    pub shift: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "dot")]
    pub dir: PathBuf,
    #[serde(default = "trajectory_stem")]
    pub trajectory: String,
    #[serde(default)]
    pub format: Format,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: dot(),
            trajectory: trajectory_stem(),
            format: Format::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_null_tol")]
    pub null_tol: f64,
    #[serde(default = "default_balance_tol")]
    pub balance_tol: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            null_tol: default_null_tol(),
            balance_tol: default_balance_tol(),
            samples: default_samples(),
        }
    }
}

fn one() -> f64 {
    1.0
}
fn default_t_end() -> f64 {
    dynamics::DEFAULT_T_END
}
fn default_dt() -> f64 {
    dynamics::DEFAULT_DT
}
fn zero_text() -> String {
    "0".into()
}
fn dot() -> PathBuf {
    PathBuf::from(".")
}
fn trajectory_stem() -> String {
    "trajectory".into()
}
fn default_null_tol() -> f64 {
    1e-9
}
fn default_balance_tol() -> f64 {
    1e-5
}
fn default_samples() -> usize {
    1000
}

/// Parsed run config; `Serialize` gives the resolved form echoed in reports.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge: Option<GaugeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drive: Option<DriveSection>,
    #[serde(default)]
    pub constants: BTreeMap<String, f64>,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config { key: String, message: String },
    Input(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    fn config(key: impl Into<String>, message: impl Into<String>) -> CliError {
        CliError::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Input(_) => EXIT_CONFIG,
            CliError::Numeric(_) | CliError::Io(_) => EXIT_NUMERIC,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config { key, message } => write!(f, "config error at `{key}`: {message}"),
            CliError::Input(m) => write!(f, "invalid input: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(err: DynamicsError) -> CliError {
        match err {
            DynamicsError::ConflictingParameters(_) | DynamicsError::InvalidParameter(_) => {
                CliError::config("system", err.to_string())
            }
            DynamicsError::ForceContainsState(_) => CliError::config("drive.force", err.to_string()),
            DynamicsError::Gauge(GaugeError::Calculus(CalculusError::InvalidLagrangian(_)))
            | DynamicsError::Calculus(CalculusError::InvalidLagrangian(_)) => CliError::Input(err.to_string()),
            _ => CliError::Numeric(err.to_string()),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let key = toml_error_key(text, &e);
            CliError::config(key, e.message().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::config(path.display().to_string(), e.to_string()))?;
        RunConfig::from_toml(&text)
    }

    fn validate(&self) -> Result<(), CliError> {
        for (name, value) in &self.constants {
            let key = format!("constants.{name}");
            if expr::RESERVED.contains(&name.as_str()) {
                return Err(CliError::config(key, "reserved name"));
            }
            if !value.is_finite() {
                return Err(CliError::config(key, "value must be finite"));
            }
        }
        let t = &self.tolerances;
        if t.null_tol.is_nan() || t.null_tol <= 0.0 {
            return Err(CliError::config("tolerances.null_tol", "must be positive"));
        }
        if t.balance_tol.is_nan() || t.balance_tol <= 0.0 {
            return Err(CliError::config("tolerances.balance_tol", "must be positive"));
        }
        if t.samples == 0 {
            return Err(CliError::config("tolerances.samples", "must be at least 1"));
        }
        if let Some(s) = &self.system {
            if !(s.c_o.is_finite() && s.c_o != 0.0) {
                return Err(CliError::config("system.c_o", "must be finite and nonzero"));
            }
        }
        if let Some(g) = &self.gauge {
            self.gauge_set(g)?;
        }
        if let Some(d) = &self.drive {
            self.expression("drive.force", &d.force)?;
            self.expression("drive.shift", &d.shift)?;
        }
        Ok(())
    }

    pub fn bindings(&self) -> Bindings {
        let mut b = Bindings::new();
        for (name, value) in &self.constants {
            b.set(name, *value);
        }
        b
    }

    fn expression(&self, key: &str, text: &str) -> Result<Expr, CliError> {
        let declared: BTreeSet<String> = self.constants.keys().cloned().collect();
        expr::parse_with(text, &declared).map_err(|e| CliError::config(key, e.to_string()))
    }

    fn gauge_set(&self, g: &GaugeSection) -> Result<GaugeSet, CliError> {
        let f1 = self.expression("gauge.f1", &g.f1)?;
        let f2 = self.expression("gauge.f2", &g.f2)?;
        let f4 = self.expression("gauge.f4", &g.f4)?;
        let f6 = self.expression("gauge.f6", &g.f6)?;
        GaugeSet::new(f1, f2, f4, f6).map_err(|e| match e {
            GaugeError::NotTimeOnly { name, .. } => CliError::config(format!("gauge.{name}"), e.to_string()),
            other => CliError::config("gauge", other.to_string()),
        })
    }

    pub fn gauge(&self) -> Result<GaugeSet, CliError> {
        let g = self
            .gauge
            .as_ref()
            .ok_or_else(|| CliError::config("gauge", "missing [gauge] section"))?;
        self.gauge_set(g)
    }

    pub fn system(&self) -> Result<&SystemSection, CliError> {
        self.system
            .as_ref()
            .ok_or_else(|| CliError::config("system", "missing [system] section"))
    }

    /// Drive from `[drive]`, else the one extracted from `[gauge]`, else none.
    pub fn drive(&self) -> Result<Drive, CliError> {
        match (&self.drive, &self.gauge) {
            (Some(_), Some(_)) => Err(CliError::config("drive", "give either [drive] or [gauge], not both")),
            (Some(d), None) => Ok(Drive {
                force: self.expression("drive.force", &d.force)?.simplify(),
                shift: self.expression("drive.shift", &d.shift)?.simplify(),
            }),
            (None, Some(_)) => Ok(gauge::extract_force(&self.gauge()?)),
            (None, None) => Ok(Drive::none()),
        }
    }

    /// [`RunConfig::drive`] with the declared constant values substituted.
    pub fn concrete_drive(&self) -> Result<Drive, CliError> {
        let b = self.bindings();
        let d = self.drive()?;
        Ok(Drive {
            force: d.force.substitute_constants(&b).simplify(),
            shift: d.shift.substitute_constants(&b).simplify(),
        })
    }

    fn check_options(&self, seed: u64) -> CheckOptions {
        CheckOptions::default()
            .with_samples(self.tolerances.samples)
            .with_tol(self.tolerances.null_tol)
            .with_seed(seed)
            .with_fixed(self.bindings())
    }
}

/// Dotted path of the table entry a TOML error points into.
fn toml_error_key(text: &str, err: &toml::de::Error) -> String {
    let Some(span) = err.span() else {
        return "<document>".into();
    };
    let mut section = String::new();
    let mut offset = 0;
    let mut key = None;
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim();
        if offset > span.start {
            break;
        }
        if trimmed.starts_with('[') {
            section = trimmed.trim_matches(|c| c == '[' || c == ']').trim().to_string();
            key = None;
        } else if let Some((k, _)) = trimmed.split_once('=') {
            key = Some(k.trim().to_string());
        }
        offset += line.len();
    }
    match (section.is_empty(), key) {
        (true, Some(k)) => k,
        (false, Some(k)) => format!("{section}.{k}"),
        (false, None) => section,
        (true, None) => "<document>".into(),
    }
}

pub fn seed_from_env() -> Result<u64, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(text) => parse_seed(&text),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn parse_seed(text: &str) -> Result<u64, CliError> {
    let text = text.trim();
    let parsed = match text.strip_prefix("0x").or_else(|| text.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => text.parse(),
    };
    parsed.map_err(|_| CliError::Input(format!("{SEED_ENV} must be an unsigned integer, got `{text}`")))
}

/// Report and exit code of one command on one config.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub report: Value,
}

struct Job<'a> {
    command: &'a Command,
    config: Option<RunConfig>,
    out_dir: Option<PathBuf>,
    format: Option<Format>,
    seed: u64,
}

impl Job<'_> {
    fn config(&self) -> Result<&RunConfig, CliError> {
        self.config
            .as_ref()
            .ok_or_else(|| CliError::Input("this command needs --config".into()))
    }

    fn options(&self) -> CheckOptions {
        match &self.config {
            Some(cfg) => cfg.check_options(self.seed),
            None => CheckOptions::default().with_seed(self.seed),
        }
    }

    fn echo(&self) -> Value {
        let mut cfg = self.config.clone().unwrap_or_default();
        if let Some(dir) = &self.out_dir {
            cfg.output.dir = dir.clone();
        }
        if let Some(format) = self.format {
            cfg.output.format = format;
        }
        serde_json::to_value(cfg).expect("config serializes")
    }

    fn run(&self) -> Result<Outcome, CliError> {
        let mut outcome = match self.command {
            Command::VerifyNull { lagrangian } => self.verify_null(lagrangian.as_deref()),
            Command::DeriveForce => self.derive_force(),
            Command::Simulate => self.simulate(),
            Command::CheckHelmholtz { ode } => self.check_helmholtz(ode.as_deref()),
        }?;
        if let Value::Object(map) = &mut outcome.report {
            map.insert("config".into(), self.echo());
        }
        Ok(outcome)
    }

    fn verify_null(&self, lagrangian: Option<&str>) -> Result<Outcome, CliError> {
        let l = match lagrangian {
            Some(text) => expr::parse(text).map_err(|e| CliError::Input(format!("--lagrangian: {e}")))?,
            None => gauge::gauge_scalar(&self.config()?.gauge()?)
                .total_time_derivative()
                .map_err(|e| CliError::Input(e.to_string()))?
                .simplify(),
        };
        let report = calculus::is_null(&l, &self.options()).map_err(|e| match e {
            CalculusError::NoValidSamples(_) | CalculusError::Expr(_) => CliError::Numeric(e.to_string()),
            other => CliError::Input(other.to_string()),
        })?;
        let code = if report.certificate.is_null() {
            EXIT_OK
        } else {
            EXIT_NEGATIVE
        };
        Ok(Outcome {
            code,
            report: serde_json::to_value(&report).expect("report serializes"),
        })
    }

    fn derive_force(&self) -> Result<Outcome, CliError> {
        let cfg = self.config()?;
        let g = cfg.gauge()?;
        let consts = cfg.bindings();
        let concrete = GaugeSet::new(
            g.f1.substitute_constants(&consts),
            g.f2.substitute_constants(&consts),
            g.f4.substitute_constants(&consts),
            g.f6.substitute_constants(&consts),
        )
        .map_err(|e| CliError::config("gauge", e.to_string()))?;
        let drive = gauge::extract_force(&concrete);
        let classification = gauge::classify_gauges(&concrete);
        let mut report = json!({
            "force": drive.force,
            "shift": drive.shift,
            "classification": classification,
            "null_lagrangian": gauge::null_lagrangian_from_gauge(&concrete)
                .map_err(|e| CliError::Numeric(e.to_string()))?,
        });
        if let Some(system) = &cfg.system {
            let freq = dynamics::derive_frequency(&system.oscillator())?;
            let spec = LagrangianSpec::new(system.c_o, freq.c).with_gauge(concrete);
            let energy = gauge::energy_decomposition(&spec);
            report["energy"] = serde_json::to_value(&energy).expect("energy serializes");
            report["effective_stiffness"] = json!(gauge::effective_stiffness(&spec));
        }
        Ok(Outcome { code: EXIT_OK, report })
    }

    fn simulate(&self) -> Result<Outcome, CliError> {
        let cfg = self.config()?;
        let system = cfg.system()?;
        let osc = system.oscillator();
        let freq = dynamics::derive_frequency(&osc)?;
        let consts = cfg.bindings();
        let drive = cfg.concrete_drive()?;
        let force = (drive.force.clone() / system.c_o).simplify();
        let traj = dynamics::simulate(&osc, &force, &consts)?;
        let spec = LagrangianSpec::new(system.c_o, freq.c).with_drive(drive.clone());
        let (tracked, summary) = dynamics::track_energy(&traj, &spec, &consts)?;

        let format = self.format.unwrap_or(cfg.output.format);
        let dir = self.out_dir.clone().unwrap_or_else(|| cfg.output.dir.clone());
        fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        let path = dir.join(format!("{}.{}", cfg.output.trajectory, format.extension()));
        let contents = match format {
            Format::Csv => tracked.to_csv_string(),
            Format::Json => serde_json::to_string(&tracked).expect("trajectory serializes") + "\n",
        };
        fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;

        let (t_final, x_final, v_final) = tracked.last_state().expect("trajectory is nonempty");
        let balance_ok = summary.max_balance_residual <= cfg.tolerances.balance_tol;
        let mut warnings = Vec::new();
        if !freq.oscillatory {
            warnings.push(format!(
                "stiffness c = {} is not positive; motion is non-oscillatory",
                freq.c
            ));
        }
        let report = json!({
            "omega": freq.omega,
            "c": freq.c,
            "oscillatory": freq.oscillatory,
            "force": drive.force,
            "shift": drive.shift,
            "max_energy_drift": summary.max_energy_drift,
            "max_hamiltonian_drift": summary.max_hamiltonian_drift,
            "max_balance_residual": summary.max_balance_residual,
            "balance_ok": balance_ok,
            "samples": summary.samples,
            "final_t": t_final,
            "final_x": x_final,
            "final_v": v_final,
            "trajectory": path.display().to_string(),
            "warnings": warnings,
        });
        let code = if balance_ok { EXIT_OK } else { EXIT_NEGATIVE };
        Ok(Outcome { code, report })
    }

    fn check_helmholtz(&self, ode: Option<&str>) -> Result<Outcome, CliError> {
        let phi = match ode {
            Some(text) => expr::parse(text).map_err(|e| CliError::Input(format!("--ode: {e}")))?,
            None => {
                let cfg = self.config()?;
                let system = cfg.system()?;
                let freq = dynamics::derive_frequency(&system.oscillator())?;
                let spec = LagrangianSpec::new(system.c_o, freq.c).with_drive(cfg.concrete_drive()?);
                let l = gauge::driven_lagrangian(&spec).map_err(|e| CliError::Input(e.to_string()))?;
                calculus::euler_lagrange(&l)
                    .map_err(|e| CliError::Input(e.to_string()))?
                    .residual
            }
        };
        let report = calculus::helmholtz_check(&phi, &self.options()).map_err(|e| match e {
            CalculusError::NoValidSamples(_) | CalculusError::Expr(_) => CliError::Numeric(e.to_string()),
            other => CliError::Input(other.to_string()),
        })?;
        let code = if report.overall { EXIT_OK } else { EXIT_NEGATIVE };
        Ok(Outcome {
            code,
            report: serde_json::to_value(&report).expect("report serializes"),
        })
    }
}

fn error_report(err: &CliError) -> Value {
    let mut report = json!({ "error": err.to_string(), "exit_code": err.exit_code() });
    if let CliError::Config { key, .. } = err {
        report["key"] = json!(key);
    }
    report
}

/// Output directory of each sweep entry: the stem of its config file, made
/// unique with the entry index when stems repeat.
fn sweep_dirs(base: &Path, configs: &[PathBuf]) -> Vec<PathBuf> {
    let stems: Vec<String> = configs
        .iter()
        .map(|p| {
            p.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default()
        })
        .collect();
    let unique = stems.iter().collect::<BTreeSet<_>>().len() == stems.len();
    stems
        .iter()
        .enumerate()
        .map(|(i, stem)| {
            if unique {
                base.join(stem)
            } else {
                base.join(format!("{i}_{stem}"))
            }
        })
        .collect()
}

/// Runs a parsed command line. Returns the exit code and the JSON written to
/// stdout; errors of a single run go to stderr as text.
pub fn run(cli: &Cli) -> (i32, String, String) {
    let seed = match seed_from_env() {
        Ok(seed) => seed,
        Err(err) => return (err.exit_code(), String::new(), format!("error: {err}\n")),
    };
    let single = |config: Option<RunConfig>, out_dir: Option<PathBuf>| {
        let job = Job {
            command: &cli.command,
            config,
            out_dir,
            format: cli.global.format,
            seed,
        };
        job.run()
    };
    let configs = &cli.global.config;
    if configs.len() <= 1 {
        let result = match configs.first() {
            Some(path) => RunConfig::load(path).and_then(|cfg| single(Some(cfg), cli.global.out.clone())),
            None => single(None, cli.global.out.clone()),
        };
        return match result {
            Ok(outcome) => (outcome.code, pretty(&outcome.report), String::new()),
            Err(err) => (err.exit_code(), String::new(), format!("error: {err}\n")),
        };
    }

    let base = cli.global.out.clone().unwrap_or_else(dot);
    let dirs = sweep_dirs(&base, configs);
    let work = || -> Vec<(i32, Value)> {
        configs
            .par_iter()
            .zip(dirs.par_iter())
            .map(|(path, dir)| {
                let result = RunConfig::load(path).and_then(|cfg| {
                    let dir = cli
                        .global
                        .out
                        .as_ref()
                        .map(|_| dir.clone())
                        .unwrap_or_else(|| cfg.output.dir.join(dir));
                    single(Some(cfg), Some(dir))
                });
                let (code, mut report) = match result {
                    Ok(outcome) => (outcome.code, outcome.report),
                    Err(err) => (err.exit_code(), error_report(&err)),
                };
                report["config_path"] = json!(path.display().to_string());
                (code, report)
            })
            .collect()
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.global.jobs.max(1))
        .build()
    {
        Ok(pool) => pool,
        Err(e) => return (EXIT_CONFIG, String::new(), format!("error: --jobs: {e}\n")),
    };
    let results = pool.install(work);
    let code = results.iter().map(|(c, _)| *c).max().unwrap_or(EXIT_OK);
    let reports: Vec<Value> = results.into_iter().map(|(_, r)| r).collect();
    (code, pretty(&Value::Array(reports)), String::new())
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n"
}
