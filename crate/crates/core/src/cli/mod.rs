//! Batch front end: `verify`, `norm`, `sweep` and `decompose`.
//!
//! Everything is reachable through [`run`], which never touches the process
//! environment, so tests can drive the exact code path of the binary.

pub mod report;
pub mod suite;

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::Value;

use crate::correspondence::rtilde_closed;
use crate::curvature::{
    alekseevsky_split, closed_norm_frame, g_h_frame, hk_type_residual, invariance_residual, is_strictly_monotone,
    norm_at_rho, norm_report, FrameCurvature,
};
use crate::error::{Error, Result};
use crate::flat_model::{geometry_at, sample_point, sample_point_with_f_z, GeometryAt, ModelParams, Point};
use report::{object, real, real_text, to_json_string, CheckResult, CsvTable};
use suite::{evaluate_point, point_rng, PointResiduals, CHECKS};

/// Name of the global tolerance multiplier variable.
pub const TOL_SCALE_VAR: &str = "HKQK_TOL_SCALE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "hkqk",
    version,
    about = "Numerical checks of the HK/QK curvature formulas on flat models"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every identity over seeded random points.
    Verify(CommonArgs),
    /// Curvature norm at one point, closed form and frame evaluation.
    Norm {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated real coordinates, 4(m+1) of them.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
    },
    /// Tabulate the norm along ρ = 2 f_Z.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 0.1)]
        rho_min: f64,
        #[arg(long, default_value_t = 10.0)]
        rho_max: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    /// Split R̃ into its projective-space part and its hyper-Kähler-type part.
    Decompose {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated real coordinates, 4(m+1) of them.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    #[arg(long = "fd-step", default_value_t = crate::pseudo_linear::DEFAULT_FD_STEP)]
    pub fd_step: f64,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Per-check tolerance override, `NAME=VALUE`; repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
    /// Test hook: flip the sign of ω_2.
    #[arg(long = "corrupt-omega2", hide = true)]
    pub corrupt_omega2: bool,
}

/// Validated settings shared by all subcommands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub m: usize,
    pub c: f64,
    pub seed: u64,
    pub samples: usize,
    pub fd_step: f64,
    pub tol_overrides: BTreeMap<String, f64>,
    pub tol_scale: f64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub corrupt_omega2: bool,
}

impl RunConfig {
    pub fn new(m: usize, c: f64, seed: u64) -> Self {
        RunConfig {
            m,
            c,
            seed,
            samples: 20,
            fd_step: crate::pseudo_linear::DEFAULT_FD_STEP,
            tol_overrides: BTreeMap::new(),
            tol_scale: 1.0,
            out: None,
            format: Format::Json,
            corrupt_omega2: false,
        }
    }

    fn from_args(args: &CommonArgs, default_format: Format, tol_scale: f64) -> Result<Self> {
        let mut tol_overrides = BTreeMap::new();
        for entry in &args.tol {
            let (name, value) = entry
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--tol expects NAME=VALUE, got {entry:?}")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("--tol {name}: {value:?} is not a number")))?;
            tol_overrides.insert(name.trim().to_string(), value);
        }
        let config = RunConfig {
            m: args.m,
            c: args.c,
            seed: args.seed,
            samples: args.samples,
            fd_step: args.fd_step,
            tol_overrides,
            tol_scale,
            out: args.out.clone(),
            format: args.format.unwrap_or(default_format),
            corrupt_omega2: args.corrupt_omega2,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 1 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        if !(self.fd_step > 1e-9 && self.fd_step < 1e-2) {
            return Err(Error::Config(format!(
                "fd-step must lie in (1e-9, 1e-2), got {}",
                self.fd_step
            )));
        }
        if !(self.c.is_finite() && self.c >= 0.0) {
            return Err(Error::Config(format!("c must be finite and ≥ 0, got {}", self.c)));
        }
        if !(self.tol_scale.is_finite() && self.tol_scale > 0.0) {
            return Err(Error::Config(format!(
                "{TOL_SCALE_VAR} must be a positive number, got {}",
                self.tol_scale
            )));
        }
        for (name, value) in &self.tol_overrides {
            if !CHECKS.iter().any(|c| c.name == name) {
                return Err(Error::Config(format!("unknown check {name:?} in --tol")));
            }
            if !(value.is_finite() && *value >= 0.0) {
                return Err(Error::Config(format!("tolerance for {name} must be finite and ≥ 0")));
            }
        }
        Ok(())
    }

    pub fn params(&self) -> Result<ModelParams> {
        let p = ModelParams::new(self.m, self.c)?;
        Ok(if self.corrupt_omega2 {
            p.with_corrupted_omega2()
        } else {
            p
        })
    }

    /// Tolerance in force for a check: the override if any, else the default, times the scale.
    pub fn tolerance(&self, name: &str) -> Option<f64> {
        let base = self
            .tol_overrides
            .get(name)
            .copied()
            .or_else(|| CHECKS.iter().find(|c| c.name == name).map(|c| c.tolerance))?;
        Some(base * self.tol_scale)
    }

    fn to_json(&self) -> Value {
        let overrides: serde_json::Map<String, Value> =
            self.tol_overrides.iter().map(|(k, v)| (k.clone(), real(*v))).collect();
        object([
            ("m", Value::from(self.m)),
            ("c", real(self.c)),
            ("seed", Value::from(self.seed)),
            ("samples", Value::from(self.samples)),
            ("fd_step", real(self.fd_step)),
            ("tol_scale", real(self.tol_scale)),
            ("tol_overrides", Value::Object(overrides)),
        ])
    }
}

/// Exit code and the text the binary would print.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn config_error(message: impl std::fmt::Display) -> Self {
        Outcome {
            exit_code: 2,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

/// Parses `HKQK_TOL_SCALE`; unset means 1.
pub fn parse_tol_scale(raw: Option<&str>) -> Result<f64> {
    match raw {
        None => Ok(1.0),
        Some(s) => {
            let v: f64 = s
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{TOL_SCALE_VAR}={s:?} is not a number")))?;
            if v.is_finite() && v > 0.0 {
                Ok(v)
            } else {
                Err(Error::Config(format!("{TOL_SCALE_VAR} must be positive, got {v}")))
            }
        }
    }
}

/// Entry point of the binary.
pub fn main_with_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let env = std::env::var(TOL_SCALE_VAR).ok();
    run(args, env.as_deref())
}

/// As [`main_with_args`], with the tolerance-scale variable passed explicitly.
pub fn run<I, T>(args: I, tol_scale_env: Option<&str>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Outcome {
                    exit_code: 0,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    exit_code: 2,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    let tol_scale = match parse_tol_scale(tol_scale_env) {
        Ok(v) => v,
        Err(e) => return Outcome::config_error(e),
    };
    let (common, default_format) = match &cli.command {
        Command::Verify(c) => (c, Format::Json),
        Command::Norm { common, .. } | Command::Decompose { common, .. } => (common, Format::Json),
        Command::Sweep { common, .. } => (common, Format::Csv),
    };
    let config = match RunConfig::from_args(common, default_format, tol_scale) {
        Ok(c) => c,
        Err(e) => return Outcome::config_error(e),
    };
    let result = match &cli.command {
        Command::Verify(_) => cmd_verify(&config).map(|r| (r.exit_code(), render_verify(&config, &r))),
        Command::Norm { point, .. } => cmd_norm(&config, point.as_deref()).map(|v| (0, render_record(&config, &v))),
        Command::Decompose { point, .. } => {
            cmd_decompose(&config, point.as_deref()).map(|v| (0, render_record(&config, &v)))
        }
        Command::Sweep {
            rho_min,
            rho_max,
            steps,
            ..
        } => cmd_sweep(&config, *rho_min, *rho_max, *steps).map(|s| (0, render_sweep(&config, &s))),
    };
    match result {
        Ok((exit_code, text)) => deliver(&config, exit_code, text),
        Err(e @ Error::DomainViolation(_)) => Outcome {
            exit_code: 1,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
        Err(e) => Outcome::config_error(e),
    }
}

fn deliver(config: &RunConfig, exit_code: i32, text: String) -> Outcome {
    match &config.out {
        None => Outcome {
            exit_code,
            stdout: text,
            stderr: String::new(),
        },
        Some(path) => match std::fs::write(path, &text) {
            Ok(()) => Outcome {
                exit_code,
                stdout: String::new(),
                stderr: String::new(),
            },
            Err(e) => Outcome::config_error(format!("cannot write {}: {e}", path.display())),
        },
    }
}

/// All check results of one `verify` run, in [`CHECKS`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub results: Vec<CheckResult>,
    /// Points whose evaluation raised an error, with the message.
    pub point_errors: Vec<(usize, String)>,
}

impl VerifyReport {
    pub fn passed(&self) -> usize {
        self.results.iter().filter(|r| r.passed).count()
    }

    pub fn failed(&self) -> usize {
        self.results.len() - self.passed()
    }

    pub fn exit_code(&self) -> i32 {
        if self.failed() == 0 && self.point_errors.is_empty() {
            0
        } else {
            1
        }
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.results.iter().find(|r| r.name == name)
    }
}

/// Runs the suite at `config.samples` points in parallel and merges in index order.
pub fn cmd_verify(config: &RunConfig) -> Result<VerifyReport> {
    config.validate()?;
    let params = config.params()?;
    let per_point: Vec<std::result::Result<PointResiduals, String>> = (0..config.samples)
        .into_par_iter()
        .map(|i| evaluate_point(&params, config.seed, i, config.fd_step).map_err(|e| e.to_string()))
        .collect();

    let mut worst: BTreeMap<&str, (f64, usize)> = BTreeMap::new();
    let mut point_errors = Vec::new();
    for (i, r) in per_point.into_iter().enumerate() {
        match r {
            Ok(res) => {
                for (name, v) in res {
                    let entry = worst.entry(name).or_insert((f64::NEG_INFINITY, 0));
                    // NaN must survive the maximum
                    entry.0 = if v.is_nan() || entry.0.is_nan() {
                        f64::NAN
                    } else {
                        entry.0.max(v)
                    };
                    entry.1 += 1;
                }
            }
            Err(e) => point_errors.push((i, e)),
        }
    }
    let results = CHECKS
        .iter()
        .map(|spec| {
            let (residual, points) = worst.get(spec.name).copied().unwrap_or((f64::NAN, 0));
            let tol = config.tolerance(spec.name).expect("every listed check has a tolerance");
            CheckResult::new(spec.name, spec.anchor, residual, tol, points)
        })
        .collect();
    Ok(VerifyReport { results, point_errors })
}

fn render_verify(config: &RunConfig, report: &VerifyReport) -> String {
    match config.format {
        Format::Json => {
            let mut summary = serde_json::Map::new();
            summary.insert("passed".into(), Value::from(report.passed()));
            summary.insert("failed".into(), Value::from(report.failed()));
            if !report.point_errors.is_empty() {
                let errors = report
                    .point_errors
                    .iter()
                    .map(|(i, e)| object([("point", Value::from(*i)), ("error", Value::String(e.clone()))]))
                    .collect();
                summary.insert("point_errors".into(), Value::Array(errors));
            }
            let doc = object([
                ("config", config.to_json()),
                (
                    "results",
                    Value::Array(report.results.iter().map(CheckResult::to_json).collect()),
                ),
                ("summary", Value::Object(summary)),
            ]);
            to_json_string(&doc)
        }
        Format::Csv => {
            let mut t = CsvTable::new(&["name", "anchor", "max_residual", "tolerance", "passed", "points"]);
            for r in &report.results {
                t.rows.push(vec![
                    r.name.clone(),
                    r.anchor.clone(),
                    real_text(r.max_residual),
                    real_text(r.tolerance),
                    r.passed.to_string(),
                    r.points.to_string(),
                ]);
            }
            t.footer
                .push(format!("passed={} failed={}", report.passed(), report.failed()));
            for (i, e) in &report.point_errors {
                t.footer.push(format!("point {i}: {e}"));
            }
            t.render()
        }
    }
}

/// Parses `--point`, or draws point 0 of the seeded stream when absent.
pub fn resolve_point(config: &RunConfig, params: &ModelParams, point: Option<&str>) -> Result<Point> {
    match point {
        None => Ok(sample_point(params, &mut point_rng(config.seed, 0))),
        Some(text) => {
            let coords = text
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Config(format!("--point: {s:?} is not a number")))
                })
                .collect::<Result<Vec<f64>>>()?;
            if coords.len() != params.dim() {
                return Err(Error::Config(format!(
                    "--point needs {} coordinates for m = {}, got {}",
                    params.dim(),
                    params.m(),
                    coords.len()
                )));
            }
            params.point(&coords)
        }
    }
}

fn geometry_for(config: &RunConfig, point: Option<&str>) -> Result<GeometryAt> {
    config.validate()?;
    let params = config.params()?;
    let p = resolve_point(config, &params, point)?;
    geometry_at(&params, &p)
}

/// Ordered key/value record for single-point reports.
pub type Record = Vec<(&'static str, Value)>;

pub fn cmd_norm(config: &RunConfig, point: Option<&str>) -> Result<Record> {
    let geom = geometry_for(config, point)?;
    let r = norm_report(&geom, &FrameCurvature::closed(&geom)?)?;
    Ok(vec![
        ("q", Value::from(r.q)),
        ("f_z", real(r.f_z)),
        ("f_h", real(r.f_h)),
        ("rho", real(r.rho)),
        ("norm_frame", real(r.norm_frame)),
        ("norm_closed", real(r.norm_closed)),
        ("norm_residual", real(r.norm_residual)),
        ("scal", real(r.scal)),
        ("nu", real(r.nu)),
    ])
}

pub fn cmd_decompose(config: &RunConfig, point: Option<&str>) -> Result<Record> {
    let geom = geometry_for(config, point)?;
    let rtilde = rtilde_closed(&geom);
    let split = alekseevsky_split(&geom, &rtilde);
    let frame = g_h_frame(&geom)?;
    let mut rng = point_rng(config.seed, 1);
    let hk = hk_type_residual(&geom, &split.r1_part, 50, &mut rng);
    let inv = invariance_residual(&geom, 10, &mut rng);
    Ok(vec![
        ("q", Value::from(geom.params.quaternionic_dim())),
        ("f_z", real(geom.f_z)),
        ("f_h", real(geom.f_h)),
        ("rho", real(2.0 * geom.f_z)),
        ("nu", real(split.nu)),
        ("r0_frobenius", real(split.r0_part.in_frame(&frame).frobenius())),
        ("r1_frobenius", real(split.r1_part.in_frame(&frame).frobenius())),
        ("hk_type_residual", real(hk)),
        ("invariance_residual", real(inv)),
    ])
}

fn render_record(config: &RunConfig, record: &Record) -> String {
    match config.format {
        Format::Json => {
            let map: serde_json::Map<String, Value> = record.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
            to_json_string(&object([("config", config.to_json()), ("report", Value::Object(map))]))
        }
        Format::Csv => {
            let mut t = CsvTable::new(&record.iter().map(|(k, _)| *k).collect::<Vec<_>>());
            t.rows.push(
                record
                    .iter()
                    .map(|(_, v)| match v {
                        Value::Null => "NaN".to_string(),
                        other => other.to_string(),
                    })
                    .collect(),
            );
            t.render()
        }
    }
}

/// One row of a ρ sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub rho: f64,
    pub f_z: f64,
    pub f_h: f64,
    pub norm_closed: f64,
    pub norm_frame: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    /// Strictly monotone `norm_closed` column.
    pub monotone: bool,
    /// `norm_closed` equal along the whole grid to 1e-9 relative.
    pub constant: bool,
}

/// `steps` evenly spaced values from `lo` to `hi` inclusive.
pub fn rho_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|i| {
            if i + 1 == steps {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (steps - 1) as f64
            }
        })
        .collect()
}

pub fn cmd_sweep(config: &RunConfig, rho_min: f64, rho_max: f64, steps: usize) -> Result<Sweep> {
    config.validate()?;
    if !(rho_min.is_finite() && rho_max.is_finite() && rho_min > 0.0 && rho_min < rho_max) {
        return Err(Error::Config(format!(
            "need 0 < rho-min < rho-max, got [{rho_min}, {rho_max}]"
        )));
    }
    if steps < 2 {
        return Err(Error::Config(format!("steps must be at least 2, got {steps}")));
    }
    let params = config.params()?;
    let q = params.quaternionic_dim();
    let grid = rho_grid(rho_min, rho_max, steps);
    let rows = grid
        .par_iter()
        .enumerate()
        .map(|(i, &rho)| {
            let f_z = 0.5 * rho;
            let point = sample_point_with_f_z(&params, f_z, &mut point_rng(config.seed, i));
            let geom = geometry_at(&params, &point)?;
            Ok(SweepRow {
                rho,
                f_z: geom.f_z,
                f_h: geom.f_h,
                norm_closed: norm_at_rho(q, params.c(), rho)?,
                norm_frame: closed_norm_frame(&geom)?,
            })
        })
        .collect::<Result<Vec<SweepRow>>>()?;
    let closed: Vec<f64> = rows.iter().map(|r| r.norm_closed).collect();
    let first = closed[0];
    let constant = closed.iter().all(|v| (v - first).abs() <= 1e-9 * first.abs());
    Ok(Sweep {
        monotone: is_strictly_monotone(&closed),
        constant,
        rows,
    })
}

fn render_sweep(config: &RunConfig, sweep: &Sweep) -> String {
    let verdict = if sweep.monotone {
        "strictly monotone"
    } else if sweep.constant {
        "constant"
    } else {
        "not monotone"
    };
    let worst = sweep
        .rows
        .iter()
        .map(|r| (r.norm_frame - r.norm_closed).abs() / r.norm_closed)
        .fold(0.0_f64, f64::max);
    match config.format {
        Format::Csv => {
            let mut t = CsvTable::new(&["rho", "f_Z", "f_H", "norm_closed", "norm_frame"]);
            for r in &sweep.rows {
                t.rows.push(
                    [r.rho, r.f_z, r.f_h, r.norm_closed, r.norm_frame]
                        .iter()
                        .map(|v| real_text(*v))
                        .collect(),
                );
            }
            t.footer.push(format!("norm_closed: {verdict}"));
            t.footer
                .push(format!("max relative |norm_frame - norm_closed|: {}", real_text(worst)));
            t.render()
        }
        Format::Json => {
            let rows = sweep
                .rows
                .iter()
                .map(|r| {
                    object([
                        ("rho", real(r.rho)),
                        ("f_Z", real(r.f_z)),
                        ("f_H", real(r.f_h)),
                        ("norm_closed", real(r.norm_closed)),
                        ("norm_frame", real(r.norm_frame)),
                    ])
                })
                .collect();
            to_json_string(&object([
                ("config", config.to_json()),
                ("rows", Value::Array(rows)),
                ("norm_closed", Value::String(verdict.into())),
                ("max_relative_frame_error", real(worst)),
            ]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_ok(args: &[&str]) -> Outcome {
        run(std::iter::once("hkqk").chain(args.iter().copied()), None)
    }

    #[test]
    fn tol_scale_parsing() {
        assert_eq!(parse_tol_scale(None).unwrap(), 1.0);
        assert_eq!(parse_tol_scale(Some("2.5")).unwrap(), 2.5);
        assert!(parse_tol_scale(Some("zero")).is_err());
        assert!(parse_tol_scale(Some("-1")).is_err());
        let o = run(["hkqk", "norm", "--m", "0"], Some("abc"));
        assert_eq!(o.exit_code, 2);
    }

    #[test]
    fn config_validation() {
        let mut c = RunConfig::new(1, 1.0, 0);
        assert!(c.validate().is_ok());
        c.samples = 0;
        assert!(c.validate().is_err());
        let mut c = RunConfig::new(1, 1.0, 0);
        c.fd_step = 1e-2;
        assert!(c.validate().is_err());
        c.fd_step = 1e-9;
        assert!(c.validate().is_err());
        let mut c = RunConfig::new(1, 1.0, 0);
        c.tol_overrides.insert("no_such_check".into(), 1.0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn tolerances_scale_and_override() {
        let mut c = RunConfig::new(0, 1.0, 0);
        c.tol_scale = 10.0;
        assert_eq!(c.tolerance("quaternion_relations"), Some(1e-9));
        c.tol_overrides.insert("quaternion_relations".into(), 0.5);
        assert_eq!(c.tolerance("quaternion_relations"), Some(5.0));
        assert_eq!(c.tolerance("unknown"), None);
    }

    #[test]
    fn check_names_are_unique() {
        let mut names: Vec<&str> = suite::check_names().collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), CHECKS.len());
    }

    #[test]
    fn norm_reference_point() {
        let o = run_ok(&["norm", "--m", "0", "--c", "1", "--point", "2,0,0,0"]);
        assert_eq!(o.exit_code, 0, "{}", o.stderr);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        let n: f64 = v["report"]["norm_closed"].to_string().parse().unwrap();
        assert!((n - 6.279936).abs() < 1e-12);
        let rho: f64 = v["report"]["rho"].to_string().parse().unwrap();
        assert!((rho - 3.0).abs() < 1e-15);
    }

    #[test]
    fn norm_outside_domain_exits_one() {
        let o = run_ok(&["norm", "--m", "0", "--c", "1", "--point", "0.5,0,0,0"]);
        assert_eq!(o.exit_code, 1);
        assert!(o.stderr.contains("f_Z"));
    }

    #[test]
    fn point_length_is_a_config_error() {
        let o = run_ok(&["norm", "--m", "1", "--point", "2,0,0,0"]);
        assert_eq!(o.exit_code, 2);
    }

    #[test]
    fn sweep_range_errors() {
        assert_eq!(run_ok(&["sweep", "--rho-min", "2", "--rho-max", "1"]).exit_code, 2);
        assert_eq!(run_ok(&["sweep", "--steps", "1"]).exit_code, 2);
        assert_eq!(run_ok(&["sweep", "--rho-min", "0"]).exit_code, 2);
    }

    #[test]
    fn grid_endpoints() {
        let g = rho_grid(0.1, 10.0, 100);
        assert_eq!(g.len(), 100);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[99], 10.0);
    }
}
