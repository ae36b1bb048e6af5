//! Command-line front end. Exit codes: 0 success, 1 verification failure,
//! 2 usage or domain error.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{json, Value};

use crate::analysis::{
    self, format_f64, parse_list, FigureConfig, GridSpec, Quantity, Regime, SweepSpec, Table,
};
use crate::correlations::correlation_report;
use crate::error::{QetError, Result};
use crate::local_extraction::{
    completeness_defect, returned_kraus_is_feasible, solve_max_omega, thresholds,
};
use crate::qet_protocol::{extractable_energy, optimal_qet, run_protocol};
use crate::spin_model::{gibbs_state, gibbs_state_naive, mean_energy, GibbsState, SystemParams};
use crate::verify::{run_verify, VerifyConfig, DEFAULT_SEED};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "qetlab",
    version,
    about = "Energy teleportation and thermal discord for a coupled spin pair"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Write output to PATH instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct Point {
    /// Coupling kappa (>= 0).
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: f64,
    /// Temperature kT in [1e-6, 1e12].
    #[arg(long = "kT", allow_negative_numbers = true)]
    pub kt: f64,
}

#[derive(Debug, clap::Args)]
pub struct Grids {
    /// Coupling grid lo:hi:n[:log].
    #[arg(long = "kappa-grid")]
    pub kappa_grid: Option<GridSpec>,
    /// Temperature grid lo:hi:n[:log].
    #[arg(long = "kT-grid")]
    pub kt_grid: Option<GridSpec>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Thermal state: partition function, occupations, coefficients and density matrix.
    State {
        #[command(flatten)]
        point: Point,
        /// Evaluate the coefficients without overflow protection.
        #[arg(long)]
        naive_coeffs: bool,
    },
    /// Correlations, entanglement, thresholds, teleported and locally extractable energy.
    Report {
        #[command(flatten)]
        point: Point,
    },
    /// Teleportation protocol at the optimal angle (or at --theta).
    Qet {
        #[command(flatten)]
        point: Point,
        #[arg(long, allow_negative_numbers = true)]
        theta: Option<f64>,
    },
    /// Best local channel on B.
    Extract {
        #[command(flatten)]
        point: Point,
    },
    /// Te, T1, T2 for one coupling or a coupling grid.
    Thresholds {
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long = "kappa-grid")]
        kappa_grid: Option<GridSpec>,
    },
    /// Dataset for figure N (1..6).
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=6))]
        n: u8,
        #[command(flatten)]
        grids: Grids,
        /// Classical correlation levels, comma-separated.
        #[arg(long = "c-targets")]
        c_targets: Option<String>,
    },
    /// Quantities on a (kappa, kT) grid.
    Sweep {
        #[command(flatten)]
        grids: Grids,
        /// Comma-separated subset of discord, classical, mutual_info, E_A, E_B, omega_max, separable, thresholds.
        #[arg(
            long,
            default_value = "discord,classical,mutual_info,E_A,E_B,omega_max,separable"
        )]
        quantities: String,
    },
    /// Runs the self-verification suite.
    Verify {
        /// Seed for the Monte-Carlo checks.
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Random samples per parameter point.
        #[arg(long)]
        samples: Option<usize>,
        /// Override a check tolerance, NAME=VALUE (repeatable).
        #[arg(long = "tol", value_name = "NAME=VALUE")]
        tol: Vec<String>,
    },
}

/// Writes `f64` with 17 significant digits; layout from [`PrettyFormatter`].
struct SciFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for SciFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(format_f64(value).as_bytes())
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty JSON with every float in `{:.16e}` form; non-finite floats become null.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut buf, SciFormatter(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .expect("in-memory JSON serialization");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// Flattens a JSON document into a one-row table; nested keys are joined with '.'.
fn flatten(prefix: &str, v: &Value, cols: &mut Vec<String>, cells: &mut Vec<String>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => map
            .iter()
            .for_each(|(k, x)| flatten(&key(k), x, cols, cells)),
        Value::Array(items) => items
            .iter()
            .enumerate()
            .for_each(|(i, x)| flatten(&key(&i.to_string()), x, cols, cells)),
        other => {
            cols.push(prefix.to_string());
            cells.push(match other {
                Value::Null => String::new(),
                Value::Number(n) if n.is_f64() => format_f64(n.as_f64().unwrap()),
                Value::Number(n) => n.to_string(),
                Value::String(s) => s.clone(),
                x => x.to_string(),
            });
        }
    }
}

fn document_csv(v: &Value) -> String {
    let (mut cols, mut cells) = (Vec::new(), Vec::new());
    flatten("", v, &mut cols, &mut cells);
    format!("{}\n{}\n", cols.join(","), cells.join(","))
}

enum Output {
    Document(Value),
    Table(Table),
}

impl Output {
    fn render(&self, format: Format) -> String {
        match (self, format) {
            (Output::Document(v), Format::Json) => to_json(v),
            (Output::Document(v), Format::Csv) => document_csv(v),
            (Output::Table(t), Format::Json) => to_json(t),
            (Output::Table(t), Format::Csv) => t.to_csv(),
        }
    }
}

fn value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn state_for(point: &Point) -> Result<GibbsState> {
    gibbs_state(&SystemParams::new(point.kappa, point.kt)?)
}

fn cmd_state(point: &Point, naive: bool) -> Result<Value> {
    let params = SystemParams::new(point.kappa, point.kt)?;
    let s = if naive {
        gibbs_state_naive(&params)?
    } else {
        gibbs_state(&params)?
    };
    Ok(json!({
        "kappa": s.kappa(),
        "kT": s.kt(),
        "m": s.m(),
        "coefficients": if naive { "naive" } else { "stable" },
        "Z": s.z,
        "p": s.p,
        "c1": s.c1,
        "c2": s.c2,
        "c3": s.c3,
        "r": s.r,
        "mean_energy": mean_energy(&s),
        "trace": s.rho.trace().re,
        "rho": value(&s.rho),
    }))
}

fn regime_label(kt: f64, t1: Option<f64>, t2: Option<f64>) -> &'static str {
    match t1 {
        Some(t1) => Regime::classify(kt, t1, t2).label(),
        // no coupling: nothing to teleport, the local channel always works
        None => Regime::LocalExtraction.label(),
    }
}

fn cmd_report(point: &Point) -> Result<Value> {
    let s = state_for(point)?;
    let corr = correlation_report(&s)?;
    let qet = optimal_qet(&s)?;
    let ext = solve_max_omega(&s);
    let th = thresholds(point.kappa)?;
    Ok(json!({
        "kappa": s.kappa(),
        "kT": s.kt(),
        "I": corr.mutual_info,
        "C": corr.classical,
        "D": corr.discord,
        "separable": corr.separable,
        "ppt_eigenvalues": corr.ppt_eigs,
        "Te": th.te,
        "T1": th.t1,
        "T2": th.t2,
        "E_A": qet.e_a,
        "theta_o": qet.theta_o,
        "E_B_max": qet.e_b_max,
        "omega_max": ext.omega_max,
        "branch": value(&ext.branch),
        "regime": regime_label(point.kt, th.t1, th.t2),
    }))
}

fn cmd_qet(point: &Point, theta: Option<f64>) -> Result<Value> {
    let s = state_for(point)?;
    let q = optimal_qet(&s)?;
    let th = theta.unwrap_or(q.theta_o);
    let trace = run_protocol(&s, th)?;
    let outcomes: Vec<Value> = trace
        .branches
        .iter()
        .map(|b| {
            json!({
                "alpha": b.alpha.sign(),
                "q": b.prob,
                "energy_after_measurement": b.energy_i,
                "energy_after_unitary": b.energy_iii,
            })
        })
        .collect();
    Ok(json!({
        "kappa": s.kappa(),
        "kT": s.kt(),
        "result": value(&q),
        "theta": th,
        "E_B_theta": extractable_energy(&s, th)?,
        "energy_after_measurement": trace.energy_i,
        "energy_after_unitary": trace.energy_iii,
        "outcomes": outcomes,
    }))
}

fn cmd_extract(point: &Point) -> Result<Value> {
    let s = state_for(point)?;
    let ext = solve_max_omega(&s);
    Ok(json!({
        "kappa": s.kappa(),
        "kT": s.kt(),
        "result": value(&ext),
        "feasible": returned_kraus_is_feasible(&ext),
        "completeness_defect": completeness_defect(&ext.kraus),
    }))
}

fn cmd_thresholds(kappa: Option<f64>, grid: Option<&GridSpec>) -> Result<Output> {
    let kappas = match (kappa, grid) {
        (Some(k), None) => vec![k],
        (None, Some(g)) => g.values(),
        _ => {
            return Err(QetError::Domain(
                "thresholds needs exactly one of --kappa or --kappa-grid".into(),
            ))
        }
    };
    let mut t = Table::new(&["kappa", "Te", "T1", "T2"]);
    for k in kappas {
        let th = thresholds(k)?;
        t.push(vec![k.into(), th.te.into(), th.t1.into(), th.t2.into()]);
    }
    Ok(Output::Table(t))
}

fn figure_config(grids: &Grids, c_targets: Option<&str>) -> Result<FigureConfig> {
    let c_targets = c_targets.map(parse_list).transpose()?;
    Ok(FigureConfig {
        kappa_values: grids.kappa_grid.as_ref().map(GridSpec::values),
        kt_values: grids.kt_grid.as_ref().map(GridSpec::values),
        c_targets,
    })
}

fn cmd_sweep(grids: &Grids, quantities: &str) -> Result<Table> {
    let (Some(kg), Some(tg)) = (&grids.kappa_grid, &grids.kt_grid) else {
        return Err(QetError::Domain(
            "sweep needs --kappa-grid and --kT-grid".into(),
        ));
    };
    let quantities = quantities
        .split(',')
        .map(str::parse)
        .collect::<Result<Vec<Quantity>>>()?;
    analysis::sweep(&SweepSpec {
        kappa_values: kg.values(),
        kt_values: tg.values(),
        quantities,
    })
}

/// Result of one invocation: text for standard output (or `--out`),
/// diagnostics for standard error, and the exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

fn execute(cfg: &RunConfig) -> Result<(Output, Vec<String>, i32)> {
    let doc = |v: Value| Ok((Output::Document(v), vec![], EXIT_OK));
    match &cfg.command {
        Command::State {
            point,
            naive_coeffs,
        } => doc(cmd_state(point, *naive_coeffs)?),
        Command::Report { point } => doc(cmd_report(point)?),
        Command::Qet { point, theta } => doc(cmd_qet(point, *theta)?),
        Command::Extract { point } => doc(cmd_extract(point)?),
        Command::Thresholds { kappa, kappa_grid } => Ok((
            cmd_thresholds(*kappa, kappa_grid.as_ref())?,
            vec![],
            EXIT_OK,
        )),
        Command::Figure {
            n,
            grids,
            c_targets,
        } => {
            let (t, notes) = analysis::figure(*n, &figure_config(grids, c_targets.as_deref())?)?;
            Ok((Output::Table(t), notes, EXIT_OK))
        }
        Command::Sweep { grids, quantities } => Ok((
            Output::Table(cmd_sweep(grids, quantities)?),
            vec![],
            EXIT_OK,
        )),
        Command::Verify { seed, samples, tol } => {
            let mut vc = VerifyConfig {
                seed: *seed,
                ..VerifyConfig::default()
            };
            if let Some(n) = samples {
                vc.samples = *n;
            }
            for t in tol {
                vc.override_tolerance(t)?;
            }
            let summary = run_verify(&vc)?;
            let notes = summary
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| {
                    format!(
                        "FAILED {}: residual {:e} > tolerance {:e}",
                        c.name, c.residual, c.tolerance
                    )
                })
                .collect();
            let code = if summary.passed {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            };
            Ok((Output::Document(value(&summary)), notes, code))
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome {
                    stdout: text,
                    stderr: String::new(),
                    code,
                }
            } else {
                Outcome {
                    stdout: String::new(),
                    stderr: text,
                    code,
                }
            };
        }
    };
    match execute(&cfg) {
        Ok((out, notes, code)) => {
            let text = out.render(cfg.format);
            let mut stderr: String = notes.iter().map(|n| format!("{n}\n")).collect();
            let stdout = match &cfg.out {
                Some(path) => match std::fs::write(path, &text) {
                    Ok(()) => String::new(),
                    Err(e) => {
                        stderr.push_str(&format!("error: cannot write {}: {e}\n", path.display()));
                        return Outcome {
                            stdout: String::new(),
                            stderr,
                            code: EXIT_USAGE,
                        };
                    }
                },
                None => text,
            };
            Outcome {
                stdout,
                stderr,
                code,
            }
        }
        Err(e) => Outcome {
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            code: EXIT_USAGE,
        },
    }
}
