//! Command-line front end.
//!
//! Every command prints an [`OutputEnvelope`] as JSON, or a flat CSV table
//! with `--format csv`. Exit codes: 0 success, 1 failed verification,
//! 2 argument or domain error, 3 I/O error.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::{SecondsFormat, Utc};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Error;
use crate::extremal::{sweep_extreme_points_with, SweepObjective};
use crate::params::{classify, theorem_bound, validate_index, ProblemParams};
use crate::surface::{critical_points, CriticalKind, Surface};
use crate::verify::{fmt_float, run_full, ReportConfig, DEFAULT_SEED};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputEnvelope {
    pub schema_version: String,
    pub command: String,
    pub params_echo: BTreeMap<String, Value>,
    pub payload: Value,
    /// RFC 3339, UTC.
    pub generated_at: String,
}

impl OutputEnvelope {
    pub fn new(command: &str, params_echo: BTreeMap<String, Value>, payload: Value) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            command: command.to_string(),
            params_echo,
            payload,
            generated_at: Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    #[value(name = "F")]
    F,
    #[value(name = "G")]
    G,
}

#[derive(Debug, Parser)]
#[command(
    name = "zalcman",
    version,
    about = "Generalized Zalcman bounds for close-to-convex functions"
)]
pub struct Cli {
    #[arg(long, value_enum, global = true, default_value = "json")]
    pub format: Format,
    /// Seed for randomized sampling.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the three-branch bound.
    Bound {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        lambda: f64,
    },
    /// Tabulate F or G on a uniform lattice of the square.
    Surface {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        lambda: f64,
        #[arg(long, value_enum, default_value = "F")]
        which: Which,
        #[arg(long, default_value_t = 101)]
        grid: usize,
    },
    /// Closed-form critical points of F.
    Critical {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        lambda: f64,
    },
    /// Maximize the functional over the extreme-point torus.
    Sweep {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 512)]
        grid: usize,
    },
    /// Run the full verification and write a report.
    Verify {
        #[arg(long, default_value_t = 3)]
        n_min: u64,
        #[arg(long, default_value_t = 10)]
        n_max: u64,
        #[arg(long, default_value_t = 15)]
        lambda_samples: usize,
        #[arg(long, default_value_t = 512)]
        grid: usize,
        /// Extra random λ per n.
        #[arg(long, default_value_t = 2)]
        random_samples: usize,
    },
}

#[derive(Debug)]
pub enum CliError {
    Domain(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Domain(m) => write!(f, "error: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

/// Rendered output plus the exit code it implies.
#[derive(Debug)]
pub struct Outcome {
    pub envelope: OutputEnvelope,
    pub csv: String,
    pub code: u8,
}

fn params(n: u64, lambda: f64) -> Result<ProblemParams<f64>, CliError> {
    Ok(ProblemParams::new(validate_index(n)?, lambda)?)
}

fn echo(pairs: &[(&str, Value)]) -> BTreeMap<String, Value> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Lattice `-1 = x_0 < ... < x_{grid-1} = 1`.
pub fn linspace(grid: usize) -> Vec<f64> {
    (0..grid)
        .map(|i| -1.0 + 2.0 * i as f64 / (grid - 1) as f64)
        .collect()
}

pub fn cmd_bound(n: u64, lambda: f64) -> Result<Outcome, CliError> {
    let p = params(n, lambda)?;
    let bound = theorem_bound(&p);
    let regime = classify(&p);
    let th = p.thresholds();
    let payload = json!({ "regime": regime.as_str(), "bound": bound, "thresholds": th });
    Ok(Outcome {
        envelope: OutputEnvelope::new(
            "bound",
            echo(&[("n", json!(n)), ("lambda", json!(lambda))]),
            payload,
        ),
        csv: csv_table(
            &["n", "lambda", "regime", "bound"],
            &[vec![
                n.to_string(),
                fmt_float(lambda),
                regime.as_str().into(),
                fmt_float(bound),
            ]],
        ),
        code: 0,
    })
}

/// Returns the outcome and the lattice CSV.
pub fn cmd_surface(
    n: u64,
    lambda: f64,
    which: Which,
    grid: usize,
) -> Result<(Outcome, String), CliError> {
    let p = params(n, lambda)?;
    if grid < 2 {
        return Err(CliError::Domain(format!(
            "grid must be at least 2, got {grid}"
        )));
    }
    let s = Surface::new(&p);
    let axis = linspace(grid);
    let mut rows = Vec::with_capacity(grid * grid);
    let (mut min, mut max) = ((f64::INFINITY, 0.0, 0.0), (f64::NEG_INFINITY, 0.0, 0.0));
    for &u in &axis {
        for &v in &axis {
            let value = match which {
                Which::F => s.f(u, v),
                Which::G => s.g(u, v),
            };
            if value < min.0 {
                min = (value, u, v);
            }
            if value > max.0 {
                max = (value, u, v);
            }
            rows.push(vec![fmt_float(u), fmt_float(v), fmt_float(value)]);
        }
    }
    let data = csv_table(&["u", "v", "value"], &rows);
    let name = match which {
        Which::F => "F",
        Which::G => "G",
    };
    let payload = json!({
        "which": name,
        "rows": grid * grid,
        "min": { "value": min.0, "u": min.1, "v": min.2 },
        "max": { "value": max.0, "u": max.1, "v": max.2 },
    });
    let summary = csv_table(
        &["stat", "value", "u", "v"],
        &[
            vec![
                "min".into(),
                fmt_float(min.0),
                fmt_float(min.1),
                fmt_float(min.2),
            ],
            vec![
                "max".into(),
                fmt_float(max.0),
                fmt_float(max.1),
                fmt_float(max.2),
            ],
        ],
    );
    let outcome = Outcome {
        envelope: OutputEnvelope::new(
            "surface",
            echo(&[
                ("n", json!(n)),
                ("lambda", json!(lambda)),
                ("which", json!(name)),
                ("grid", json!(grid)),
            ]),
            payload,
        ),
        csv: summary,
        code: 0,
    };
    Ok((outcome, data))
}

pub fn cmd_critical(n: u64, lambda: f64) -> Result<Outcome, CliError> {
    let p = params(n, lambda)?;
    let set = critical_points(&p);
    let rows: Vec<Vec<String>> = set
        .points
        .iter()
        .map(|c| {
            vec![
                match c.kind {
                    CriticalKind::Origin => "origin".to_string(),
                    CriticalKind::InteriorPair => "interior_pair".to_string(),
                },
                fmt_float(c.u),
                fmt_float(c.v),
                fmt_float(c.f_value),
                fmt_float(c.gradient_residual),
            ]
        })
        .collect();
    let payload = json!({
        "count": set.points.len(),
        "points": set.points,
        "regime_note": set.regime_note,
    });
    Ok(Outcome {
        envelope: OutputEnvelope::new(
            "critical",
            echo(&[("n", json!(n)), ("lambda", json!(lambda))]),
            payload,
        ),
        csv: csv_table(&["kind", "u", "v", "value", "gradient_residual"], &rows),
        code: 0,
    })
}

pub fn cmd_sweep(n: u64, lambda: f64, grid: usize) -> Result<Outcome, CliError> {
    let p = params(n, lambda)?;
    let sweep = sweep_extreme_points_with(&p, grid, SweepObjective::RealPart)?;
    let majorant = sweep_extreme_points_with(&p, grid, SweepObjective::SurrogateJ)?;
    let bound = theorem_bound(&p);
    let gap = bound - sweep.value;
    let payload = json!({
        "sweep_max": sweep.value,
        "argmax_s": sweep.argmax.s(),
        "argmax_t": sweep.argmax.t(),
        "bound": bound,
        "gap": gap,
        "majorant_max": majorant.value,
        "majorant_argmax_s": majorant.argmax.s(),
        "majorant_argmax_t": majorant.argmax.t(),
        "majorant_gap": bound - majorant.value,
        "evaluations": sweep.evaluations + majorant.evaluations,
    });
    Ok(Outcome {
        envelope: OutputEnvelope::new(
            "sweep",
            echo(&[
                ("n", json!(n)),
                ("lambda", json!(lambda)),
                ("grid", json!(grid)),
            ]),
            payload,
        ),
        csv: csv_table(
            &[
                "n",
                "lambda",
                "sweep_max",
                "argmax_s",
                "argmax_t",
                "bound",
                "gap",
                "majorant_max",
            ],
            &[vec![
                n.to_string(),
                fmt_float(lambda),
                fmt_float(sweep.value),
                fmt_float(sweep.argmax.s()),
                fmt_float(sweep.argmax.t()),
                fmt_float(bound),
                fmt_float(gap),
                fmt_float(majorant.value),
            ]],
        ),
        code: 0,
    })
}

/// Report files written by `verify --out`.
#[derive(Debug, Clone)]
pub struct ReportFiles {
    /// `key=value` records, one per line, after `#` flag lines.
    pub text: String,
    pub json: String,
}

pub fn cmd_verify(config: &ReportConfig) -> Result<(Outcome, ReportFiles), CliError> {
    validate_index(config.n_min as u64)?;
    let report = run_full(config)?;
    let mut text = String::new();
    for flag in &report.flags {
        text.push_str(&format!("# flag {}: {}\n", flag.name, flag.message));
    }
    text.push_str(&report.to_text());
    let rows: Vec<Vec<String>> = report
        .records
        .iter()
        .map(|r| {
            vec![
                r.check_id.clone(),
                r.n.to_string(),
                r.lambda.map_or_else(|| "NaN".to_string(), fmt_float),
                r.passed.to_string(),
                fmt_float(r.margin),
            ]
        })
        .collect();
    let code = if report.totals.failed == 0 { 0 } else { 1 };
    let failures: Vec<_> = report.failures().cloned().collect();
    let payload = json!({
        "totals": report.totals,
        "summary": report.summary,
        "flags": report.flags,
        "failures": failures,
    });
    let envelope = OutputEnvelope::new(
        "verify",
        echo(&[
            ("n_min", json!(config.n_min)),
            ("n_max", json!(config.n_max)),
            ("lambda_samples", json!(config.lambda_samples)),
            ("grid", json!(config.grid)),
            ("random_samples", json!(config.random_samples)),
            ("seed", json!(config.seed)),
        ]),
        payload,
    );
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    Ok((
        Outcome {
            envelope,
            csv: csv_table(&["check_id", "n", "lambda", "passed", "margin"], &rows),
            code,
        },
        ReportFiles { text, json },
    ))
}

fn render(outcome: &Outcome, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s =
                serde_json::to_string_pretty(&outcome.envelope).expect("envelope serializes");
            s.push('\n');
            s
        }
        Format::Csv => outcome.csv.clone(),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => write_file(path, text),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn json_mirror_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Executes a parsed command line and returns the process exit code.
pub fn execute(cli: &Cli) -> Result<u8, CliError> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Bound { n, lambda } => {
            let o = cmd_bound(*n, *lambda)?;
            emit(&render(&o, cli.format), out)?;
            Ok(o.code)
        }
        Command::Critical { n, lambda } => {
            let o = cmd_critical(*n, *lambda)?;
            emit(&render(&o, cli.format), out)?;
            Ok(o.code)
        }
        Command::Sweep { n, lambda, grid } => {
            let o = cmd_sweep(*n, *lambda, *grid)?;
            emit(&render(&o, cli.format), out)?;
            Ok(o.code)
        }
        Command::Surface {
            n,
            lambda,
            which,
            grid,
        } => {
            let (o, data) = cmd_surface(*n, *lambda, *which, *grid)?;
            match (out, cli.format) {
                // the lattice goes to the file, the envelope to stdout
                (Some(path), format) => {
                    write_file(path, &data)?;
                    emit(&render(&o, format), None)?;
                }
                (None, Format::Csv) => emit(&data, None)?,
                (None, Format::Json) => emit(&render(&o, Format::Json), None)?,
            }
            Ok(o.code)
        }
        Command::Verify {
            n_min,
            n_max,
            lambda_samples,
            grid,
            random_samples,
        } => {
            if n_min > n_max {
                return Err(CliError::Domain(format!(
                    "n-min must not exceed n-max, got {n_min} > {n_max}"
                )));
            }
            let config = ReportConfig {
                n_min: validate_index(*n_min)?,
                n_max: validate_index(*n_max)?,
                lambda_samples: *lambda_samples,
                grid: *grid,
                random_samples: *random_samples,
                seed: cli.seed,
            };
            let (o, files) = cmd_verify(&config)?;
            if let Some(path) = out {
                write_file(path, &files.text)?;
                write_file(&json_mirror_path(path), &files.json)?;
            }
            emit(&render(&o, cli.format), None)?;
            Ok(o.code)
        }
    }
}

/// Parses `args`, runs, and maps every failure onto the exit-code contract.
pub fn run<I, S>(args: I) -> ExitCode
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
