//! Argument parsing, mode resolution and dispatch.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use oprange::linalg::{DEFAULT_EQ_ATOL, DEFAULT_RANK_RTOL};
use oprange::{Error, Matrix, Mode, Rational, Subspace, Tolerance};

use crate::commands::{self, Payload};
use crate::error::{CliError, EXIT_INPUT, EXIT_OK};
use crate::io::{read_matrix_file, Format, RawMatrix, Scalar};
use crate::report::{render_pretty, to_json_text, InputRecord, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Json,
    Pretty,
}

#[derive(Debug, Parser)]
#[command(
    name = "oprange",
    version,
    about = "Domination, closures and Lebesgue decompositions of operator pairs"
)]
pub struct Cli {
    /// Scalar mode. Defaults to exact, or float when any input is Matrix Market.
    #[arg(long, global = true, value_enum, env = "OPRANGE_MODE")]
    pub mode: Option<ModeArg>,
    /// Relative singular value cutoff for float rank decisions.
    #[arg(long, global = true, default_value_t = DEFAULT_RANK_RTOL)]
    pub rank_rtol: f64,
    /// Absolute tolerance for float comparisons.
    #[arg(long, global = true, default_value_t = DEFAULT_EQ_ATOL)]
    pub eq_atol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Emit::Json)]
    pub emit: Emit,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Domination, almost domination and singularity of B with respect to A.
    Classify { a: PathBuf, b: PathBuf },
    /// Lebesgue decomposition of B with respect to A.
    Decompose {
        a: PathBuf,
        b: PathBuf,
        /// Columns spanning the parameter subspace of a Lebesgue type decomposition.
        #[arg(long)]
        l: Option<PathBuf>,
    },
    /// Radon-Nikodym derivative of an almost dominated B1 with respect to A.
    Rnderiv { a: PathBuf, b1: PathBuf },
    /// Closure of L(A,B) and, in float mode, the canonical contractions.
    Closure { a: PathBuf, b: PathBuf },
    /// Adjoint of L(A,B), geometric and algebraic.
    Adjoint { a: PathBuf, b: PathBuf },
    /// Diagonal tower run from a JSON config.
    Tower { config: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::Decompose { .. } => "decompose",
            Command::Rnderiv { .. } => "rnderiv",
            Command::Closure { .. } => "closure",
            Command::Adjoint { .. } => "adjoint",
            Command::Tower { .. } => "tower",
        }
    }
}

/// Exit code plus what to write on each stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Loaded {
    role: &'static str,
    path: PathBuf,
    raw: RawMatrix,
}

fn load(role: &'static str, path: &Path) -> Result<Loaded, CliError> {
    Ok(Loaded {
        role,
        path: path.to_path_buf(),
        raw: read_matrix_file(path)?,
    })
}

fn resolve_mode(explicit: Option<ModeArg>, inputs: &[Loaded]) -> Result<Mode, CliError> {
    let has_mtx = inputs.iter().any(|i| i.raw.format == Format::MatrixMarket);
    match explicit {
        Some(ModeArg::Float) => Ok(Mode::Float),
        Some(ModeArg::Exact) if has_mtx => Err(CliError::Core(Error::MixedMode(
            "Matrix Market input is float data and cannot run in exact mode".into(),
        ))),
        Some(ModeArg::Exact) => Ok(Mode::Exact),
        None if has_mtx => Ok(Mode::Float),
        None => Ok(Mode::Exact),
    }
}

fn convert<F: Scalar>(l: &Loaded) -> Result<Matrix<F>, CliError> {
    l.raw
        .to_matrix::<F>()
        .map_err(|m| CliError::parse(&l.path, m))
}

fn dispatch<F: Scalar>(
    command: &Command,
    inputs: &[Loaded],
    tol: &Tolerance,
) -> Result<Payload, CliError> {
    let m: Vec<Matrix<F>> = inputs.iter().map(convert).collect::<Result<_, _>>()?;
    let payload = match command {
        Command::Classify { .. } => commands::classify_payload(&m[0], &m[1], tol)?,
        Command::Decompose { .. } => {
            let l = m.get(2).map(|basis| Subspace::span(basis, tol));
            if let Some(l) = &l {
                if l.ambient_dim() != m[1].rows() {
                    return Err(Error::DimensionMismatch(format!(
                        "L lives in a space of dimension {}, B has {} rows",
                        l.ambient_dim(),
                        m[1].rows()
                    ))
                    .into());
                }
            }
            commands::decompose_payload(&m[0], &m[1], l.as_ref(), tol)?
        }
        Command::Rnderiv { .. } => commands::rnderiv_payload(&m[0], &m[1], tol)?,
        Command::Closure { .. } => commands::closure_payload(&m[0], &m[1], tol)?,
        Command::Adjoint { .. } => commands::adjoint_payload(&m[0], &m[1], tol)?,
        Command::Tower { .. } => unreachable!("towers are dispatched separately"),
    };
    Ok(payload)
}

fn record(l: &Loaded) -> InputRecord {
    InputRecord {
        role: l.role.to_string(),
        path: l.path.display().to_string(),
        format: l.raw.format,
        rows: Some(l.raw.rows),
        cols: Some(l.raw.cols),
    }
}

fn execute(cli: &Cli) -> Result<Report, CliError> {
    let tol = Tolerance::new(cli.rank_rtol, cli.eq_atol)?;
    if let Command::Tower { config } = &cli.command {
        let text = std::fs::read_to_string(config).map_err(|e| CliError::io(config, e))?;
        let tower = commands::parse_tower(&text).map_err(|m| CliError::parse(config, m))?;
        let payload = commands::tower_payload(&tower, &tol)?;
        return Ok(Report {
            command: "tower",
            mode: Mode::Exact,
            inputs: vec![InputRecord {
                role: "config".into(),
                path: config.display().to_string(),
                format: Format::Json,
                rows: None,
                cols: None,
            }],
            tolerances: tol,
            results: payload.results,
            verification: payload.verification,
            finite_dim_collapse: None,
        });
    }
    let inputs = match &cli.command {
        Command::Classify { a, b } | Command::Closure { a, b } | Command::Adjoint { a, b } => {
            vec![load("a", a)?, load("b", b)?]
        }
        Command::Decompose { a, b, l } => {
            let mut v = vec![load("a", a)?, load("b", b)?];
            if let Some(l) = l {
                v.push(load("l", l)?);
            }
            v
        }
        Command::Rnderiv { a, b1 } => vec![load("a", a)?, load("b1", b1)?],
        Command::Tower { .. } => unreachable!(),
    };
    let mode = resolve_mode(cli.mode, &inputs)?;
    let payload = match mode {
        Mode::Exact => dispatch::<Rational>(&cli.command, &inputs, &tol)?,
        Mode::Float => dispatch::<f64>(&cli.command, &inputs, &tol)?,
    };
    Ok(Report {
        command: cli.command.name(),
        mode,
        inputs: inputs.iter().map(record).collect(),
        tolerances: tol,
        results: payload.results,
        verification: payload.verification,
        finite_dim_collapse: payload.finite_dim_collapse,
    })
}

fn emit(v: &serde_json::Value, how: Emit) -> String {
    match how {
        Emit::Json => to_json_text(v),
        Emit::Pretty => render_pretty(v),
    }
}

/// Runs the tool on `args` (including the program name) without touching the process.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome {
                    code: EXIT_OK,
                    stdout: e.to_string(),
                    stderr: String::new(),
                };
            }
            let err = CliError::Usage(e.kind().to_string());
            return Outcome {
                code: EXIT_INPUT,
                stdout: to_json_text(&err.to_json()),
                stderr: e.to_string(),
            };
        }
    };
    match execute(&cli) {
        Ok(report) => Outcome {
            code: EXIT_OK,
            stdout: emit(&report.to_json(), cli.emit),
            stderr: String::new(),
        },
        Err(err) => Outcome {
            code: err.exit_code(),
            stdout: emit(&err.to_json(), cli.emit),
            stderr: format!("oprange: {err}\n"),
        },
    }
}
