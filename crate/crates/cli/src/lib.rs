//! `freeprod` command line: compute, verify, sweep and explain free
//! products of algebra specs given as JSON files.
//!
//! Exit codes: 0 success, 1 invalid input or usage, 2 verification
//! mismatch, 3 input outside what the requested operation supports,
//! 4 internal invariant violation.

mod render;
mod sweep;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use freeprod::abelian::{cross_check, AbelianError, CheckResult};
use freeprod::{classify_free_product, parse_spec, AlgebraSpec, Rational, SpecError, StructureError, StructureReport};
use freeprod_rmt::{verify, RmtConfig, RmtError, RmtReport};
use serde::Serialize;

pub use sweep::{apply_parameter, ParamPath};

#[derive(Debug, Parser)]
#[command(
    name = "freeprod",
    version,
    about = "Structure of free products of multi-matrix algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decompose M1 ⋆ M2 into its discrete and continuous parts.
    Compute {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check the decomposition against the pairwise atom rule (abelian
    /// inputs) and against random matrices (tracial inputs).
    Verify {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        /// Comma-separated seeds.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
        seeds: Vec<u64>,
        /// Allowed deviation of an empirical weight from its prediction.
        #[arg(long, default_value_t = 0.02)]
        tol: f64,
        /// Meet cutoff δ.
        #[arg(long, default_value_t = 1e-12)]
        delta: f64,
        /// Skip the random-matrix check.
        #[arg(long = "symbolic-only", alias = "symbolic")]
        symbolic_only: bool,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the pqp spectrum histograms as CSV here.
        #[arg(long)]
        histogram_out: Option<PathBuf>,
    },
    /// Vary one weight over a range and tabulate the atoms as CSV.
    ///
    /// PARAM addresses a weight of the first spec (prefix `b.` for the
    /// second): `blocks[i].weights[s]`, `geometric_blocks[k].head` or
    /// `diffuse[k].weight`. Every other weight of the same algebra is scaled
    /// by the same factor so the total stays 1.
    Sweep {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        param: String,
        #[arg(long)]
        from: Rational,
        #[arg(long)]
        to: Rational,
        #[arg(long)]
        step: Rational,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the derivation steps with their citations.
    Explain { a: PathBuf, b: PathBuf },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Spec { path: String, source: SpecError },
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Rmt(#[from] RmtError),
    #[error("verification failed")]
    Mismatch,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Spec { .. } => 1,
            CliError::Mismatch => 2,
            CliError::Structure(e) => structure_code(e),
            CliError::Rmt(e) => match e {
                RmtError::InvalidConfig(_) | RmtError::SizeTooSmall(_) => 1,
                RmtError::AllSeedsFailed(_) | RmtError::IllConditioned { .. } => 2,
                RmtError::NotTracial(_) => 3,
                RmtError::Numerical(_) => 4,
                RmtError::Structure(s) => structure_code(s),
            },
        }
    }
}

fn structure_code(e: &StructureError) -> u8 {
    match e {
        StructureError::Spec(_) => 1,
        StructureError::Modular(_) | StructureError::UnsupportedNonTracialDim4 => 3,
        StructureError::NotDim4 | StructureError::IdentityViolation(_) => 4,
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let shown = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{shown}");
                    0
                }
                _ => {
                    let _ = write!(err, "{shown}");
                    1
                }
            };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn load(path: &Path) -> Result<AlgebraSpec, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_spec(&text).map_err(|source| CliError::Spec {
        path: path.display().to_string(),
        source,
    })
}

fn emit(text: &str, target: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    let io = |path: &str, source| CliError::Io {
        path: path.to_string(),
        source,
    };
    match target {
        Some(p) => fs::write(p, text).map_err(|e| io(&p.display().to_string(), e)),
        None => out.write_all(text.as_bytes()).map_err(|e| io("<stdout>", e)),
    }
}

#[derive(Debug, Serialize)]
struct VerifyOutput<'a> {
    structure: &'a StructureReport,
    cross_check: Option<&'a CheckResult>,
    rmt: Option<&'a RmtReport>,
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Compute {
            a,
            b,
            format,
            out: target,
        } => {
            let (a, b) = (load(&a)?, load(&b)?);
            let report = classify_free_product(&a, &b)?;
            let text = match format {
                Format::Json => report.to_json() + "\n",
                Format::Human => render::human(&a, &b, &report),
            };
            emit(&text, target.as_deref(), out)
        }
        Command::Explain { a, b } => {
            let (a, b) = (load(&a)?, load(&b)?);
            let report = classify_free_product(&a, &b)?;
            emit(&render::explain(&a, &b, &report), None, out)
        }
        Command::Sweep {
            a,
            b,
            param,
            from,
            to,
            step,
            out: target,
        } => {
            let (a, b) = (load(&a)?, load(&b)?);
            let path: ParamPath = param.parse().map_err(CliError::Usage)?;
            let csv = sweep::sweep(&a, &b, &path, &from, &to, &step)?;
            emit(&csv, target.as_deref(), out)
        }
        Command::Verify {
            a,
            b,
            n,
            seeds,
            tol,
            delta,
            symbolic_only,
            format,
            out: target,
            histogram_out,
        } => {
            let (a, b) = (load(&a)?, load(&b)?);
            let report = classify_free_product(&a, &b)?;
            let check = match cross_check(&a, &b) {
                Ok(c) => Some(c),
                Err(AbelianError::NotAbelian(_)) => None,
                Err(AbelianError::Structure(e)) => return Err(e.into()),
            };
            let rmt = if symbolic_only {
                None
            } else {
                let config = RmtConfig {
                    n,
                    seeds,
                    meet_cutoff: delta,
                    atom_tolerance: tol,
                    ..RmtConfig::default()
                };
                Some(verify(&a, &b, &config)?)
            };
            for f in rmt.iter().flat_map(|r| &r.seed_failures) {
                let _ = writeln!(err, "warning: seed {} failed: {}", f.seed, f.error);
            }
            if let (Some(path), Some(r)) = (&histogram_out, &rmt) {
                emit(&render::histograms_csv(r), Some(path), out)?;
            }
            let text = match format {
                Format::Json => {
                    serde_json::to_string_pretty(&VerifyOutput {
                        structure: &report,
                        cross_check: check.as_ref(),
                        rmt: rmt.as_ref(),
                    })
                    .expect("verify output serialization")
                        + "\n"
                }
                Format::Human => render::verify_human(&a, &b, &report, check.as_ref(), rmt.as_ref()),
            };
            emit(&text, target.as_deref(), out)?;
            let agrees = check.as_ref().is_none_or(CheckResult::agrees);
            let passed = rmt.as_ref().is_none_or(|r| r.passed);
            if agrees && passed {
                Ok(())
            } else {
                Err(CliError::Mismatch)
            }
        }
    }
}
