//! Command-line front end.
//!
//! Exit status: 0 on success, 1 when `verify-lemmas` finds a violation, 2 on
//! malformed input or any rejected operation. Diagnostics go to stderr as one
//! JSON object per line: `{"error": <kind>, "message": <text>}`.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extraction::{extract_biorthogonal, extract_frame};
use crate::frame::{
    canonical_dual_reconstruct, canonical_tight, check_counting_lemmas, frame_report,
    CountingSlacks, DEFAULT_TOLERANCE,
};
use crate::gallery::{generate, GallerySpec};
use crate::io::{self, Analysis};
use crate::linalg::{c64, CVector};
use crate::metrics::basis_metrics;
use crate::selection::{select_exhaustive, select_greedy, DEFAULT_C};
use crate::sweep::{run_sweep, SweepPlan};
use crate::system::VectorSystem;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Default tolerance for `verify-lemmas`.
pub const VERIFY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "framekit",
    version,
    about = "Finite frame analysis and Riesz subset extraction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Biorthogonal,
    Frame,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Exhaustive,
    Greedy,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a gallery system from a JSON spec and write it to a file.
    Gen {
        /// Path to a JSON spec file, or the spec itself when it starts with `{`.
        #[arg(long)]
        spec: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print frame bounds and basis constants as JSON.
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Extract a well-conditioned subset and write the round trace.
    Extract {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = DEFAULT_C)]
        c: f64,
        /// Residual threshold for frame mode.
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Select `size` columns with a large smallest singular value.
    Select {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        size: usize,
        #[arg(long, value_enum)]
        method: Method,
    },
    /// Check the counting inequalities and the frame decomposition.
    VerifyLemmas {
        #[arg(long = "in")]
        input: PathBuf,
        /// Also check that the canonical tight frame is tight.
        #[arg(long)]
        canonical: bool,
        #[arg(long, default_value_t = 10)]
        probes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = VERIFY_TOLERANCE)]
        tol: f64,
    },
    /// Run a sweep plan and write its CSV table.
    Sweep {
        #[arg(long)]
        plan: PathBuf,
    },
}

#[derive(Serialize)]
struct Diagnostic<'a> {
    error: &'a str,
    message: String,
}

fn report(stderr: &mut dyn Write, kind: &str, message: impl Into<String>) {
    let line = serde_json::to_string(&Diagnostic {
        error: kind,
        message: message.into().replace('\n', " "),
    })
    .expect("diagnostics serialize");
    let _ = writeln!(stderr, "{line}");
}

/// Parses `args` (including the program name) and runs one subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{}", e.render());
                return EXIT_OK;
            }
            report(stderr, "UsageError", e.render().to_string().trim());
            return EXIT_INPUT;
        }
    };
    match execute(cli.command, stdout) {
        Ok(status) => status,
        Err(e) => {
            report(stderr, e.kind(), e.to_string());
            EXIT_INPUT
        }
    }
}

fn print(stdout: &mut dyn Write, text: &str) -> Result<()> {
    writeln!(stdout, "{text}").map_err(|e| Error::schema("stdout", e.to_string()))
}

fn load_spec(spec: &str) -> Result<GallerySpec> {
    let text = if spec.trim_start().starts_with('{') {
        spec.to_owned()
    } else {
        io::read_text(Path::new(spec))?
    };
    io::from_json(&text)
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Gen { spec, out } => {
            let system = generate(&load_spec(&spec)?)?;
            io::write_system(&out, &system)?;
        }
        Command::Analyze { input } => {
            let system = io::read_system(&input)?;
            let analysis = Analysis {
                frame: frame_report(&system, DEFAULT_TOLERANCE),
                metrics: basis_metrics(&system),
            };
            print(stdout, &io::analysis_to_json(&analysis)?)?;
        }
        Command::Extract {
            input,
            mode,
            eps,
            c,
            delta,
            out,
        } => {
            let system = io::read_system(&input)?;
            let trace = match mode {
                Mode::Biorthogonal => {
                    if delta.is_some() {
                        return Err(Error::BadParameter(
                            "--delta applies to frame mode only".into(),
                        ));
                    }
                    extract_biorthogonal(&system, eps, c)?
                }
                Mode::Frame => extract_frame(&system, eps, c, delta)?,
            };
            io::write_text(&out, &io::trace_to_json(&trace)?)?;
        }
        Command::Select {
            input,
            size,
            method,
        } => {
            let system = io::read_system(&input)?;
            let result = match method {
                Method::Exhaustive => select_exhaustive(&system, size)?,
                Method::Greedy => select_greedy(&system, size)?,
            };
            print(stdout, &io::to_json(&result)?)?;
        }
        Command::VerifyLemmas {
            input,
            canonical,
            probes,
            seed,
            tol,
        } => {
            if tol.is_nan() || tol <= 0.0 {
                return Err(Error::BadParameter(format!(
                    "--tol must be positive, got {tol}"
                )));
            }
            let system = io::read_system(&input)?;
            let verdict = verify(&system, canonical, probes, seed, tol)?;
            print(stdout, &io::to_json(&verdict)?)?;
            return Ok(if verdict.holds {
                EXIT_OK
            } else {
                EXIT_VIOLATION
            });
        }
        Command::Sweep { plan } => {
            let plan = SweepPlan::from_json(&io::read_text(&plan)?)?;
            let csv = run_sweep(&plan)?;
            std::fs::write(&plan.output, csv).map_err(|e| {
                Error::schema(format!("file {}", plan.output.display()), e.to_string())
            })?;
        }
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DecompositionCheck {
    pub probes: usize,
    pub seed: u64,
    /// Largest `||sum c_i f_i - f|| / ||f||`.
    pub max_reconstruction_error: f64,
    /// Largest `|<f, S^-1 f> - sum |c_i|^2| / <f, S^-1 f>`.
    pub max_identity_error: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TightnessCheck {
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Verification {
    pub tolerance: f64,
    pub counting: CountingSlacks,
    pub counting_holds: bool,
    pub decomposition: DecompositionCheck,
    pub canonical: Option<TightnessCheck>,
    pub holds: bool,
}

/// Unit probes drawn from a complex Gaussian.
pub fn random_probes(dim: usize, count: usize, seed: u64) -> Vec<CVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let v = CVector::from_fn(dim, |_, _| {
                c64(
                    StandardNormal.sample(&mut rng),
                    StandardNormal.sample(&mut rng),
                )
            });
            let n = v.norm();
            v.unscale(n)
        })
        .collect()
}

pub fn verify(
    system: &VectorSystem,
    canonical: bool,
    probes: usize,
    seed: u64,
    tol: f64,
) -> Result<Verification> {
    let counting = check_counting_lemmas(system, DEFAULT_TOLERANCE)?;
    let counting_holds = counting.holds(tol);

    let mut max_reconstruction_error: f64 = 0.0;
    let mut max_identity_error: f64 = 0.0;
    for f in random_probes(system.dim(), probes, seed) {
        let d = canonical_dual_reconstruct(system, &f, DEFAULT_TOLERANCE)?;
        max_reconstruction_error = max_reconstruction_error.max((&d.reconstruction - &f).norm());
        max_identity_error = max_identity_error
            .max((d.parseval - d.coefficient_energy).abs() / d.parseval.abs().max(1.0));
    }
    let decomposition = DecompositionCheck {
        probes,
        seed,
        max_reconstruction_error,
        max_identity_error,
        holds: max_reconstruction_error <= tol && max_identity_error <= tol,
    };

    let canonical = if canonical {
        let tight = canonical_tight(system, DEFAULT_TOLERANCE)?;
        let r = frame_report(&tight, DEFAULT_TOLERANCE);
        Some(TightnessCheck {
            lower_bound: r.lower_bound,
            upper_bound: r.upper_bound,
            holds: (r.upper_bound - 1.0).abs() <= tol && (r.lower_bound - 1.0).abs() <= tol,
        })
    } else {
        None
    };

    let holds = counting_holds && decomposition.holds && canonical.as_ref().is_none_or(|c| c.holds);
    Ok(Verification {
        tolerance: tol,
        counting,
        counting_holds,
        decomposition,
        canonical,
        holds,
    })
}
