//! Command-line front end: argument parsing, JSON input and output, and exit
//! codes over the `bdiv` library.
//!
//! Every invocation prints one JSON document to standard output. Exit code 0
//! means success or a positive decision, 2 a negative decision, 1 an error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

mod commands;
pub mod json;

pub use commands::{roundtrip_verify, RoundTripEntry, RoundTripReport, ROUNDTRIP_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "bdiv", version, about = "Circumradius, diversity axioms and Banach-embeddability checks")]
pub struct RunConfig {
    /// Emit JSON (the only output format; accepted for explicitness).
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Circumradius of a point set with respect to a symmetric polytope.
    Circumradius(CircumArgs),
    /// Check a diversity table against the axioms.
    CheckDiversity(CheckArgs),
    /// Three-point Banach-embeddability.
    #[command(subcommand)]
    Embed3(Embed3Command),
    /// Four-point face system and conjecture sampling.
    #[command(subcommand)]
    Embed4(Embed4Command),
    /// Random triangles in random symmetric polytopes of R^3.
    ProbeDim3(ProbeArgs),
}

#[derive(Debug, Args)]
pub struct CircumArgs {
    /// Point set: {"dim": n, "points": [[...], ...]}.
    #[arg(long)]
    pub points: PathBuf,
    /// Body: {"dim": n, "generators": [[...], ...]}, signs implicit.
    #[arg(long)]
    pub body: PathBuf,
    /// Also compute and verify an optimality certificate.
    #[arg(long)]
    pub certificate: bool,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Diversity table: {"ground": [...], "values": {"x1,x2": v, ...}}.
    pub table: PathBuf,
    /// Relative slack of every axiom comparison.
    #[arg(long, default_value_t = 1e-9, value_parser = positive)]
    pub tolerance: f64,
    /// Seed for sampled triangle checks on large grounds.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long, value_parser = positive)]
    pub d12: f64,
    #[arg(long, value_parser = positive)]
    pub d13: f64,
    #[arg(long, value_parser = positive)]
    pub d23: f64,
}

#[derive(Debug, Subcommand)]
pub enum Embed3Command {
    /// Minkowski and Banach embeddability of a three-point diversity.
    Decide {
        #[command(flatten)]
        pairs: PairArgs,
        #[arg(long, value_parser = positive)]
        d123: f64,
        /// Relative decision slack.
        #[arg(long, default_value_t = bdiv::embed3::DECISION_SLACK, value_parser = positive)]
        tolerance: f64,
    },
    /// A planar body realizing the diversity on the reference triangle.
    Witness {
        #[command(flatten)]
        pairs: PairArgs,
        /// Target value of the triple.
        #[arg(long, alias = "d123", value_parser = positive)]
        target: f64,
        /// Where to write the body JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-measure a witness body by LP and compare with the targets.
    Verify {
        /// Body JSON as written by `embed3 witness`.
        witness: PathBuf,
        #[command(flatten)]
        pairs: PairArgs,
        #[arg(long, value_parser = positive)]
        d123: f64,
        /// Largest accepted absolute error.
        #[arg(long, default_value_t = ROUNDTRIP_TOL, value_parser = positive)]
        tolerance: f64,
    },
}

#[derive(Debug, Args)]
pub struct RadiiArgs {
    #[arg(long, value_parser = positive)]
    pub r12: f64,
    #[arg(long, value_parser = positive)]
    pub r13: f64,
    #[arg(long, value_parser = positive)]
    pub r14: f64,
    #[arg(long, value_parser = positive)]
    pub r23: f64,
    #[arg(long, value_parser = positive)]
    pub r24: f64,
    #[arg(long, value_parser = positive)]
    pub r34: f64,
}

#[derive(Debug, Subcommand)]
pub enum Embed4Command {
    /// Printed bound, solved face system and LP measurement for one set of radii.
    Bound {
        #[command(flatten)]
        radii: RadiiArgs,
    },
    /// Random radii; summary on stdout, one JSON line per trial in `--out`.
    Sample {
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        Ok(v) => Err(format!("{v} is not a positive finite number")),
        Err(e) => Err(e.to_string()),
    }
}

/// Parses `argv` (program name first), runs the command and writes its JSON
/// document to `out`. Returns the process exit code.
pub fn dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(argv) {
        Ok(config) => config,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
        Err(e) => {
            let message = e.kind().as_str().unwrap_or("invalid arguments").to_string();
            let doc = json!({"error": {"kind": "usage", "message": message}});
            let _ = writeln!(out, "{}", json::pretty(&doc));
            let _ = write!(err, "{}", e.render());
            return EXIT_ERROR;
        }
    };
    let (doc, code) = match commands::run(&config) {
        Ok(outcome) => outcome,
        Err(e) => (json!({"error": {"kind": e.kind(), "message": e.to_string()}}), EXIT_ERROR),
    };
    if writeln!(out, "{}", json::pretty(&doc)).is_err() {
        return EXIT_ERROR;
    }
    code
}
