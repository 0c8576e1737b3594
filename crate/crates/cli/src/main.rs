mod commands;
mod input;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::input::InputError;

#[derive(Parser, Debug)]
#[command(name = "qaut", version, about = "Exact computations for quantum automorphism groups of measured multimatrix algebras")]
pub struct Cli {
    /// Tolerance for values that left the Gaussian rationals.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub approx_tol: f64,
    /// Largest root-of-unity order searched when classifying q.
    #[arg(long, global = true, default_value_t = 64)]
    pub bound: u32,
    /// Output is always JSON; the flag is accepted for scripts that pass it.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Measure report of a multimatrix.
    Check { e: PathBuf },
    /// Deformation parameter q, its root-of-unity class and fusion alphabet.
    Qparam { e: PathBuf },
    /// Generators, relation counts and the reduction rules of A(E,F).
    Present {
        e: PathBuf,
        f: PathBuf,
        #[arg(long)]
        extended: bool,
    },
    /// Resolve every ambiguity of the reduction system of A(E,F).
    Confluence {
        e: PathBuf,
        f: PathBuf,
        #[arg(long)]
        extended: bool,
    },
    /// Irreducible monomial counts per degree.
    Hilbert {
        e: PathBuf,
        f: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_deg: usize,
        #[arg(long)]
        extended: bool,
    },
    /// Evaluate a fusion product such as `W2*W3` or `V1*V1@even:N1=3`.
    Fusion {
        expr: String,
        /// Regime such as `generic`, `even:N1=3` or `odd:N1=2`.
        #[arg(long)]
        regime: Option<String>,
    },
    /// Check the compatibility relations (and star relations) of pairing data.
    VerifyRelations { pairing: PathBuf },
    /// Fold pairing data into the measured algebra C ⊕ W and audit it.
    Fold { pairing: PathBuf },
    /// Certify A(E,F) ≠ 0 through a confluent reduction system.
    CertifyNonzero { e: PathBuf, f: PathBuf },
    /// Check the Hopf-type axioms linking A(E,F), A(E,G), A(G,F).
    HopfAxioms { e: PathBuf, f: PathBuf, g: PathBuf, m: PathBuf },
    /// Write the bundled fixtures.
    Corpus {
        #[arg(long, default_value = "corpus")]
        out: PathBuf,
    },
}

/// What a command produced: the JSON report and whether it verified.
pub struct Report {
    pub verified: bool,
    pub body: serde_json::Value,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(report) => {
            emit(&report.body);
            ExitCode::from(if report.verified { 0 } else { 1 })
        }
        Err(err) => {
            emit(&err.to_json());
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

/// A closed pipe on stdout is not an error worth a panic.
fn emit(body: &serde_json::Value) {
    let text = serde_json::to_string_pretty(body).expect("json");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

pub type CliResult = Result<Report, InputError>;
