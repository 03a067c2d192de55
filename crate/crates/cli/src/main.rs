//! `mercerkit` command-line front end.
//!
//! Exit codes: 0 success or affirmative verdict, 1 negative verdict, 2 violated
//! mathematical precondition, 64 usage error, 70 numerical failure, 74 I/O error.

mod commands;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{BasisArgs, GramArgs, InclusionArgs, MembershipArgs, MercerArgs, MeshArgs};
use mercerkit::Error;

pub const EXIT_NEGATIVE: u8 = 1;
pub const EXIT_PRECONDITION: u8 = 2;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_SOFTWARE: u8 = 70;
pub const EXIT_IO: u8 = 74;

const THREADS_VAR: &str = "MERCERKIT_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "mercerkit",
    version,
    about = "Finite-scale RKHS and Mercer spectral tools"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Gram matrix of a kernel on a point set, as CSV.
    Gram(GramArgs),
    /// Nyström spectrum and Mercer identities on a weighted point set, as JSON.
    Mercer(MercerArgs),
    /// Kernel values on a square 1-D mesh, rows `x,y,K(x,y)`.
    Mesh(MeshArgs),
    /// Whether sampled values lie in the RKHS of a kernel on a point set.
    Membership(MembershipArgs),
    /// Whether `H_K ⊆ H_L` on a point set, with the minimal constant.
    Inclusion(InclusionArgs),
    /// Multi-indices and values of the Weyl or Gaussian orthonormal basis.
    Basis(BasisArgs),
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io { .. } => EXIT_IO,
            Error::NotPsd { .. } | Error::NotHermitian { .. } => EXIT_PRECONDITION,
            Error::NoConvergence { .. } => EXIT_SOFTWARE,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Failure::usage(format!(
            "{THREADS_VAR} must be a positive integer, got `{raw}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure {
            code: EXIT_SOFTWARE,
            message: e.to_string(),
        })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    configure_threads()?;
    match cli.command {
        Command::Gram(args) => commands::gram(args),
        Command::Mercer(args) => commands::mercer(args),
        Command::Mesh(args) => commands::mesh(args),
        Command::Membership(args) => commands::membership(args),
        Command::Inclusion(args) => commands::inclusion(args),
        Command::Basis(args) => commands::basis(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("mercerkit: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
