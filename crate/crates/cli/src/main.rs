//! `spca`: solvers, verifiers, enumeration and data generation for sparse
//! PCA from the command line.
//!
//! Exit codes: 0 success, 1 a verified condition fails, 2 bad flags or
//! unreadable input, 3 numerical failure or unwritable output, 4 infeasible
//! configuration or refused enumeration.

mod args;
mod commands;
mod record;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// A failed command, classified by exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numeric(String),
    Infeasible(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numeric(_) => 3,
            Failure::Infeasible(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numeric(m) | Failure::Infeasible(m) => m,
        }
    }
}

impl From<spca_core::SpcaError> for Failure {
    fn from(e: spca_core::SpcaError) -> Self {
        use spca_core::SpcaError as E;
        let msg = e.to_string();
        match e {
            E::Parse { .. } => Failure::Usage(msg),
            E::Convergence { .. } | E::Degenerate(_) | E::Io(_) => Failure::Numeric(msg),
            E::Input(_) | E::Infeasible(_) | E::Refused { .. } => Failure::Infeasible(msg),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot size the thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = match cli.command {
        Command::Solve(a) => commands::solve(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Enumerate(a) => commands::enumerate(&a),
        Command::Sweep(a) => commands::sweep(&a),
        Command::Gen(a) => commands::gen(&a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
