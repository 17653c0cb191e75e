use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use qharm::experiments::{run, Command, EXIT_CONFIG, EXIT_FAIL};

#[derive(Clone, Copy, ValueEnum)]
enum Cmd {
    VerifyIdentities,
    BuildAlgebra,
    MaxPrinciple,
    Recover,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::VerifyIdentities => Command::VerifyIdentities,
            Cmd::BuildAlgebra => Command::BuildAlgebra,
            Cmd::MaxPrinciple => Command::MaxPrinciple,
            Cmd::Recover => Command::Recover,
        }
    }
}

/// Quaternionic harmonic field experiments.
///
/// Set QHARM_THREADS to cap the number of worker threads.
#[derive(Parser)]
#[command(name = "qharm", version)]
struct Cli {
    #[arg(value_enum)]
    command: Cmd,
    /// JSON config file.
    #[arg(long)]
    config: PathBuf,
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn threads() -> Result<Option<usize>, String> {
    match std::env::var("QHARM_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!("QHARM_THREADS must be a positive integer, got {v:?}")),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let fail = |code: i32, msg: String| {
        eprintln!("qharm: {msg}");
        ExitCode::from(code as u8)
    };
    let n = match threads() {
        Ok(n) => n,
        Err(msg) => return fail(EXIT_CONFIG, msg),
    };
    let config = match std::fs::read_to_string(&cli.config) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_CONFIG, format!("cannot read {}: {e}", cli.config.display())),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = n {
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => return fail(EXIT_FAIL, e.to_string()),
    };
    let outcome = pool.install(|| run(cli.command.into(), &config));
    if let Some(report) = &outcome.report {
        let written = match &cli.out {
            Some(path) => std::fs::write(path, report),
            None => {
                print!("{report}");
                Ok(())
            }
        };
        if let Err(e) = written {
            return fail(EXIT_FAIL, format!("cannot write report: {e}"));
        }
    }
    if let Some(msg) = outcome.message {
        eprintln!("qharm: {msg}");
    }
    ExitCode::from(outcome.exit_code as u8)
}
