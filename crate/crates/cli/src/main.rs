//! `mems <command> --config <path> [--out <dir>]`
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, ValueEnum};
use mems_core::cli_io::{exit_status, parse_config, run_command, Command, ExitStatus};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Solve,
    Pullin,
    Sweep,
    Stability,
    Decay,
    Extremal,
    Classify,
    Verify,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Solve => Command::Solve,
            Cmd::Pullin => Command::Pullin,
            Cmd::Sweep => Command::Sweep,
            Cmd::Stability => Command::Stability,
            Cmd::Decay => Command::Decay,
            Cmd::Extremal => Command::Extremal,
            Cmd::Classify => Command::Classify,
            Cmd::Verify => Command::Verify,
        }
    }
}

/// Minimal solutions, pull-in voltage and stability of the MEMS membrane
/// equation with a boundary-degenerate plate profile.
#[derive(Parser)]
#[command(name = "mems", version, about, long_about = None)]
struct Cli {
    command: Cmd,
    /// Flat `key = value` run configuration
    #[arg(short, long)]
    config: PathBuf,
    /// Output directory; overrides `out` in the config, defaults to `.`
    #[arg(short, long)]
    out: Option<PathBuf>,
}

fn exit(status: ExitStatus) -> ExitCode {
    ExitCode::from(status.code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => exit(ExitStatus::Validation),
            };
        }
    };

    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", cli.config.display());
            return exit(ExitStatus::Validation);
        }
    };
    let cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(errs) => {
            for e in &errs.0 {
                eprintln!("config error: {e}");
            }
            return exit(ExitStatus::Validation);
        }
    };
    let out = cli.out.or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("."));

    match run_command(cli.command.into(), &cfg, &out) {
        Ok(res) => {
            print!("{}", res.summary);
            for f in &res.files {
                eprintln!("wrote {}", f.display());
            }
            exit(res.exit)
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit(exit_status(&e))
        }
    }
}
