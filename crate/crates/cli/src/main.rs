mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Runs a command and returns its payload.
fn payload(command: &Command) -> anyhow::Result<String> {
    match command {
        Command::Bounds(a) => commands::bounds(a),
        Command::Params(a) => commands::params(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Tradeoff(a) => commands::tradeoff(a),
        Command::ConstantLab(a) => commands::constant_lab(a),
    }
}

fn out_path(command: &Command) -> Option<&std::path::Path> {
    let out = match command {
        Command::Bounds(a) => &a.out,
        Command::Params(a) => &a.out,
        Command::Simulate(a) => &a.out,
        Command::Tradeoff(a) => &a.out,
        Command::ConstantLab(a) => &a.out,
    };
    out.out.as_deref()
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.downcast_ref::<std::io::Error>().is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match payload(&cli.command).and_then(|p| output::emit(out_path(&cli.command), &p)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
