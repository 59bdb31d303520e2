use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use solitonsim::Command;

/// Wave maps into the sphere, their viscous regularization, and the
/// Schrödinger solitons built from them.
///
/// Any further `--key=value` overrides a configuration entry; dotted keys
/// reach into sections (`--solver.t_end=5`).
#[derive(Parser)]
#[command(name = "solitonsim", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
}

/// Splits configuration overrides from the arguments clap handles.
fn split_args(args: impl Iterator<Item = String>) -> (Vec<String>, Vec<String>) {
    let mut own = Vec::new();
    let mut overrides = Vec::new();
    for a in args {
        match a.strip_prefix("--") {
            Some(kv) if kv.contains('=') && !kv.starts_with("config=") => overrides.push(kv.to_owned()),
            _ => own.push(a),
        }
    }
    (own, overrides)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let (args, overrides) = split_args(std::env::args());
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let code = solitonsim::run(cli.command, &cli.config, &overrides);
    ExitCode::from(u8::try_from(code).unwrap_or(1))
}
