mod args;
mod commands;
mod config;
mod error;
mod output;

use clap::error::ErrorKind;
use clap::{CommandFactory, FromArgMatches};

use args::{Cli, Command};
use error::CliError;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}

fn run() -> Result<(), CliError> {
    let matches = match Cli::command().try_get_matches() {
        Ok(m) => m,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return Ok(());
        }
        Err(e) => {
            let text = e.to_string();
            let first = text
                .lines()
                .next()
                .unwrap_or_default()
                .trim_start_matches("error: ");
            return Err(CliError::usage(first.to_string()));
        }
    };
    let cli = Cli::from_arg_matches(&matches).map_err(|e| CliError::usage(e.to_string()))?;

    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::new("internal", e.to_string()))?;
    }

    let config = cli.config.as_deref().map(config::load_config).transpose()?;
    if let Some(expected) = config.as_ref().and_then(|c| c.command.as_deref()) {
        if expected != cli.command.name() {
            return Err(CliError::config(format!(
                "manifest was written by `{expected}`, not `{}`",
                cli.command.name()
            )));
        }
    }
    let (_, sub) = matches.subcommand().expect("subcommand is required");
    let config = config.as_ref();
    match &cli.command {
        Command::Generate(a) => {
            let (a, resolved) = config::resolve(a, sub, config)?;
            commands::generate(&a, &resolved)
        }
        Command::Train(a) => {
            let (a, resolved) = config::resolve(a, sub, config)?;
            commands::train(&a, &resolved)
        }
        Command::Evaluate(a) => {
            let (a, resolved) = config::resolve(a, sub, config)?;
            commands::evaluate(&a, &resolved)
        }
        Command::Replay(a) => {
            let (a, resolved) = config::resolve(a, sub, config)?;
            commands::run_replay(&a, &resolved)
        }
        Command::Sweep(a) => {
            let (a, resolved) = config::resolve(a, sub, config)?;
            commands::sweep(&a, &resolved)
        }
    }
}
