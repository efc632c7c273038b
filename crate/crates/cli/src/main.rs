use std::process::ExitCode;

use clap::Parser;

mod cli;
mod commands;
mod config;
mod failure;

use cli::{Cli, Command};
use config::Config;
use failure::Failure;

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(n) = cli.jobs.or(config.jobs) {
        if n == 0 {
            return Err(Failure::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Data(e.to_string()))?;
    }
    match &cli.command {
        Command::Ingest(a) => commands::ingest(a),
        Command::Train(a) => commands::train(a, &config, cli.seed),
        Command::Extract(a) => commands::extract(a, &config),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Serp(a) => commands::serp(a, &config, cli.seed),
        Command::Synth(c) => commands::synth(c, cli.seed.or(config.seed)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version go to stdout with status 0
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    init_logging(cli.verbose);
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("viewsnip: {e}");
            e.exit_code()
        }
    }
}
