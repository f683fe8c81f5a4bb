use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ideal_lim::report::{
    parse_config, run, AnalysisConfig, CommandKind, ConfigError, RunOptions,
};
use ideal_lim::validate::{DEFAULT_HORIZON, DEFAULT_SEED};

/// Ideal-convergence diagnostics and the finite functional lab.
#[derive(Parser)]
#[command(name = "ideal-lim", version)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Cluster points, limsup/liminf, convergence verdict, distance, approximants.
    Analyze(Common),
    /// Limit-point extraction under an F_sigma ideal.
    Extract(Common),
    /// Finite functional lab operations from the [lab] section.
    Lab(Common),
    /// Seeded oracle suites. The config is optional.
    Validate(Common),
    /// Every command listed in the config, in order.
    Run(Common),
}

#[derive(Args)]
struct Common {
    /// TOML config file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override the horizon.
    #[arg(long, value_name = "N")]
    horizon: Option<u64>,
    /// Override the membership tolerance.
    #[arg(long, value_name = "X")]
    tol: Option<f64>,
    /// Seed for the randomized suites.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Record wall-clock time per command (the report is then no longer
    /// reproducible byte for byte).
    #[arg(long)]
    timings: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    /// Score traces only.
    Csv,
}

const EXIT_COMMAND_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn load(verb: Option<CommandKind>, opts: &Common) -> Result<AnalysisConfig, String> {
    let mut config = match &opts.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("{}: {e}", path.display()))?;
            parse_config(&text).map_err(|e| located(path, &e))?
        }
        None if verb == Some(CommandKind::Validate) => {
            AnalysisConfig::validate_only(DEFAULT_SEED, DEFAULT_HORIZON)
        }
        None => return Err("--config is required for this command".into()),
    };
    if let Some(kind) = verb {
        config.commands = vec![kind];
        if kind == CommandKind::Lab && config.lab.is_none() {
            return Err("the lab command needs a [lab] section".into());
        }
    }
    config
        .apply_overrides(opts.horizon, opts.tol, opts.seed)
        .map_err(|e| e.to_string())?;
    Ok(config)
}

fn located(path: &std::path::Path, e: &ConfigError) -> String {
    e.errors
        .iter()
        .map(|l| format!("{}:{l}", path.display()))
        .collect::<Vec<_>>()
        .join("\n")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (verb, opts) = match &cli.verb {
        Verb::Analyze(o) => (Some(CommandKind::Analyze), o),
        Verb::Extract(o) => (Some(CommandKind::Extract), o),
        Verb::Lab(o) => (Some(CommandKind::Lab), o),
        Verb::Validate(o) => (Some(CommandKind::Validate), o),
        Verb::Run(o) => (None, o),
    };
    let config = match load(verb, opts) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("config error:\n{msg}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let report = run(&config, RunOptions { timings: opts.timings });
    let text = match opts.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    match &opts.out {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_COMMAND_FAILED);
            }
        }
        None => print!("{text}"),
    }
    for c in report.commands.iter().filter(|c| !c.errors.is_empty()) {
        for e in &c.errors {
            eprintln!("{}: {e}", c.kind.name());
        }
    }
    ExitCode::from(report.exit_code() as u8)
}
