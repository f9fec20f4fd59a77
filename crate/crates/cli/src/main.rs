use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use parpolar_cli::commands;
use parpolar_cli::config::ExperimentConfig;
use parpolar_cli::CliError;

/// Polar codes over two parallel BiAWGN channels under a shared power budget.
#[derive(Parser)]
#[command(name = "parpolar", version)]
struct Cli {
    /// JSON experiment description; omitted sections take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides `sim.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for the simulator (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides the output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split, frozen set and per-bit reliabilities at one power.
    Design,
    /// Power split tables at one power or across a sweep.
    Allocate,
    /// Monte-Carlo frame error rate at each configured power.
    Simulate,
    /// Normal-approximation rates and the Shannon limit of the code rate.
    Na,
    /// Built-in consistency checks.
    Selftest,
}

fn load(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            ExperimentConfig::from_json(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.sim.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output.clone_from(out);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    if let Command::Selftest = cli.command {
        return commands::selftest(&mut out);
    }
    let cfg = load(cli)?;
    match cli.command {
        Command::Design => commands::design(&cfg, &mut out),
        Command::Allocate => commands::allocate(&cfg, &mut out),
        Command::Simulate => commands::simulate_cmd(&cfg, &mut out),
        Command::Na => commands::na(&cfg, &mut out),
        Command::Selftest => unreachable!(),
    }?;
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
