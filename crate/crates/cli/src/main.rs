mod commands;
mod config;
mod sweep;
mod table;

use clap::{Parser, Subcommand, ValueEnum};
use commands::{
    cmd_compare_configs, cmd_entanglement, cmd_evolve, cmd_oracle_check, cmd_phase_match,
    cmd_sweep_ratio, cmd_sweep_strength, CliError, CommandOutput,
};
use config::RunConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Parser)]
#[command(
    name = "fwm",
    version,
    about = "Dual-pump four-wave-mixing simulator: phase matching, Gaussian \
             dynamics, and entanglement metrics"
)]
struct Cli {
    /// Configuration file; built-in defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write the output table to this path instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format for the table.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Seed for randomized subcommands (oracle-check).
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,

    /// Worker threads for sweep commands.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the emission cone and the four-mode output geometry.
    PhaseMatch,
    /// Evolve vacuum under the configured coupling graph, then apply loss.
    Evolve,
    /// Sweep the pump power ratio at fixed total power.
    SweepRatio,
    /// Sweep the squeezing parameter r.
    SweepStrength,
    /// Rank the four-mode layout against the six-mode alternative.
    CompareConfigs,
    /// Entanglement and squeezing metrics before and after loss.
    Entanglement,
    /// Cross-check the Gaussian engine against the Fock integrator.
    OracleCheck,
}

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig, CliError> {
    let text = match path {
        None => String::new(),
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?,
    };
    RunConfig::parse(&text).map_err(|e| CliError::Config(e.to_string()))
}

fn run(cli: &Cli) -> Result<CommandOutput, CliError> {
    let cfg = load_config(&cli.config)?;
    match cli.command {
        Command::PhaseMatch => cmd_phase_match(&cfg),
        Command::Evolve => cmd_evolve(&cfg),
        Command::SweepRatio => cmd_sweep_ratio(&cfg, cli.workers),
        Command::SweepStrength => cmd_sweep_strength(&cfg, cli.workers),
        Command::CompareConfigs => cmd_compare_configs(&cfg),
        Command::Entanglement => cmd_entanglement(&cfg),
        Command::OracleCheck => cmd_oracle_check(&cfg, cli.seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(output) => {
            for note in &output.notes {
                eprintln!("{note}");
            }
            let text = match cli.format {
                Format::Csv => output.table.to_csv(),
                Format::Json => output.table.to_json(),
            };
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            } else {
                print!("{text}");
            }
            if let Some(failure) = &output.failure {
                eprintln!("error: {failure}");
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
