use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use oscbath_cli::commands::{cmd_compare, cmd_derive, cmd_oracle, cmd_params, cmd_simulate};
use oscbath_cli::{CliError, Context, RunConfig};

#[derive(Parser)]
#[command(name = "oscbath", version, about = "Effective dynamics of two coupled oscillators with a thermal bath")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run config; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overriding the config's `output`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for the randomized coefficient-equality checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Suppress tables on stdout and log only errors.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Derive the effective operators and compare with the closed forms.
    Derive,
    /// Effective frequencies, rates and occupations.
    Params,
    /// Integrate the two-mode kinetic equation.
    Simulate,
    /// Exact moment dynamics with a discretized bath on `c`.
    Oracle,
    /// Consolidated engine/closed-form/oracle comparison.
    Compare {
        /// Read `oracle_fit.json` from the output directory instead of rerunning the oracle.
        #[arg(long)]
        from_artifacts: bool,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let ctx = Context::new(config, cli.out, cli.seed, cli.quiet);
    match cli.command {
        Command::Derive => cmd_derive(&ctx).map(drop),
        Command::Params => cmd_params(&ctx).map(drop),
        Command::Simulate => cmd_simulate(&ctx).map(drop),
        Command::Oracle => cmd_oracle(&ctx).map(drop),
        Command::Compare { from_artifacts } => cmd_compare(&ctx, from_artifacts).map(drop),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "error" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
