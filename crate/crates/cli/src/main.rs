use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use confidence_cli::approx_head;
use confidence_cli::commands::{self, Output};
use confidence_cli::tables::TableOptions;
use confidence_cli::{CliError, Config, DayCount, EXIT_CONFIG};

#[derive(Parser)]
#[command(name = "confidence", version, about = "Delayed confidence-driven asset price model")]
struct Cli {
    /// Directory receiving the CSV files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Quadrature prices for the contracts in a config file.
    Price { config: PathBuf },
    /// Reproduce one of the built-in price tables (1-4).
    Table(TableArgs),
    /// Simulate paths and terminal price densities.
    Simulate { config: PathBuf },
    /// Closed-form moments of the integrated information and log price.
    Moments { config: PathBuf },
}

#[derive(Args)]
struct TableArgs {
    which: u8,
    /// Monte Carlo paths per row; 0 skips the simulation columns.
    #[arg(long, default_value_t = 100_000)]
    mc_paths: usize,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    /// Head convention of the quadrature column: `dropped` or `shifted`.
    #[arg(long, default_value = "dropped")]
    head: String,
    /// Simulation step in years (default one trading day).
    #[arg(long)]
    step: Option<f64>,
    #[arg(long, default_value_t = 252.0)]
    days_per_year: f64,
    #[arg(long, default_value_t = 5.0)]
    days_per_week: f64,
    #[arg(long, default_value_t = 21.0)]
    days_per_month: f64,
}

fn run(cli: Cli) -> Result<Output, CliError> {
    match cli.command {
        Command::Price { config } => {
            let out = commands::price(&Config::load(&config)?)?;
            print!("{}", out.files[0].1.render());
            Ok(out)
        }
        Command::Table(a) => {
            let days = DayCount { per_year: a.days_per_year, per_week: a.days_per_week, per_month: a.days_per_month };
            if ![days.per_year, days.per_week, days.per_month].iter().all(|d| d.is_finite() && *d > 0.0) {
                return Err(CliError::config("day counts must be positive"));
            }
            let opts = TableOptions { mc_paths: a.mc_paths, seed: a.seed, head: approx_head(&a.head)?, step: a.step, days };
            let out = commands::table(a.which, &opts)?;
            print!("{}", out.files[0].1.render());
            Ok(out)
        }
        Command::Simulate { config } => commands::simulate(&Config::load(&config)?),
        Command::Moments { config } => commands::moments(&Config::load(&config)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { 0 });
        }
    };
    let dir = cli.out.clone();
    match run(cli).and_then(|out| out.write(&dir)) {
        Ok(paths) => {
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
