use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use moonshine_cli::commands::{self, RunConfig};
use moonshine_cli::report::Format;
use moonshine_cli::CliError;

/// McKay–Thompson series, moonshine towers and Monster multiplicities.
#[derive(Parser, Debug)]
#[command(name = "moonshine", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Monster class, e.g. 1A or 4B
    #[arg(long, global = true)]
    class: Option<String>,
    /// Tower order
    #[arg(long, global = true, default_value_t = 1)]
    m: i64,
    /// Coefficient indices (comma separated)
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    n: Vec<i64>,
    #[arg(long, global = true)]
    n_max: Option<i64>,
    /// Largest modulus c; a comma list gives convergence thresholds
    #[arg(long, global = true, value_delimiter = ',')]
    cmax: Vec<u64>,
    /// Working precision in bits
    #[arg(long, global = true)]
    bits: Option<usize>,
    /// Character table JSON; the bundled partial table otherwise
    #[arg(long, global = true)]
    chartab: Option<PathBuf>,
    /// Irreducible indices to report (comma separated)
    #[arg(long, global = true, value_delimiter = ',')]
    chars: Vec<usize>,
    /// Significant figures for proportions
    #[arg(long, global = true, default_value_t = 4)]
    digits: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Exact coefficients of J through --n-max
    Jcoeffs,
    /// Partial Rademacher sums of T_g at each --cmax threshold
    Convergence,
    /// T_g^(-m) and its Faber polynomial
    Tower,
    /// Multiplicities of irreducibles in the m-th tower
    Multiplicities,
    /// Proportions of irreducibles (needs a complete table)
    Distribution,
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let cfg = RunConfig {
        class: cli.class.clone(),
        m: cli.m,
        n: cli.n.clone(),
        n_max: cli.n_max,
        cmax: cli.cmax.clone(),
        bits: cli.bits,
        chartab: cli.chartab.clone(),
        chars: cli.chars.clone(),
        digits: cli.digits,
    };
    let report = match cli.command {
        Command::Jcoeffs => commands::jcoeffs(&cfg)?,
        Command::Convergence => commands::convergence(&cfg)?,
        Command::Tower => commands::tower(&cfg)?,
        Command::Multiplicities => commands::multiplicities(&cfg)?,
        Command::Distribution => commands::distribution(&cfg)?,
    };
    Ok(report.render(cli.format))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|text| match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Data(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
