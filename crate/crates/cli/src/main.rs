use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use manin_cli::commands::{self, CountArgs, CountFormat, Outcome, EXIT_INPUT};
use manin_cli::fanfile::FanFile;
use manin_core::counter::Strategy;
use manin_core::Execution;

/// Leading constants and point counts for smooth complete toric varieties.
#[derive(Parser)]
#[command(name = "manin", version)]
struct Cli {
    /// Run the hot loops on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a fan file: primitivity, face intersections, completeness,
    /// regularity and compatibility of the Galois action.
    Validate {
        path: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Print α, β, the Tamagawa number and the leading constant.
    Constants {
        path: PathBuf,
        /// Largest prime in the Euler product.
        #[arg(long, default_value_t = 100_000, value_parser = parse_bound)]
        cutoff: u64,
        #[arg(long)]
        json: bool,
    },
    /// Count torus points of bounded anticanonical height.
    Count {
        path: PathBuf,
        /// Comma-separated height bounds, e.g. 1e4,1e5,1e6.
        #[arg(long = "B-schedule", value_delimiter = ',', required = true, value_parser = parse_bound)]
        schedule: Vec<u64>,
        #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
        strategy: StrategyArg,
        #[arg(long, value_enum, default_value_t = OutArg::Csv)]
        out: OutArg,
        /// Largest admissible candidate count for the naive search.
        #[arg(long, default_value_t = 5e8)]
        budget: f64,
        /// Largest prime in the Euler product used for the prediction.
        #[arg(long, default_value_t = 100_000, value_parser = parse_bound)]
        cutoff: u64,
    },
    /// Dump the characteristic function of the effective cone as JSON.
    Xfunction { path: PathBuf },
    /// Run the local identity suite at one prime.
    Localcheck {
        path: PathBuf,
        #[arg(long, default_value_t = 2)]
        prime: u64,
        /// Box radius of the truncated lattice sums.
        #[arg(long, default_value_t = 12)]
        radius: u32,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Naive,
    Specialized,
    Auto,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutArg {
    Csv,
    Json,
}

/// Accepts integers and exact scientific notation such as `1e6`.
fn parse_bound(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.trim().parse::<u64>() {
        return Ok(v);
    }
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.fract() != 0.0 || !(0.0..=u64::MAX as f64).contains(&v) {
        return Err(format!("`{s}` is not a nonnegative integer"));
    }
    Ok(v as u64)
}

fn load(path: &std::path::Path) -> Result<FanFile, Outcome> {
    FanFile::read(path).map_err(|e| Outcome::fail(EXIT_INPUT, format!("parse error: {e}\n")))
}

fn run(cli: Cli) -> Outcome {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    let result = match cli.command {
        Command::Validate { path, json } => load(&path).map(|f| commands::validate(&f, json)),
        Command::Constants { path, cutoff, json } => load(&path).map(|f| commands::constants(&f, cutoff, exec, json)),
        Command::Count { path, schedule, strategy, out, budget, cutoff } => load(&path).map(|f| {
            let strategy = match strategy {
                StrategyArg::Naive => Strategy::Naive,
                StrategyArg::Specialized => Strategy::Specialized,
                StrategyArg::Auto => Strategy::Auto,
            };
            let format = match out {
                OutArg::Csv => CountFormat::Csv,
                OutArg::Json => CountFormat::Json,
            };
            commands::count(&f, &CountArgs { schedule, strategy, format, budget, cutoff, exec })
        }),
        Command::Xfunction { path } => load(&path).map(|f| commands::xfunction(&f)),
        Command::Localcheck { path, prime, radius, json } => {
            load(&path).map(|f| commands::localcheck(&f, prime, radius, json))
        }
    };
    result.unwrap_or_else(|o| o)
}

fn main() -> ExitCode {
    let out = run(Cli::parse());
    // A single writer per stream.
    std::io::stdout().lock().write_all(out.stdout.as_bytes()).ok();
    std::io::stderr().lock().write_all(out.stderr.as_bytes()).ok();
    ExitCode::from(out.code as u8)
}
