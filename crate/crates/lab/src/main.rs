use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qmlab::config::Config;
use qmlab::report::{emit_report, overall, Experiment, Format, Verdict};
use qmlab::RunError;

#[derive(Parser)]
#[command(name = "qmlab", version, about = "Unstable and stable perturbations of Schrödinger propagators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML configuration; omitted keys take their defaults
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// output directory
    #[arg(long, global = true, default_value = "qmlab-out")]
    out: PathBuf,
    /// worker threads (default: one per core)
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// overrides the seed in the configuration
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value = "both")]
    format: Format,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// weak-* concentration of equatorial harmonics on S²
    Weakstar,
    /// propagator instability under shrinking equatorial cutoffs
    SphereInstability,
    /// concentration of radial modes on a surface of revolution
    Revolution,
    /// flat-space small-p construction
    FlatSmallp,
    /// L^∞ stability of the propagator
    Pinfty,
    /// every experiment in turn
    All,
}

impl Command {
    fn experiments(self) -> Vec<Experiment> {
        match self {
            Command::Weakstar => vec![Experiment::Weakstar],
            Command::SphereInstability => vec![Experiment::SphereInstability],
            Command::Revolution => vec![Experiment::Revolution],
            Command::FlatSmallp => vec![Experiment::FlatSmallp],
            Command::Pinfty => vec![Experiment::Pinfty],
            Command::All => Experiment::ALL.to_vec(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut config = match &cli.config {
        Some(path) => match Config::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("qmlab: {e}");
                return ExitCode::from(2);
            }
        },
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if cli.workers == Some(0) {
        eprintln!("qmlab: --workers must be at least 1");
        return ExitCode::from(2);
    }
    let reports = match qmlab::run(&cli.command.experiments(), &config, cli.workers) {
        Ok(r) => r,
        Err(RunError::Config(e)) => {
            eprintln!("qmlab: {e}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("qmlab: {e}");
            return ExitCode::from(1);
        }
    };
    for r in &reports {
        println!("{:<20} {:<8} {:>6} rows  {:>8.2}s", r.experiment.name(), r.verdict(), r.table.len(), r.elapsed_seconds);
        for c in r.checks.iter().filter(|c| !c.passed) {
            println!("    failed: {} ({})", c.name, c.detail);
        }
    }
    let echo = toml::to_string(&config).unwrap_or_default();
    if let Err(e) = emit_report(&reports, &cli.out, cli.format, config.seed, &echo) {
        eprintln!("qmlab: {e}");
        return ExitCode::from(1);
    }
    match overall(&reports) {
        Verdict::Fail => ExitCode::from(1),
        _ => ExitCode::SUCCESS,
    }
}
