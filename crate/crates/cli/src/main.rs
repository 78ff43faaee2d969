use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lpmirror_cli::{
    cmd_fit, cmd_match, cmd_mink, cmd_period, cmd_quantum, cmd_ramify, cmd_reflexive_check, cmd_regularize,
    cmd_survey, cmd_type, CliError, OutputFormat, QuantumSource, Settings,
};
use lpmirror_core::pf::FitConfig;

#[derive(Parser)]
#[command(name = "lpmirror", version, about = "Periods, Picard-Fuchs operators and mirror checks for Laurent polynomials")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Number of period coefficients to compute.
    #[arg(long = "terms", global = true, default_value_t = 60)]
    terms: usize,
    #[arg(long, global = true, default_value_t = 4)]
    max_order: usize,
    #[arg(long, global = true, default_value_t = 20)]
    max_degree: usize,
    /// Equations required beyond the number of unknowns when fitting.
    #[arg(long, global = true, default_value_t = 10)]
    slack: usize,
    /// Period coefficients used as the dedup key, and minimum match depth.
    #[arg(long, global = true, default_value_t = 20)]
    dedup_depth: usize,
    #[arg(long, global = true)]
    store: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Period sequence of a polynomial file.
    Period { polynomial: PathBuf },
    /// Picard-Fuchs operator of a period or polynomial file.
    Fit { input: PathBuf },
    /// Ramification report of an operator (or a period/polynomial to fit first).
    Ramify { input: PathBuf },
    /// Type of L(0) = P_0(D).
    Type { input: PathBuf },
    /// Minkowski polynomials of a reflexive polytope.
    Mink {
        polytope: PathBuf,
        /// Also write mp-<i>.poly files and provenance.json here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Reflexivity, volume and polar of a polytope.
    ReflexiveCheck { polytope: PathBuf },
    /// Quantum period from toric data or a quantum matrix.
    Quantum {
        #[command(flatten)]
        source: QuantumArgs,
        /// Print the regularized quantum period.
        #[arg(long)]
        regularized: bool,
    },
    /// Regularize a quantum period file.
    Regularize { period: PathBuf },
    /// Compare a classical period with a regularized quantum period.
    Match {
        /// Polynomial or period file.
        classical: PathBuf,
        #[command(flatten)]
        source: QuantumArgs,
        /// Unregularized quantum period file.
        #[arg(long, conflicts_with_all = ["toric", "matrix"])]
        quantum: Option<PathBuf>,
    },
    /// Survey every polytope file in a directory.
    Survey { dir: PathBuf },
}

#[derive(Args)]
struct QuantumArgs {
    /// Toric data file, with optional bundles.
    #[arg(long, conflicts_with = "matrix")]
    toric: Option<PathBuf>,
    /// Quantum matrix file.
    #[arg(long)]
    matrix: Option<PathBuf>,
}

impl QuantumArgs {
    fn source(self, period: Option<PathBuf>) -> Result<QuantumSource, CliError> {
        match (self.toric, self.matrix, period) {
            (Some(t), _, _) => Ok(QuantumSource::Toric(t)),
            (_, Some(m), _) => Ok(QuantumSource::Matrix(m)),
            (_, _, Some(p)) => Ok(QuantumSource::Period(p)),
            _ => Err(CliError::Config("one of --toric, --matrix or --quantum is required".into())),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let c = cli.common;
    let s = Settings {
        terms: c.terms,
        fit: FitConfig {
            max_order: c.max_order,
            max_degree: c.max_degree,
            slack: c.slack,
        },
        dedup_depth: c.dedup_depth,
        format: match c.format {
            Format::Text => OutputFormat::Text,
            Format::Structured => OutputFormat::Structured,
        },
    };
    let out = match cli.command {
        Command::Period { polynomial } => cmd_period(&polynomial, &s)?,
        Command::Fit { input } => cmd_fit(&input, &s)?,
        Command::Ramify { input } => cmd_ramify(&input, &s)?,
        Command::Type { input } => cmd_type(&input, &s)?,
        Command::Mink { polytope, out_dir } => cmd_mink(&polytope, out_dir.as_deref(), &s)?,
        Command::ReflexiveCheck { polytope } => cmd_reflexive_check(&polytope, &s)?,
        Command::Quantum { source, regularized } => cmd_quantum(&source.source(None)?, regularized, &s)?,
        Command::Regularize { period } => cmd_regularize(&period, &s)?,
        Command::Match {
            classical,
            source,
            quantum,
        } => cmd_match(&classical, &source.source(quantum)?, &s)?,
        Command::Survey { dir } => cmd_survey(&dir, c.store.as_deref(), &s)?,
    };
    match c.output {
        Some(path) => std::fs::write(&path, out).map_err(|e| CliError::io(&path, e)),
        None => {
            print!("{out}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lpmirror: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
