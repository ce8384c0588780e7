use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hopf_cli::commands::{DEGREE_TOLERANCES, SERIES_TOLERANCES, VERIFY_TOLERANCES};
use hopf_cli::{
    cmd_degree, cmd_filtration, cmd_series, cmd_verify, parse_config, read_file, CliError, Outcome,
    RunConfig, EXIT_FAIL, EXIT_PASS,
};
use hopf_core::forms::DEFAULT_FD_STEP;
use hopf_core::manifold::HopfData;

#[derive(Parser)]
#[command(
    name = "hopf",
    version,
    about = "Verification suites for diagonal Hopf manifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Hopf data config (TOML with `n`, `alphas`, optional `C`).
    #[arg(long, global = true)]
    config: Option<String>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Sample count; defaults to 1000 for `verify` and 100000 for `degree` and `series`.
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true, default_value_t = DEFAULT_FD_STEP)]
    fd_step: f64,
    /// Tolerance override `check=value`; repeatable.
    #[arg(long = "tol", global = true)]
    tolerances: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form identities, moment map and finite-difference checks.
    Verify {
        /// Entry bound of the multiplicative-relation search.
        #[arg(long, default_value_t = 10)]
        relation_bound: i64,
    },
    /// Degree of the weight bundle L_λ.
    Degree {
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
    },
    /// Admissibility series terms and convergence verdict.
    Series {
        #[arg(long, default_value_t = 4)]
        terms: usize,
    },
    /// Weight filtration of a monomial module file.
    Filtration {
        module: String,
        #[arg(long, default_value_t = 4)]
        cap: u32,
    },
}

fn load(cli: &Cli) -> Result<HopfData, CliError> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::Usage("--config is required".into()))?;
    parse_config(&read_file(path)?)
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let base = |default: usize, known| {
        RunConfig::new(cli.seed, cli.samples.unwrap_or(default), cli.fd_step)?
            .with_overrides(known, &cli.tolerances)
    };
    match &cli.command {
        Command::Verify { relation_bound } => cmd_verify(
            &load(cli)?,
            &base(1000, VERIFY_TOLERANCES)?,
            *relation_bound,
        ),
        Command::Degree { lambda } => {
            cmd_degree(&load(cli)?, &base(100_000, DEGREE_TOLERANCES)?, *lambda)
        }
        Command::Series { terms } => {
            cmd_series(&load(cli)?, &base(100_000, SERIES_TOLERANCES)?, *terms)
        }
        Command::Filtration { module, cap } => cmd_filtration(&read_file(module)?, *cap),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.report);
            ExitCode::from(if out.passed { EXIT_PASS } else { EXIT_FAIL } as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
