use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use covset::experiment::{self, ExperimentConfig, Overrides};
use covset::Error;

const SEED_ENV: &str = "COVSET_SEED";

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

/// Run a seeded covering-set experiment described by a TOML file.
///
/// Exit status: 0 success, 1 check failed, 2 config or usage error, 3 runtime or resource error.
#[derive(Parser, Debug)]
#[command(name = "covset", version = experiment_version(), about)]
struct Args {
    /// Experiment config file.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Master seed; overrides COVSET_SEED and the config.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    #[arg(long, value_name = "N")]
    trials: Option<usize>,
    #[arg(long, value_name = "K")]
    depth: Option<u32>,
    /// Worker threads; defaults to the available cores.
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
    /// Output directory for summary.json and the CSV files.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

fn experiment_version() -> &'static str {
    Box::leak(experiment::version().into_boxed_str())
}

fn env_seed() -> Result<Option<u64>, Error> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| Error::config(SEED_ENV, format!("`{v}` is not a u64"))),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(Error::config(SEED_ENV, e.to_string())),
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_config() {
        EXIT_CONFIG
    } else {
        EXIT_RUNTIME
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = (|| {
        let mut config = ExperimentConfig::load(&args.config)?;
        let seed = args.seed.or(env_seed()?);
        config.apply(&Overrides { seed, trials: args.trials, depth: args.depth, jobs: args.jobs, out: args.out.clone() });
        experiment::run(config)
    })();
    match result {
        Ok(report) => {
            let (name, value) = report.outcome.headline;
            let status = if report.outcome.passed { "PASS" } else { "FAIL" };
            println!("{} {status}: {name} = {value}", report.outcome.kind.name());
            for f in &report.written.files {
                println!("wrote {}", f.display());
            }
            if report.outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CHECK_FAILED)
            }
        }
        Err(e) => {
            eprintln!("covset: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
