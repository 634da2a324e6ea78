//! Command-line front end. Exit codes: 0 success, 2 configuration error,
//! 3 runtime error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use nrpuf::experiment::{self, ExperimentConfig, ReportFormat};
use nrpuf::puf::{crp_count, Architecture, Challenge, CrpFormula, PufConfig, PufInstance};
use nrpuf::{Environment, Error, Substreams};

#[derive(Parser)]
#[command(name = "nrpuf", version, about = "Dual-crossbar resistive PUF simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Overrides the config's master_seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Size of the challenge-response space.
    CrpCount {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        cs: u64,
        /// Hidden-challenge width.
        #[arg(long, default_value_t = 1)]
        l: u64,
        #[arg(long, value_enum, default_value_t = Formula::Eq5)]
        formula: Formula,
    },
    /// Manufacture an instance and write it to a file.
    SaveInstance {
        /// PUF configuration (JSON); defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate challenges on a saved instance; prints `challenge bit` lines.
    Eval {
        #[arg(long)]
        instance: PathBuf,
        /// 64-bit challenges as hex.
        #[arg(long, num_args = 1.., required = true)]
        challenge: Vec<String>,
        /// Evaluate at the nominal operating point without metastability.
        #[arg(long)]
        noise_free: bool,
        /// Environment (JSON) for noisy evaluation.
        #[arg(long)]
        environment: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        dummy_count: usize,
        #[arg(long, value_enum, default_value_t = Arch::Dual)]
        arch: Arch,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Formula {
    Eq5,
    Table1,
    Table1Floor,
}

#[derive(Clone, Copy, ValueEnum)]
enum Arch {
    Dual,
    Single,
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::Json(_) => Failure::Config(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run {
            config,
            out,
            format,
            seed,
            workers,
        } => {
            let mut cfg = ExperimentConfig::from_file(&config).map_err(|e| Failure::Config(e.to_string()))?;
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            if workers == Some(0) {
                return Err(Failure::Config("--workers must be >= 1".into()));
            }
            let report = experiment::run(&cfg, workers)?;
            let format = match format {
                Format::Json => ReportFormat::Json,
                Format::Csv => ReportFormat::Csv,
            };
            let files = report
                .write(&out, format)
                .map_err(|e| Failure::Runtime(e.to_string()))?;
            for f in files {
                println!("{}", f.display());
            }
        }
        Command::CrpCount { n, m, cs, l, formula } => {
            let formula = match formula {
                Formula::Eq5 => CrpFormula::Eq5,
                Formula::Table1 => CrpFormula::Table1,
                Formula::Table1Floor => CrpFormula::Table1Floor,
            };
            println!("{}", crp_count(n, m, cs, l, formula)?);
        }
        Command::SaveInstance { config, seed, out } => {
            let cfg: PufConfig = match &config {
                Some(path) => read_json(path)?,
                None => PufConfig::default(),
            };
            let puf = PufInstance::build(&cfg, seed)?;
            experiment::save_instance(&puf, &out).map_err(|e| Failure::Runtime(e.to_string()))?;
        }
        Command::Eval {
            instance,
            challenge,
            noise_free,
            environment,
            seed,
            dummy_count,
            arch,
        } => {
            let challenges = challenge
                .iter()
                .map(|c| c.parse::<Challenge>())
                .collect::<Result<Vec<_>, _>>()?;
            let env: Environment = match &environment {
                Some(path) => read_json(path)?,
                None => Environment::default(),
            };
            env.validate()?;
            let puf = experiment::load_instance(&instance)?;
            let arch = match arch {
                Arch::Dual => Architecture::Dual,
                Arch::Single => Architecture::Single,
            };
            let streams = Substreams::new(seed);
            for (i, c) in challenges.iter().enumerate() {
                let bit = if noise_free {
                    puf.evaluate_ideal(*c, &env, arch)?
                } else {
                    let mut rng = streams.child(i as u64).rng();
                    puf.evaluate(*c, &env, dummy_count, arch, &mut rng)?.bit
                };
                println!("{c} {}", u8::from(bit));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
