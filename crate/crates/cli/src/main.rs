//! Command-line front end: dataset generation, training, convergence-rate
//! certification, convergence verification across seeded trials, and the
//! Monte Carlo lemma probe suite.
//!
//! Exit codes: 0 success, 2 usage/validation, 3 divergence, 4 probe failure.

// Negated comparisons in domain checks also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use clap::{Parser, Subcommand, ValueEnum};
use config::{EnvelopeChoice, ExperimentConfig, GeneratorSpec, GramChoice};
use relugd::probes::ProbeScale;
use relugd::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "relugd", version, about = "Gradient descent convergence certificates for shallow rectified networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScaleArg {
    /// 1e5 samples per probe.
    Quick,
    /// 1e7 samples per probe.
    Full,
}

impl From<ScaleArg> for ProbeScale {
    fn from(s: ScaleArg) -> Self {
        match s {
            ScaleArg::Quick => ProbeScale::Quick,
            ScaleArg::Full => ProbeScale::Full,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sample a pairwise linearly independent dataset and write dataset.json.
    GenData {
        /// Generator spec JSON ({"d", "m", "seed", "norm_range"}); overrides
        /// the individual flags.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        norm_min: f64,
        #[arg(long, default_value_t = 1.0)]
        norm_max: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train one seeded run and write trajectory.csv plus net_final.json.
    Train {
        /// Experiment config JSON (see README for the schema).
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Rate constant for the envelope column; overrides the config.
        #[arg(long, value_enum)]
        envelope: Option<EnvelopeChoice>,
    },
    /// Evaluate the full rate certificate for a dataset.
    Certify {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        eps: f64,
        /// Deterministic Gram evaluation method.
        #[arg(long, value_enum, default_value = "closed")]
        gram: GramChoice,
        #[arg(long, default_value_t = 1_000_000)]
        mc_samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train many seeded trials and report how often the risk stays under
    /// the certified envelope.
    VerifyConvergence {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the Monte Carlo probe suite for the supporting lemmas.
    ProbeLemmas {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "quick")]
        scale: ScaleArg,
        #[arg(long)]
        out: PathBuf,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Divergence { .. } => 3,
        Error::Io(_) | Error::Json(_) => 1,
        _ => 2,
    }
}

fn run(cli: Cli) -> relugd::Result<u8> {
    match cli.command {
        Command::GenData {
            config,
            d,
            m,
            seed,
            norm_min,
            norm_max,
            out,
        } => {
            let spec = match config {
                Some(path) => relugd::io::read_json::<GeneratorSpec>(&path)?,
                None => {
                    let (d, m) = match (d, m) {
                        (Some(d), Some(m)) => (d, m),
                        _ => {
                            return Err(Error::Domain(
                                "either --config or both --d and --m are required".into(),
                            ))
                        }
                    };
                    GeneratorSpec {
                        schema: None,
                        d,
                        m,
                        seed,
                        norm_range: [norm_min, norm_max],
                    }
                }
            };
            let path = commands::cmd_gen_data(&spec, &out)?;
            println!("wrote {}", path.display());
            Ok(0)
        }
        Command::Train {
            config,
            out,
            envelope,
        } => {
            let cfg: ExperimentConfig = relugd::io::read_json(&config)?;
            commands::cmd_train(&cfg, &out, envelope)?;
            Ok(0)
        }
        Command::Certify {
            data,
            eps,
            gram,
            mc_samples,
            seed,
            out,
        } => {
            let path = commands::cmd_certify(&data, eps, gram, mc_samples, seed, &out)?;
            println!("wrote {}", path.display());
            Ok(0)
        }
        Command::VerifyConvergence { config, out } => {
            let cfg: ExperimentConfig = relugd::io::read_json(&config)?;
            commands::cmd_verify_convergence(&cfg, &out)?;
            Ok(0)
        }
        Command::ProbeLemmas { seed, scale, out } => {
            let failed = commands::cmd_probe_lemmas(seed, scale.into(), &out)?;
            Ok(if failed { 4 } else { 0 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            if let Error::InvalidData { pairs, .. } = &err {
                for (i, j) in pairs {
                    eprintln!("  dependent pair: ({i}, {j})");
                }
            }
            ExitCode::from(exit_code_for(&err))
        }
    }
}
