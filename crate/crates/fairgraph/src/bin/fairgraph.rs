//! Thin command-line front end over the library: `analyze`, `augment`,
//! `verify`, and `metrics`. Reports go to stdout as JSON; errors exit
//! nonzero with a message on stderr.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fairgraph::cli::{
    cmd_analyze, cmd_augment, cmd_metrics, cmd_verify, DatasetPaths, MetricsMode,
};
use fairgraph::io::to_report_json;
use fairgraph::verify::VerifyHooks;

#[derive(Parser)]
#[command(name = "fairgraph", version, about = "Sensitive-attribute bias analysis and fairness-aware graph augmentation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Node,
    Link,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the bias report (correlation, bound terms, partition counts)
    Analyze {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        sensitive: PathBuf,
        /// Optional pipeline config; validated but not used by analysis
        #[arg(long)]
        config: Option<PathBuf>,
        /// Binarize a multi-class sensitive column one-vs-rest
        #[arg(long)]
        positive_class: Option<i64>,
    },
    /// Run the augmentation pipeline and write the augmented dataset
    Augment {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        sensitive: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory (created if missing)
        #[arg(long)]
        out: PathBuf,
        /// Overrides the seed from the config file
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        positive_class: Option<i64>,
    },
    /// Run the randomized verification suites
    Verify {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Negative-control hook: scales ||c||_1 inside the bound check
        #[arg(long, hide = true, default_value_t = 1.0)]
        corrupt_c_l1: f64,
    },
    /// Fairness and utility metrics over a predictions file
    Metrics {
        #[arg(long)]
        predictions: PathBuf,
        #[arg(long)]
        sensitive: PathBuf,
        /// Required in link mode to stratify candidate edges
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        positive_class: Option<i64>,
    },
}

fn run(cli: Cli) -> fairgraph::Result<bool> {
    match cli.command {
        Command::Analyze {
            graph,
            features,
            sensitive,
            config,
            positive_class,
        } => {
            let report = cmd_analyze(
                &DatasetPaths {
                    graph,
                    features,
                    sensitive,
                    positive_class,
                },
                config.as_deref(),
            )?;
            print!("{}", to_report_json(&report)?);
            Ok(true)
        }
        Command::Augment {
            graph,
            features,
            sensitive,
            config,
            out,
            seed,
            positive_class,
        } => {
            let manifest = cmd_augment(
                &DatasetPaths {
                    graph,
                    features,
                    sensitive,
                    positive_class,
                },
                config.as_deref(),
                &out,
                seed,
            )?;
            print!("{}", to_report_json(&manifest)?);
            Ok(true)
        }
        Command::Verify {
            trials,
            seed,
            corrupt_c_l1,
        } => {
            let report = cmd_verify(
                trials,
                seed,
                &VerifyHooks {
                    c_l1_scale: corrupt_c_l1,
                },
            )?;
            print!("{}", to_report_json(&report)?);
            for property in &report.properties {
                let status = if property.passed() { "pass" } else { "FAIL" };
                eprintln!(
                    "{status} {name}: {ok}/{total} trials, worst margin {margin:.3e}",
                    name = property.name,
                    ok = property.trials - property.failures,
                    total = property.trials,
                    margin = property.worst_margin,
                );
                if !property.passed() {
                    eprintln!(
                        "  replay: --seed {} (failing trials {:?})",
                        report.seed, property.failing_trials
                    );
                }
            }
            Ok(report.passed)
        }
        Command::Metrics {
            predictions,
            sensitive,
            graph,
            mode,
            positive_class,
        } => {
            let mode = match mode {
                ModeArg::Node => MetricsMode::Node,
                ModeArg::Link => MetricsMode::Link,
            };
            let report = cmd_metrics(
                &predictions,
                &sensitive,
                graph.as_deref(),
                mode,
                positive_class,
            )?;
            print!("{}", to_report_json(&report)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
