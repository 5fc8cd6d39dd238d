use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use strip_broadcast::io::GeneratorKind;
use strip_broadcast::BroadcastError;
use strip_broadcast_cli::commands::{self, Algo, GenSpec};
use strip_broadcast_cli::suites;

#[derive(Parser)]
#[command(name = "broadcast", version, about = "Minimum broadcast sets on unit-disk graphs in strips")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file and print the active set.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Algo::Auto)]
        algo: Algo,
        /// Hop bound; overrides the one stored in the file.
        #[arg(long)]
        hops: Option<u32>,
    },
    /// Check a candidate set; exits 0 iff it is a valid broadcast set.
    Verify {
        file: PathBuf,
        /// Comma-separated point indices.
        #[arg(long)]
        set: String,
    },
    /// Write a generated instance file.
    Gen {
        #[arg(long, default_value = "random-strip", value_parser = parse_kind)]
        kind: GeneratorKind,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 0.6)]
        width: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.0)]
        min_sep: f64,
        /// Half-extent of random planar instances.
        #[arg(long, default_value_t = 1.3)]
        extent: f64,
        /// Distance between consecutive chain points.
        #[arg(long, default_value_t = 0.9)]
        spacing: f64,
        /// Number of bundle variables.
        #[arg(long, default_value_t = 2)]
        variables: usize,
        #[arg(long)]
        hops: Option<u32>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Render an instance, and optionally a set, as SVG.
    Render {
        file: PathBuf,
        #[arg(long)]
        set: Option<String>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run acceptance suites and print a pass/fail table.
    Bench {
        /// Suite name or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

fn parse_kind(s: &str) -> Result<GeneratorKind, String> {
    s.parse().map_err(|e: BroadcastError| e.to_string())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Solve { file, algo, hops } => {
            let out = commands::solve_file(&file, algo, hops)?;
            println!("{out}");
        }
        Command::Verify { file, set } => {
            let set = commands::parse_set(&set)?;
            let report = commands::verify_file(&file, &set)?;
            println!("{report}");
            if !report.is_valid() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Gen {
            kind,
            n,
            width,
            seed,
            min_sep,
            extent,
            spacing,
            variables,
            hops,
            output,
        } => {
            let spec = GenSpec {
                kind,
                n,
                width,
                seed,
                min_sep,
                extent,
                spacing,
                variables,
                hops,
            };
            let file = commands::generate(&spec)?;
            commands::write_file(&output, &file)?;
        }
        Command::Render { file, set, output } => {
            let set = set.as_deref().map(commands::parse_set).transpose()?;
            let svg = commands::render_file(&file, set.as_ref())?;
            std::fs::write(&output, svg).with_context(|| format!("writing {}", output.display()))?;
        }
        Command::Bench { suite } => {
            let results = if suite == "all" {
                suites::run_all()
            } else {
                let r = suites::run_suite(&suite)
                    .with_context(|| format!("unknown suite {suite:?}; expected one of {}", suites::NAMES.join(", ")))?;
                vec![r]
            };
            for r in &results {
                println!("{r}");
            }
            if results.iter().any(|r| !r.passed) {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let infeasible = e.downcast_ref::<BroadcastError>().is_some_and(BroadcastError::is_infeasible);
            ExitCode::from(if infeasible { 2 } else { 1 })
        }
    }
}
