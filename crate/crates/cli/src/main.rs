use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use boolcirc::circuit::{export_netlist, read_model};
use boolcirc::data::write_bgd;
use boolcirc::Exec;
use boolcirc_cli::experiment::write_predictions;
use boolcirc_cli::{classify, run_experiment, run_sweep, DataArgs, GridArgs, Outputs, Part, TrainArgs};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "boolcirc", version, about = "Train and apply boolean circuit classifiers")]
struct Cli {
    /// Worker threads; 1 runs everything on the main thread.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputArgs {
    /// Write the trained model (BGC1 format).
    #[arg(long)]
    model_out: Option<PathBuf>,
    /// Append one CSV row per run.
    #[arg(long)]
    csv_out: Option<PathBuf>,
    /// Write test-set predictions, one 0/1 per line.
    #[arg(long)]
    predict_out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Train on one configuration and report train and test error.
    Run {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        train: TrainArgs,
        #[command(flatten)]
        out: OutputArgs,
        /// Runs with seeds seed, seed+1, ...
        #[arg(long, default_value_t = 1)]
        repeat: usize,
    },
    /// Train every combination of the listed hyperparameters.
    Sweep {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        csv_out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        repeat: usize,
    },
    /// Apply a saved model to a dataset.
    Classify {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        /// Seed used to generate or shuffle the data.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Part::Test)]
        part: Part,
        #[arg(long)]
        predict_out: Option<PathBuf>,
        #[arg(long, default_value_t = 64, value_parser = boolcirc_cli::experiment::word_bits_parser())]
        word_bits: u32,
    },
    /// Print a saved model as a look-up-table netlist.
    Netlist {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a dataset in the bgd text format.
    Dump {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Part::Train)]
        part: Part,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => Ok(std::io::stdout().write_all(text.as_bytes())?),
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let exec = match cli.threads {
        Some(1) => Exec::Sequential,
        Some(n) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .context("configuring the thread pool")?;
            Exec::Parallel
        }
        None => Exec::default(),
    };
    let mut stdout = std::io::stdout();
    match cli.command {
        Command::Run { data, train, out, repeat } => {
            let outputs = Outputs {
                model_out: out.model_out,
                csv_out: out.csv_out,
                predict_out: out.predict_out,
            };
            run_experiment(&data, &train, repeat, &outputs, exec, &mut stdout)?;
        }
        Command::Sweep { data, grid, csv_out, repeat } => {
            let outputs = Outputs { csv_out, ..Outputs::default() };
            run_sweep(&data, &grid, repeat, &outputs, exec, &mut stdout)?;
        }
        Command::Classify { model, data, seed, part, predict_out, word_bits } => {
            let tree = read_model(&model).with_context(|| format!("reading {}", model.display()))?;
            let split = data.load(seed)?;
            let result = classify(&tree, split.part(part), word_bits, exec)?;
            if let Some(path) = &predict_out {
                write_predictions(path, &result.predictions)?;
            }
            println!(
                "{} examples: error {:.2}%, {:.0} classifications/s",
                result.predictions.len(),
                100.0 * result.error_rate,
                result.throughput()
            );
        }
        Command::Netlist { model, out } => {
            let tree = read_model(&model).with_context(|| format!("reading {}", model.display()))?;
            emit(out.as_ref(), &export_netlist(&tree))?;
        }
        Command::Dump { data, seed, part, out } => {
            let split = data.load(seed)?;
            emit(out.as_ref(), &write_bgd(split.part(part)))?;
        }
    }
    Ok(())
}
