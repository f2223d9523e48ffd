//! Single experiments: build data, train, evaluate, write artifacts.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{ensure, Context, Result};
use boolcirc::circuit::{predict_with, write_model};
use boolcirc::data::LabeledRows;
use boolcirc::learn::{error_rate, train};
use boolcirc::{CircuitTree, Exec, TrainConfig, Word};
use clap::Args;

use crate::dataset::{DataArgs, Split};

/// Accepts `32` or `64`.
pub fn word_bits_parser() -> impl clap::builder::TypedValueParser<Value = u32> {
    use clap::builder::TypedValueParser;
    clap::builder::PossibleValuesParser::new(["32", "64"]).map(|s| s.parse::<u32>().unwrap())
}

#[derive(Clone, Debug, Args)]
pub struct TrainArgs {
    /// Gate arity.
    #[arg(long, default_value_t = 4)]
    pub arity: usize,
    /// Tree depth.
    #[arg(long, default_value_t = 8)]
    pub depth: usize,
    /// Ancestors re-fit after each hill-climbing move [default: min(4, depth)].
    #[arg(long)]
    pub t: Option<usize>,
    /// Hill-climbing trials; 0 trains greedily only.
    #[arg(long, default_value_t = 0)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Bits per machine word in the packed kernels.
    #[arg(long, default_value_t = 64, value_parser = word_bits_parser())]
    pub word_bits: u32,
    /// Also keep hill-climbing moves that leave the training error unchanged.
    #[arg(long)]
    pub accept_equal: bool,
}

impl Default for TrainArgs {
    fn default() -> Self {
        TrainArgs {
            arity: 4,
            depth: 8,
            t: None,
            trials: 0,
            seed: 0,
            word_bits: 64,
            accept_equal: false,
        }
    }
}

impl TrainArgs {
    pub fn propagation(&self) -> usize {
        self.t.unwrap_or(self.depth.min(4))
    }

    pub fn config(&self, seed: u64, exec: Exec) -> Result<TrainConfig> {
        let cfg = TrainConfig {
            accept_equal: self.accept_equal,
            exec,
            ..TrainConfig::new(self.arity, self.depth).with_trials(self.trials, self.propagation()).with_seed(seed)
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Wall time per phase.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Timings {
    pub data: Duration,
    pub greedy: Duration,
    pub climb: Duration,
    pub eval: Duration,
}

/// Result of one seeded run.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub dataset: &'static str,
    pub params: String,
    pub n_train: usize,
    pub n_test: usize,
    pub arity: usize,
    pub depth: usize,
    pub t: usize,
    pub trials: u64,
    pub seed: u64,
    pub word_bits: u32,
    pub train_error: f64,
    pub test_error: f64,
    pub accepted: u64,
    pub rejected: u64,
    pub timings: Timings,
    pub tree: CircuitTree,
    /// Test-set predictions.
    pub predictions: Vec<bool>,
}

fn train_on<W: Word>(split: &Split, cfg: &TrainConfig) -> Result<(CircuitTree, boolcirc::TrainReport, Vec<bool>, Duration)> {
    let train_set = split.train.to_dataset::<W>()?;
    let test_set = split.test.to_dataset::<W>()?;
    let (tree, _, report) = train(&train_set, None, cfg)?;
    let start = Instant::now();
    let pred = predict_with(&tree, &test_set, cfg.exec)?;
    let eval = start.elapsed();
    let test_error = error_rate(&pred, test_set.labels())?;
    let report = boolcirc::TrainReport {
        test_error: Some(test_error),
        ..report
    };
    Ok((tree, report, pred.to_bools(), eval))
}

/// Trains and evaluates on an already loaded split.
pub fn run_on_split(
    data: &DataArgs,
    targs: &TrainArgs,
    split: &Split,
    seed: u64,
    data_time: Duration,
    exec: Exec,
) -> Result<RunOutcome> {
    let cfg = targs.config(seed, exec)?;
    let (tree, report, predictions, eval) = match targs.word_bits {
        32 => train_on::<u32>(split, &cfg)?,
        _ => train_on::<u64>(split, &cfg)?,
    };
    Ok(RunOutcome {
        dataset: data.dataset.name(),
        params: data.params(),
        n_train: split.train.len(),
        n_test: split.test.len(),
        arity: targs.arity,
        depth: targs.depth,
        t: cfg.propagation,
        trials: targs.trials,
        seed,
        word_bits: targs.word_bits,
        train_error: report.train_error,
        test_error: report.test_error.unwrap(),
        accepted: report.accepted,
        rejected: report.rejected,
        timings: Timings {
            data: data_time,
            greedy: report.timings.greedy,
            climb: report.timings.climb,
            eval,
        },
        tree,
        predictions,
    })
}

/// Loads the data for `seed` and runs one experiment on it.
pub fn run_once(data: &DataArgs, targs: &TrainArgs, seed: u64, exec: Exec) -> Result<RunOutcome> {
    targs.config(seed, exec)?;
    let start = Instant::now();
    let split = data.load(seed)?;
    run_on_split(data, targs, &split, seed, start.elapsed(), exec)
}

pub const CSV_HEADER: [&str; 20] = [
    "dataset", "params", "train", "test", "a", "d", "t", "n", "seed", "word_bits", "train_err", "test_err",
    "accepted", "rejected", "data_ms", "greedy_ms", "climb_ms", "eval_ms", "total_ms", "exec",
];

fn ms(d: Duration) -> String {
    format!("{:.3}", d.as_secs_f64() * 1e3)
}

impl RunOutcome {
    pub fn csv_record(&self, exec: Exec) -> Vec<String> {
        let t = &self.timings;
        vec![
            self.dataset.to_string(),
            self.params.clone(),
            self.n_train.to_string(),
            self.n_test.to_string(),
            self.arity.to_string(),
            self.depth.to_string(),
            self.t.to_string(),
            self.trials.to_string(),
            self.seed.to_string(),
            self.word_bits.to_string(),
            format!("{:.6}", self.train_error),
            format!("{:.6}", self.test_error),
            self.accepted.to_string(),
            self.rejected.to_string(),
            ms(t.data),
            ms(t.greedy),
            ms(t.climb),
            ms(t.eval),
            ms(t.data + t.greedy + t.climb + t.eval),
            exec.name().to_string(),
        ]
    }

    pub fn summary(&self) -> String {
        format!(
            "{} [{}] a={} d={} t={} n={} seed={}: train error {:.2}%, test error {:.2}% (greedy {:.0} ms, climb {:.0} ms, eval {:.0} ms)",
            self.dataset,
            self.params,
            self.arity,
            self.depth,
            self.t,
            self.trials,
            self.seed,
            100.0 * self.train_error,
            100.0 * self.test_error,
            self.timings.greedy.as_secs_f64() * 1e3,
            self.timings.climb.as_secs_f64() * 1e3,
            self.timings.eval.as_secs_f64() * 1e3,
        )
    }
}

/// Appends rows to a CSV file, writing the header first if the file is
/// new or empty. All rows go out in a single write.
pub fn append_csv(path: &Path, records: &[Vec<String>]) -> Result<()> {
    let needs_header = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut w = csv::Writer::from_writer(Vec::new());
    if needs_header {
        w.write_record(CSV_HEADER)?;
    }
    for r in records {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().context("formatting CSV")?;
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening {}", path.display()))?;
    file.write_all(&bytes)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn write_predictions(path: &Path, predictions: &[bool]) -> Result<()> {
    let text: String = predictions
        .iter()
        .flat_map(|&p| [if p { '1' } else { '0' }, '\n'])
        .collect();
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// `dir/stem-s<seed>.ext` when several seeds share one output path.
pub fn per_seed_path(path: &Path, seed: u64, repeated: bool) -> PathBuf {
    if !repeated {
        return path.to_path_buf();
    }
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}-s{seed}.{}", ext.to_string_lossy()),
        None => format!("{stem}-s{seed}"),
    };
    path.with_file_name(name)
}

#[derive(Clone, Debug, Default)]
pub struct Outputs {
    pub model_out: Option<PathBuf>,
    pub csv_out: Option<PathBuf>,
    pub predict_out: Option<PathBuf>,
}

/// Runs seeds `seed, seed + 1, ..` (`repeat` of them), writing a summary
/// line per run to `log` and the requested artifacts.
pub fn run_experiment(
    data: &DataArgs,
    targs: &TrainArgs,
    repeat: usize,
    outputs: &Outputs,
    exec: Exec,
    log: &mut dyn Write,
) -> Result<Vec<RunOutcome>> {
    ensure!(repeat >= 1, "--repeat must be at least 1");
    data.validate()?;
    targs.config(targs.seed, exec)?;
    let mut outcomes = Vec::with_capacity(repeat);
    for i in 0..repeat as u64 {
        let seed = targs.seed + i;
        let outcome = run_once(data, targs, seed, exec)?;
        writeln!(log, "{}", outcome.summary())?;
        if let Some(path) = &outputs.model_out {
            let path = per_seed_path(path, seed, repeat > 1);
            write_model(&outcome.tree, &path).with_context(|| format!("writing {}", path.display()))?;
        }
        if let Some(path) = &outputs.predict_out {
            write_predictions(&per_seed_path(path, seed, repeat > 1), &outcome.predictions)?;
        }
        if let Some(path) = &outputs.csv_out {
            append_csv(path, &[outcome.csv_record(exec)])?;
        }
        outcomes.push(outcome);
    }
    if repeat > 1 {
        let mut test: Vec<f64> = outcomes.iter().map(|o| o.test_error).collect();
        writeln!(log, "median test error over {repeat} seeds: {:.2}%", 100.0 * median(&mut test))?;
    }
    Ok(outcomes)
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Which part of a dataset to classify or dump.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Part {
    Train,
    Test,
}

impl Split {
    pub fn part(&self, part: Part) -> &LabeledRows {
        match part {
            Part::Train => &self.train,
            Part::Test => &self.test,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ClassifyOutcome {
    pub error_rate: f64,
    pub predictions: Vec<bool>,
    pub elapsed: Duration,
}

impl ClassifyOutcome {
    pub fn throughput(&self) -> f64 {
        self.predictions.len() as f64 / self.elapsed.as_secs_f64().max(1e-9)
    }
}

fn classify_as<W: Word>(tree: &CircuitTree, rows: &LabeledRows, exec: Exec) -> Result<ClassifyOutcome> {
    let data = rows.to_dataset::<W>()?;
    let start = Instant::now();
    let pred = predict_with(tree, &data, exec)?;
    let elapsed = start.elapsed();
    Ok(ClassifyOutcome {
        error_rate: error_rate(&pred, data.labels())?,
        predictions: pred.to_bools(),
        elapsed,
    })
}

/// Applies a trained model to labelled examples.
pub fn classify(tree: &CircuitTree, rows: &LabeledRows, word_bits: u32, exec: Exec) -> Result<ClassifyOutcome> {
    ensure!(
        rows.width() == tree.n_features(),
        "model expects {} features per example, dataset has {}",
        tree.n_features(),
        rows.width()
    );
    match word_bits {
        32 => classify_as::<u32>(tree, rows, exec),
        _ => classify_as::<u64>(tree, rows, exec),
    }
}
