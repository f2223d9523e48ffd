//! Hyperparameter grids: the cross product of value lists, reported as
//! arity-by-depth tables of training and test error.

use std::fmt::Write as _;
use std::io::Write;
use std::time::Instant;

use anyhow::{ensure, Result};
use boolcirc::Exec;
use clap::Args;

use crate::dataset::DataArgs;
use crate::experiment::{append_csv, word_bits_parser, median, run_on_split, Outputs, RunOutcome, TrainArgs};

#[derive(Clone, Debug, Args)]
pub struct GridArgs {
    /// Arities, comma separated.
    #[arg(long = "arity", value_delimiter = ',', default_value = "4")]
    pub arity: Vec<usize>,
    /// Depths, comma separated.
    #[arg(long = "depth", value_delimiter = ',', default_value = "8")]
    pub depth: Vec<usize>,
    /// Propagation depths; empty means min(4, depth) per cell.
    #[arg(long = "t", value_delimiter = ',')]
    pub t: Vec<usize>,
    /// Hill-climbing trial counts.
    #[arg(long = "trials", value_delimiter = ',', default_value = "0")]
    pub trials: Vec<u64>,
    /// CUBES noise levels; empty keeps `--delta`.
    #[arg(long = "deltas", value_delimiter = ',')]
    pub deltas: Vec<f64>,
    /// Bit depths; empty keeps `--bits`.
    #[arg(id = "bits_list", long = "bits-list", value_delimiter = ',')]
    pub bits: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 64, value_parser = word_bits_parser())]
    pub word_bits: u32,
    /// Cells whose tree has more leaves than this are skipped.
    #[arg(long, default_value_t = 1 << 20)]
    pub leaf_cap: u64,
}

impl Default for GridArgs {
    fn default() -> Self {
        GridArgs {
            arity: vec![4],
            depth: vec![8],
            t: Vec::new(),
            trials: vec![0],
            deltas: Vec::new(),
            bits: Vec::new(),
            seed: 0,
            word_bits: 64,
            leaf_cap: 1 << 20,
        }
    }
}

#[derive(Clone, Debug)]
pub enum CellStatus {
    /// Per-seed outcomes.
    Done(Vec<RunOutcome>),
    Skipped(String),
    Failed(String),
}

#[derive(Clone, Debug)]
pub struct Cell {
    pub delta: f64,
    pub bits: usize,
    pub t: Option<usize>,
    pub trials: u64,
    pub arity: usize,
    pub depth: usize,
    pub status: CellStatus,
}

impl Cell {
    fn median(&self, f: impl Fn(&RunOutcome) -> f64) -> Option<f64> {
        match &self.status {
            CellStatus::Done(runs) => Some(median(&mut runs.iter().map(f).collect::<Vec<_>>())),
            _ => None,
        }
    }

    pub fn median_train(&self) -> Option<f64> {
        self.median(|o| o.train_error)
    }

    pub fn median_test(&self) -> Option<f64> {
        self.median(|o| o.test_error)
    }
}

fn leaves(arity: usize, depth: usize) -> Option<u64> {
    (arity as u64).checked_pow(depth as u32)
}

impl GridArgs {
    pub fn validate(&self) -> Result<()> {
        ensure!(!self.arity.is_empty(), "empty arity list");
        ensure!(!self.depth.is_empty(), "empty depth list");
        ensure!(!self.trials.is_empty(), "empty trial list");
        Ok(())
    }
}

/// Runs every cell of the grid for seeds `seed..seed + repeat`. Each data
/// setting is loaded once per seed and shared by all cells that use it.
pub fn run_sweep(
    base: &DataArgs,
    grid: &GridArgs,
    repeat: usize,
    outputs: &Outputs,
    exec: Exec,
    log: &mut dyn Write,
) -> Result<Vec<Cell>> {
    grid.validate()?;
    ensure!(repeat >= 1, "--repeat must be at least 1");
    let deltas = if grid.deltas.is_empty() { vec![base.delta] } else { grid.deltas.clone() };
    let bits_list = if grid.bits.is_empty() { vec![base.bits] } else { grid.bits.clone() };
    let ts: Vec<Option<usize>> = if grid.t.is_empty() { vec![None] } else { grid.t.iter().map(|&t| Some(t)).collect() };

    let mut cells = Vec::new();
    for &delta in &deltas {
        for &bits in &bits_list {
            let data = DataArgs { delta, bits, ..base.clone() };
            data.validate()?;
            let mut block: Vec<Cell> = Vec::new();
            for &t in &ts {
                for &trials in &grid.trials {
                    for &arity in &grid.arity {
                        for &depth in &grid.depth {
                            let status = match leaves(arity, depth) {
                                Some(l) if l <= grid.leaf_cap => {
                                    if t.is_some_and(|t| t > depth) {
                                        CellStatus::Skipped(format!("t exceeds depth {depth}"))
                                    } else {
                                        CellStatus::Done(Vec::new())
                                    }
                                }
                                _ => CellStatus::Skipped(format!(
                                    "{arity}^{depth} leaves exceed the cap of {}",
                                    grid.leaf_cap
                                )),
                            };
                            if let CellStatus::Skipped(why) = &status {
                                writeln!(log, "skipping a={arity} d={depth}: {why}")?;
                            }
                            block.push(Cell { delta, bits, t, trials, arity, depth, status });
                        }
                    }
                }
            }
            for i in 0..repeat as u64 {
                let seed = grid.seed + i;
                let start = Instant::now();
                let split = match data.load(seed) {
                    Ok(s) => s,
                    Err(e) => {
                        for cell in block.iter_mut().filter(|c| matches!(c.status, CellStatus::Done(_))) {
                            cell.status = CellStatus::Failed(format!("{e:#}"));
                        }
                        writeln!(log, "data for seed {seed} failed: {e:#}")?;
                        continue;
                    }
                };
                let data_time = start.elapsed();
                for cell in block.iter_mut() {
                    let CellStatus::Done(runs) = &mut cell.status else {
                        continue;
                    };
                    let targs = TrainArgs {
                        arity: cell.arity,
                        depth: cell.depth,
                        t: cell.t,
                        trials: cell.trials,
                        seed,
                        word_bits: grid.word_bits,
                        accept_equal: false,
                    };
                    match run_on_split(&data, &targs, &split, seed, data_time, exec) {
                        Ok(outcome) => {
                            writeln!(log, "{}", outcome.summary())?;
                            if let Some(path) = &outputs.csv_out {
                                append_csv(path, &[outcome.csv_record(exec)])?;
                            }
                            runs.push(outcome);
                        }
                        Err(e) => {
                            writeln!(log, "cell a={} d={} failed: {e:#}", cell.arity, cell.depth)?;
                            cell.status = CellStatus::Failed(format!("{e:#}"));
                        }
                    }
                }
            }
            cells.extend(block);
        }
    }
    write!(log, "{}", render_tables(base, grid, &cells))?;
    Ok(cells)
}

/// Text tables with one column per depth and a Train and a Test row per
/// arity; skipped cells are blank, failed cells read `fail`.
pub fn render_tables(base: &DataArgs, grid: &GridArgs, cells: &[Cell]) -> String {
    let mut s = String::new();
    let mut keys: Vec<(f64, usize, Option<usize>, u64)> = Vec::new();
    for c in cells {
        let k = (c.delta, c.bits, c.t, c.trials);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    for (delta, bits, t, trials) in keys {
        let data = DataArgs { delta, bits, ..base.clone() };
        let t_label = t.map_or("min(4,d)".to_string(), |t| t.to_string());
        writeln!(s, "\n{} [{}] t={t_label} n={trials}: error in %", data.dataset.name(), data.params()).unwrap();
        write!(s, "{:>10}", "a \\ d").unwrap();
        for d in &grid.depth {
            write!(s, "{d:>8}").unwrap();
        }
        s.push('\n');
        for &a in &grid.arity {
            for (label, is_test) in [("Train", false), ("Test", true)] {
                write!(s, "{:>4} {label:>5}", a).unwrap();
                for &d in &grid.depth {
                    let cell = cells.iter().find(|c| {
                        c.delta == delta && c.bits == bits && c.t == t && c.trials == trials && c.arity == a && c.depth == d
                    });
                    let text = match cell.map(|c| (&c.status, c)) {
                        Some((CellStatus::Done(_), c)) => {
                            let v = if is_test { c.median_test() } else { c.median_train() };
                            v.map_or(String::new(), |v| format!("{:.2}", 100.0 * v))
                        }
                        Some((CellStatus::Failed(_), _)) => "fail".into(),
                        _ => String::new(),
                    };
                    write!(s, "{text:>8}").unwrap();
                }
                s.push('\n');
            }
        }
    }
    s
}
