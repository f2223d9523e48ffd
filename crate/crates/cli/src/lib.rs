//! Experiment runner for boolean circuit classifiers: dataset options,
//! single runs, grid sweeps and CSV reporting behind the `boolcirc` binary.

pub mod dataset;
pub mod experiment;
pub mod sweep;

pub use dataset::{DataArgs, DatasetKind, Split};
pub use experiment::{
    append_csv, classify, median, run_experiment, run_once, ClassifyOutcome, Outputs, Part, RunOutcome, TrainArgs,
    CSV_HEADER,
};
pub use sweep::{run_sweep, Cell, CellStatus, GridArgs};
