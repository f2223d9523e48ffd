//! Training: pattern statistics, gate fitting criteria, the greedy
//! bottom-up trainer and the leaf-rewiring hill climber.

mod climb;
mod counts;
mod fit;
mod greedy;

pub use climb::hill_climb;
pub use counts::{gather_pattern_counts, PatternCounts};
pub use fit::{fit_gate_accuracy, fit_gate_infogain, info_gain_of_split, table_correct};
pub use greedy::{draw_leaves, fit_tables, train, train_greedy};

use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bitcore::{xor_popcount, BitVec, Word, MAX_ARITY};
use crate::par::Exec;
use crate::{Error, Result};

/// Generator used for leaf wiring and hill-climbing moves.
pub type TrainRng = ChaCha8Rng;
/// Identifier of [`TrainRng`] recorded in reports.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Resolution of equal class counts in the accuracy criterion.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum TiePolicy {
    /// Output the class with more training examples overall, 0 if those tie.
    #[default]
    GlobalMajority,
    Zero,
    One,
}

/// Which criterion fits which gates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum CriterionRule {
    /// Information gain below the root, accuracy at the root.
    #[default]
    InfoGainBelowRoot,
    /// Accuracy everywhere.
    Accuracy,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrainConfig {
    /// Gate arity `a`, 2..=8.
    pub arity: usize,
    /// Tree depth `d`.
    pub depth: usize,
    /// How many ancestors of a rewired leaf get their tables re-fit
    /// (counted upward from the leaf), `1..=depth`.
    pub propagation: usize,
    /// Hill-climbing trials; 0 means greedy only.
    pub trials: u64,
    pub seed: u64,
    pub tie_policy: TiePolicy,
    pub criterion: CriterionRule,
    /// Keep rewirings that leave the training error unchanged.
    pub accept_equal: bool,
    pub exec: Exec,
}

impl TrainConfig {
    pub fn new(arity: usize, depth: usize) -> Self {
        TrainConfig {
            arity,
            depth,
            propagation: depth.clamp(1, 4),
            trials: 0,
            seed: 0,
            tie_policy: TiePolicy::default(),
            criterion: CriterionRule::default(),
            accept_equal: false,
            exec: Exec::default(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_trials(mut self, trials: u64, propagation: usize) -> Self {
        self.trials = trials;
        self.propagation = propagation;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_ARITY).contains(&self.arity) {
            return Err(Error::Config(format!(
                "arity {} outside 2..={MAX_ARITY}",
                self.arity
            )));
        }
        if self.depth < 1 {
            return Err(Error::Config("depth must be at least 1".into()));
        }
        if !(1..=self.depth).contains(&self.propagation) {
            return Err(Error::Config(format!(
                "propagation depth {} outside 1..={}",
                self.propagation, self.depth
            )));
        }
        crate::circuit::tree_shape(self.arity, self.depth)?;
        Ok(())
    }

    pub fn rng(&self) -> TrainRng {
        TrainRng::seed_from_u64(self.seed)
    }
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig::new(4, 8)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PhaseTimings {
    pub greedy: Duration,
    pub climb: Duration,
    pub eval: Duration,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainReport {
    pub train_error: f64,
    pub test_error: Option<f64>,
    pub trials: u64,
    pub accepted: u64,
    pub rejected: u64,
    /// Gates whose tables were re-fit, summed over trials.
    pub refit_nodes: u64,
    /// Gates whose outputs were recomputed, summed over trials.
    pub recomputed_nodes: u64,
    pub max_refit_per_trial: usize,
    pub max_recomputed_per_trial: usize,
    /// Training errors (misclassified counts) after each accepted trial,
    /// starting with the error before the first trial.
    pub error_trace: Vec<u64>,
    pub timings: PhaseTimings,
    pub rng: &'static str,
}

impl TrainReport {
    pub(crate) fn new(train_error: f64) -> Self {
        TrainReport {
            train_error,
            test_error: None,
            trials: 0,
            accepted: 0,
            rejected: 0,
            refit_nodes: 0,
            recomputed_nodes: 0,
            max_refit_per_trial: 0,
            max_recomputed_per_trial: 0,
            error_trace: Vec::new(),
            timings: PhaseTimings::default(),
            rng: RNG_ALGORITHM,
        }
    }
}

/// Fraction of positions where `predictions` and `labels` differ.
pub fn error_rate<W: Word>(predictions: &BitVec<W>, labels: &BitVec<W>) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::Shape("error rate of zero examples".into()));
    }
    Ok(predictions.hamming(labels)? as f64 / labels.len() as f64)
}

pub(crate) fn misclassified<W: Word>(predictions: &BitVec<W>, labels: &BitVec<W>) -> u64 {
    xor_popcount(predictions.words(), labels.words())
}
