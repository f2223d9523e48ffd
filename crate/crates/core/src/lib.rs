//! Bit-parallel boolean circuit classifiers.
//!
//! Data is stored feature-major: every binary feature is a packed vector of
//! one bit per example (plus its complement), so a single machine-word
//! operation evaluates a gate on 32 or 64 examples at once. Classifiers are
//! full `a`-ary trees of `a`-input lookup-table gates. Training fits the
//! tables greedily from the leaves up ([`learn::train_greedy`]) and can then
//! rewire leaves by hill climbing ([`learn::hill_climb`]).
//!
//! Modules:
//! - [`bitcore`]: packed vectors, transpose, tensor product, masked popcount.
//! - [`circuit`]: truth tables, tree topology, evaluation, model files, netlists.
//! - [`learn`]: pattern statistics, gate fitting criteria, greedy and hill-climb training.
//! - [`data`]: synthetic generators and dataset loaders.

pub mod bitcore;
pub mod circuit;
pub mod data;
mod error;
pub mod learn;
pub mod par;

pub use bitcore::{BitDataset, BitRows, BitVec, FeaturePair, PatternSlices, Word};
pub use circuit::{CircuitTree, EvalCache, TruthTable};
pub use error::{Error, Result};
pub use learn::{TrainConfig, TrainReport};
pub use par::Exec;
