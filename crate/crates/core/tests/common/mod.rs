#![allow(dead_code)]

use boolcirc::{BitDataset, BitRows, CircuitTree, TruthTable, Word};
use boolcirc_oracle::NaiveTree;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone)]
pub struct Case {
    pub tree: CircuitTree,
    pub naive: NaiveTree,
    pub rows: Vec<Vec<bool>>,
    pub labels: Vec<bool>,
}

impl Case {
    pub fn dataset<W: Word>(&self) -> BitDataset<W> {
        BitDataset::from_rows(&BitRows::from_bool_rows(&self.rows).unwrap(), &self.labels).unwrap()
    }
}

pub fn random_rows(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<Vec<bool>> {
    let density: f64 = rng.random_range(0.1..0.9);
    (0..n)
        .map(|_| (0..m).map(|_| rng.random_bool(density)).collect())
        .collect()
}

pub fn random_tree(rng: &mut ChaCha8Rng, arity: usize, depth: usize, n_features: usize) -> (CircuitTree, NaiveTree) {
    let internal = boolcirc_oracle::internal_count(arity, depth);
    let leaves: Vec<usize> = (0..arity.pow(depth as u32))
        .map(|_| rng.random_range(0..n_features))
        .collect();
    let tables: Vec<Vec<bool>> = (0..internal)
        .map(|_| (0..1 << arity).map(|_| rng.random_bool(0.5)).collect())
        .collect();
    let tree = CircuitTree::new(
        arity,
        depth,
        n_features,
        leaves.iter().map(|&l| l as u32).collect(),
        tables.iter().map(|t| TruthTable::from_bits(t).unwrap()).collect(),
    )
    .unwrap();
    (tree, NaiveTree { arity, depth, leaves, tables })
}

/// Random tree and dataset with arity in 2..=`max_arity`, depth in
/// 1..=`max_depth` and 1..=`max_n` examples.
pub fn random_case(seed: u64, max_arity: usize, max_depth: usize, max_n: usize) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let arity = rng.random_range(2..=max_arity);
    let depth = rng.random_range(1..=max_depth);
    let n = rng.random_range(1..=max_n);
    let m = rng.random_range(1..=40);
    let rows = random_rows(&mut rng, n, m);
    let labels = (0..n).map(|_| rng.random_bool(0.5)).collect();
    let (tree, naive) = random_tree(&mut rng, arity, depth, m);
    Case { tree, naive, rows, labels }
}
