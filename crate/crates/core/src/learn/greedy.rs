use std::time::Instant;

use rand::Rng;

use super::counts::count_patterns;
use super::{
    error_rate, fit_gate_accuracy, fit_gate_infogain, hill_climb, CriterionRule, PatternCounts,
    TrainConfig, TrainReport, TrainRng,
};
use crate::bitcore::{BitDataset, BitVec, Word};
use crate::circuit::{child_words, predict_with, run_gate, tree_shape, CircuitTree, EvalCache, TruthTable};
use crate::par::Exec;
use crate::{Error, Result};

/// Leaf wiring: each leaf reads a coordinate drawn uniformly with
/// replacement.
pub fn draw_leaves(rng: &mut TrainRng, leaf_count: usize, n_features: usize) -> Vec<u32> {
    (0..leaf_count)
        .map(|_| rng.random_range(0..n_features as u32))
        .collect()
}

pub(crate) fn choose_table(counts: &PatternCounts, node: usize, cfg: &TrainConfig) -> Result<TruthTable> {
    if node == 0 || cfg.criterion == CriterionRule::Accuracy {
        Ok(fit_gate_accuracy(counts, cfg.tie_policy))
    } else {
        fit_gate_infogain(counts, cfg.tie_policy)
    }
}

/// Fits every truth table of `tree` bottom-up for its current wiring.
/// Each gate is fit as if its output were the classifier's decision.
pub fn fit_tables<W: Word>(tree: &mut CircuitTree, data: &BitDataset<W>, cfg: &TrainConfig) -> Result<EvalCache<W>> {
    tree.validate_for(data.n_features())?;
    let n = data.n_examples();
    let labels = data.labels().words();
    let mut outputs = vec![BitVec::<W>::zeros(0); tree.internal_count()];
    for level in (0..tree.depth()).rev() {
        let range = tree.level_range(level);
        let inner = if range.len() < 4 { cfg.exec } else { Exec::Sequential };
        let fitted: Vec<Result<(TruthTable, BitVec<W>)>> = {
            let lower = &outputs[range.end..];
            let tree = &*tree;
            cfg.exec.map_range(range.clone(), |node| {
                let inputs = child_words(tree, data, node, |c| lower[c - range.end].words());
                let counts = count_patterns(&inputs, labels, n, inner);
                let table = choose_table(&counts, node, cfg)?;
                Ok((table, run_gate(&table, &inputs, n, inner)))
            })
        };
        for (node, result) in range.zip(fitted) {
            let (table, out) = result?;
            tree.set_gate(node, table);
            outputs[node] = out;
        }
    }
    Ok(EvalCache::from_outputs(outputs))
}

fn greedy_with_rng<W: Word>(
    data: &BitDataset<W>,
    cfg: &TrainConfig,
    rng: &mut TrainRng,
) -> Result<(CircuitTree, EvalCache<W>, TrainReport)> {
    cfg.validate()?;
    if data.n_features() == 0 {
        return Err(Error::Shape("dataset has no features".into()));
    }
    let start = Instant::now();
    let (_, leaves) = tree_shape(cfg.arity, cfg.depth)?;
    let wiring = draw_leaves(rng, leaves, data.n_features());
    let mut tree = CircuitTree::with_leaves(cfg.arity, cfg.depth, data.n_features(), wiring)?;
    let cache = fit_tables(&mut tree, data, cfg)?;
    let mut report = TrainReport::new(error_rate(cache.root(), data.labels())?);
    report.timings.greedy = start.elapsed();
    Ok((tree, cache, report))
}

fn add_test_error<W: Word>(
    tree: &CircuitTree,
    test: Option<&BitDataset<W>>,
    cfg: &TrainConfig,
    report: &mut TrainReport,
) -> Result<()> {
    if let Some(test) = test {
        let start = Instant::now();
        let pred = predict_with(tree, test, cfg.exec)?;
        report.test_error = Some(error_rate(&pred, test.labels())?);
        report.timings.eval = start.elapsed();
    }
    Ok(())
}

/// Greedy training: random leaf wiring, then tables fit from the leaves up.
/// Non-root gates maximize information gain, the root maximizes accuracy.
pub fn train_greedy<W: Word>(
    data: &BitDataset<W>,
    test: Option<&BitDataset<W>>,
    cfg: &TrainConfig,
) -> Result<(CircuitTree, EvalCache<W>, TrainReport)> {
    let mut rng = cfg.rng();
    let (tree, cache, mut report) = greedy_with_rng(data, cfg, &mut rng)?;
    add_test_error(&tree, test, cfg, &mut report)?;
    Ok((tree, cache, report))
}

/// Greedy training followed by `cfg.trials` hill-climbing trials, sharing
/// one generator seeded from `cfg.seed`.
pub fn train<W: Word>(
    data: &BitDataset<W>,
    test: Option<&BitDataset<W>>,
    cfg: &TrainConfig,
) -> Result<(CircuitTree, EvalCache<W>, TrainReport)> {
    let mut rng = cfg.rng();
    let (tree, cache, greedy) = greedy_with_rng(data, cfg, &mut rng)?;
    let (tree, cache, mut report) = hill_climb(tree, cache, data, cfg, &mut rng)?;
    report.timings.greedy = greedy.timings.greedy;
    add_test_error(&tree, test, cfg, &mut report)?;
    Ok((tree, cache, report))
}
