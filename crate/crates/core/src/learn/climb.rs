use std::time::Instant;

use rand::Rng;

use super::counts::count_patterns;
use super::greedy::choose_table;
use super::{misclassified, TrainConfig, TrainReport, TrainRng};
use crate::bitcore::{BitDataset, BitVec, Word};
use crate::circuit::{child_words, recompute_node, CircuitTree, EvalCache, GatePlan};
use crate::{Error, Result};

fn check_cache<W: Word>(tree: &CircuitTree, cache: &EvalCache<W>, data: &BitDataset<W>) -> Result<()> {
    if cache.len() != tree.internal_count() {
        return Err(Error::Invariant(format!(
            "cache holds {} outputs for {} gates",
            cache.len(),
            tree.internal_count()
        )));
    }
    let n = data.n_examples();
    if let Some(i) = (0..cache.len()).find(|&i| cache.output(i).len() != n) {
        return Err(Error::Invariant(format!(
            "cached output {i} has length {}, dataset has {n} examples",
            cache.output(i).len()
        )));
    }
    tree.validate_for(data.n_features())?;
    if &recompute_node(tree, data, cache, 0) != cache.root() {
        return Err(Error::Invariant("cached root output does not match its children".into()));
    }
    Ok(())
}

/// Leaf-rewiring hill climbing.
///
/// Each trial moves one uniformly chosen leaf to a different uniformly
/// chosen coordinate, re-fits the tables of the `cfg.propagation` nearest
/// ancestors, recomputes every gate on the path to the root, and keeps the
/// change only if the training error drops (or stays equal with
/// `cfg.accept_equal`). Rejected trials restore wiring, tables and cache.
pub fn hill_climb<W: Word>(
    mut tree: CircuitTree,
    mut cache: EvalCache<W>,
    data: &BitDataset<W>,
    cfg: &TrainConfig,
    rng: &mut TrainRng,
) -> Result<(CircuitTree, EvalCache<W>, TrainReport)> {
    cfg.validate()?;
    check_cache(&tree, &cache, data)?;
    let n = data.n_examples();
    let labels = data.labels();
    let mut current = misclassified(cache.root(), labels);
    let mut report = TrainReport::new(current as f64 / n as f64);
    report.error_trace.push(current);
    if cfg.trials == 0 {
        return Ok((tree, cache, report));
    }

    let start = Instant::now();
    let depth = tree.depth();
    let refit = cfg.propagation.min(depth);
    let n_features = tree.n_features() as u32;
    let mut saved_outputs: Vec<BitVec<W>> = vec![BitVec::zeros(n); depth];
    let mut saved_tables = Vec::with_capacity(refit);

    for _ in 0..cfg.trials {
        report.trials += 1;
        let leaf = rng.random_range(0..tree.leaf_count() as u32) as usize;
        if n_features < 2 {
            report.rejected += 1;
            continue;
        }
        let old_input = tree.leaf_inputs()[leaf];
        let mut new_input = rng.random_range(0..n_features - 1);
        if new_input >= old_input {
            new_input += 1;
        }

        let path = tree.path_to_root(leaf);
        saved_tables.clear();
        saved_tables.extend(path[..refit].iter().map(|&g| *tree.gate(g)));
        for (slot, &g) in saved_outputs.iter_mut().zip(&path) {
            slot.clone_from(cache.output(g));
        }

        tree.set_leaf_input(leaf, new_input);
        let outputs = cache.outputs_mut();
        for (level, &node) in path.iter().enumerate() {
            let mut out = std::mem::take(&mut outputs[node]);
            {
                let inputs = child_words(&tree, data, node, |c| outputs[c].words());
                let table = if level < refit {
                    let counts = count_patterns(&inputs, labels.words(), n, cfg.exec);
                    let t = choose_table(&counts, node, cfg)?;
                    tree.set_gate(node, t);
                    t
                } else {
                    *tree.gate(node)
                };
                GatePlan::compile(&table).run(&inputs, out.words_mut(), n, cfg.exec);
            }
            outputs[node] = out;
        }
        report.refit_nodes += refit as u64;
        report.recomputed_nodes += path.len() as u64;
        report.max_refit_per_trial = report.max_refit_per_trial.max(refit);
        report.max_recomputed_per_trial = report.max_recomputed_per_trial.max(path.len());

        let candidate = misclassified(&outputs[0], labels);
        if candidate < current || (cfg.accept_equal && candidate == current) {
            current = candidate;
            report.accepted += 1;
            report.error_trace.push(current);
        } else {
            report.rejected += 1;
            tree.set_leaf_input(leaf, old_input);
            for (&g, t) in path.iter().zip(&saved_tables) {
                tree.set_gate(g, *t);
            }
            for (slot, &g) in saved_outputs.iter_mut().zip(&path) {
                std::mem::swap(slot, &mut outputs[g]);
            }
        }
    }
    report.train_error = current as f64 / n as f64;
    report.timings.climb = start.elapsed();
    Ok((tree, cache, report))
}
