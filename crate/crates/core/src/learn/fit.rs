//! Truth-table fitting from pattern counts.

use std::cmp::Ordering;

use super::{PatternCounts, TiePolicy};
use crate::circuit::TruthTable;
use crate::{Error, Result};

fn tie_bit(counts: &PatternCounts, tie: TiePolicy) -> bool {
    match tie {
        TiePolicy::Zero => false,
        TiePolicy::One => true,
        TiePolicy::GlobalMajority => counts.total1() > counts.total0(),
    }
}

/// Majority vote per pattern: entry `p` is 1 iff more class-1 than class-0
/// examples produce `p`. Ties, including unseen patterns, follow `tie`.
pub fn fit_gate_accuracy(counts: &PatternCounts, tie: TiePolicy) -> TruthTable {
    let fallback = tie_bit(counts, tie);
    TruthTable::from_fn(counts.arity(), |p| match counts.c1[p].cmp(&counts.c0[p]) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => fallback,
    })
    .expect("counts carry a valid arity")
}

/// Training examples a table classifies correctly when used on its own.
pub fn table_correct(counts: &PatternCounts, table: &TruthTable) -> u64 {
    (0..counts.patterns())
        .map(|p| if table.get(p) { counts.c1[p] } else { counts.c0[p] })
        .sum()
}

#[inline]
fn xlog2x(c: u64) -> f64 {
    if c == 0 {
        0.0
    } else {
        let c = c as f64;
        c * c.log2()
    }
}

/// Mutual information, in bits, between the 2x2 contingency rows
/// `[(class0, class1) for output 0, (class0, class1) for output 1]` and the
/// label. Identical count multisets give bit-identical results.
fn contingency_gain(rows: [(u64, u64); 2]) -> f64 {
    let [(a0, a1), (b0, b1)] = rows;
    let n = a0 + a1 + b0 + b1;
    if (a0 as u128) * (b1 as u128) == (a1 as u128) * (b0 as u128) {
        return 0.0;
    }
    let mut cells = [a0, a1, b0, b1];
    cells.sort_unstable();
    let mut margins = [a0 + a1, b0 + b1, a0 + b0, a1 + b1];
    margins.sort_unstable();
    let cell_term: f64 = cells.iter().map(|&c| xlog2x(c)).sum();
    let margin_term: f64 = margins.iter().map(|&c| xlog2x(c)).sum();
    let gain = (cell_term - margin_term + xlog2x(n)) / n as f64;
    gain.clamp(0.0, 1.0)
}

/// Information gain `H(label) - H(label | gate output)` in bits for the
/// split that `table` induces on the counted examples.
pub fn info_gain_of_split(counts: &PatternCounts, table: &TruthTable) -> Result<f64> {
    if counts.total() == 0 {
        return Err(Error::Domain("information gain of an empty count set".into()));
    }
    if table.arity() != counts.arity() {
        return Err(Error::Shape(format!(
            "table of arity {} for counts of arity {}",
            table.arity(),
            counts.arity()
        )));
    }
    let mut rows = [(0u64, 0u64); 2];
    for p in 0..counts.patterns() {
        let r = &mut rows[table.get(p) as usize];
        r.0 += counts.c0[p];
        r.1 += counts.c1[p];
    }
    Ok(contingency_gain(rows))
}

/// Best threshold split of the patterns sorted by class-1 proportion.
///
/// Patterns are ordered by `c1 / (c0 + c1)` ascending (unseen patterns sit
/// at 1/2, ties keep pattern order). Threshold `j` maps the first `j`
/// patterns to 0 and the rest to 1. The split with the highest information
/// gain wins; equal gains prefer higher training accuracy, then the lower
/// threshold, so the tie policy never comes into play.
pub fn fit_gate_infogain(counts: &PatternCounts, _tie: TiePolicy) -> Result<TruthTable> {
    if counts.total() == 0 {
        return Err(Error::Domain("cannot fit a gate on zero examples".into()));
    }
    let size = counts.patterns();
    let ratio = |p: usize| -> (u64, u64) {
        match counts.c0[p] + counts.c1[p] {
            0 => (1, 2),
            n => (counts.c1[p], n),
        }
    };
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by(|&x, &y| {
        let ((xn, xd), (yn, yd)) = (ratio(x), ratio(y));
        ((xn as u128) * (yd as u128)).cmp(&((yn as u128) * (xd as u128)))
    });

    // Threshold 0: every pattern outputs 1.
    let mut rows = [(0u64, 0u64), (counts.total0(), counts.total1())];
    let mut best = (contingency_gain(rows), rows[1].1, 0usize);
    for (j, &p) in order.iter().enumerate() {
        rows[0].0 += counts.c0[p];
        rows[0].1 += counts.c1[p];
        rows[1].0 -= counts.c0[p];
        rows[1].1 -= counts.c1[p];
        let gain = contingency_gain(rows);
        let correct = rows[0].0 + rows[1].1;
        if gain > best.0 || (gain == best.0 && correct > best.1) {
            best = (gain, correct, j + 1);
        }
    }
    let threshold = best.2;
    let mut table = TruthTable::new(counts.arity())?;
    for &p in &order[threshold..] {
        table.set(p, true);
    }
    Ok(table)
}
