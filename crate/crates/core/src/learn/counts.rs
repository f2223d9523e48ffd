use crate::bitcore::{tail_mask, BitVec, FeaturePair, Word, MAX_ARITY};
use crate::par::Exec;
use crate::{Error, Result};

/// Words per parallel counting task.
const COUNT_CHUNK: usize = 2048;

/// Per-pattern class counts at a gate's inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternCounts {
    arity: usize,
    /// Class-0 examples per pattern.
    pub c0: Vec<u64>,
    /// Class-1 examples per pattern.
    pub c1: Vec<u64>,
}

impl PatternCounts {
    pub fn new(arity: usize, c0: Vec<u64>, c1: Vec<u64>) -> Result<Self> {
        if !(1..=MAX_ARITY).contains(&arity) {
            return Err(Error::Shape(format!("arity {arity} outside 1..={MAX_ARITY}")));
        }
        if c0.len() != 1 << arity || c1.len() != 1 << arity {
            return Err(Error::Shape(format!(
                "count vectors of length {} and {} for arity {arity}",
                c0.len(),
                c1.len()
            )));
        }
        Ok(PatternCounts { arity, c0, c1 })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn patterns(&self) -> usize {
        1 << self.arity
    }

    pub fn total0(&self) -> u64 {
        self.c0.iter().sum()
    }

    pub fn total1(&self) -> u64 {
        self.c1.iter().sum()
    }

    pub fn total(&self) -> u64 {
        self.total0() + self.total1()
    }
}

/// Counts, for each input pattern of the children, how many examples of
/// each class produce it.
pub fn gather_pattern_counts<W: Word>(
    children: &[&FeaturePair<W>],
    labels: &BitVec<W>,
) -> Result<PatternCounts> {
    if children.is_empty() || children.len() > MAX_ARITY {
        return Err(Error::Shape(format!(
            "{} children outside 1..={MAX_ARITY}",
            children.len()
        )));
    }
    if let Some(c) = children.iter().find(|c| c.len() != labels.len()) {
        return Err(Error::Shape(format!(
            "child of length {} with {} labels",
            c.len(),
            labels.len()
        )));
    }
    let inputs: Vec<&[W]> = children.iter().map(|c| c.positive.words()).collect();
    Ok(count_patterns(&inputs, labels.words(), labels.len(), Exec::Sequential))
}

/// Fused tensor-product counting: slices are built one word at a time in
/// registers and never materialized.
pub(crate) fn count_patterns<W: Word>(
    inputs: &[&[W]],
    labels: &[W],
    n_bits: usize,
    exec: Exec,
) -> PatternCounts {
    let k = inputs.len();
    let n_words = labels.len();
    let n_chunks = n_words.div_ceil(COUNT_CHUNK).max(1);
    let partials = exec.map_range(0..n_chunks, |c| {
        let words = c * COUNT_CHUNK..((c + 1) * COUNT_CHUNK).min(n_words);
        count_words(inputs, labels, n_bits, words)
    });
    let mut total = vec![0u64; 1 << k];
    let mut c1 = vec![0u64; 1 << k];
    for (t, o) in partials {
        total.iter_mut().zip(&t).for_each(|(a, b)| *a += b);
        c1.iter_mut().zip(&o).for_each(|(a, b)| *a += b);
    }
    let c0 = total.iter().zip(&c1).map(|(t, o)| t - o).collect();
    PatternCounts { arity: k, c0, c1 }
}

fn count_words<W: Word>(
    inputs: &[&[W]],
    labels: &[W],
    n_bits: usize,
    words: std::ops::Range<usize>,
) -> (Vec<u64>, Vec<u64>) {
    let k = inputs.len();
    let size = 1usize << k;
    let mut total = vec![0u64; size];
    let mut ones = vec![0u64; size];
    let mut s = [W::ZERO; 1 << MAX_ARITY];
    let last = labels.len() - 1;
    for w in words {
        s[0] = if w == last { tail_mask::<W>(n_bits) } else { W::ONES };
        let mut len = 1;
        for x in inputs {
            let xv = x[w];
            for q in (0..len).rev() {
                let v = s[q];
                s[2 * q + 1] = v & xv;
                s[2 * q] = v & !xv;
            }
            len *= 2;
        }
        let y = labels[w];
        for p in 0..size {
            total[p] += s[p].count_ones() as u64;
            ones[p] += (s[p] & y).count_ones() as u64;
        }
    }
    (total, ones)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitcore::{count_per_slice, tensor_product};

    fn fp(bits: &[bool]) -> FeaturePair {
        FeaturePair::from_positive(BitVec::from_bools(bits))
    }

    #[test]
    fn all_zero_labels() {
        let x = fp(&[true, false, true, true, false]);
        let y = fp(&[false, false, true, true, true]);
        let c = gather_pattern_counts(&[&x, &y], &BitVec::zeros(5)).unwrap();
        assert!(c.c1.iter().all(|&v| v == 0));
        assert_eq!(c.total0(), 5);
    }

    #[test]
    fn hand_tally_two_inputs() {
        // (x, y, label) per example
        let ex = [(0, 0, 1), (0, 1, 0), (1, 1, 1), (1, 1, 1), (0, 1, 1)];
        let x = fp(&ex.map(|e| e.0 == 1));
        let y = fp(&ex.map(|e| e.1 == 1));
        let labels = BitVec::from_bools(&ex.map(|e| e.2 == 1));
        let c = gather_pattern_counts(&[&x, &y], &labels).unwrap();
        assert_eq!(c.c0, vec![0, 1, 0, 0]);
        assert_eq!(c.c1, vec![1, 1, 0, 2]);
    }

    #[test]
    fn agrees_with_materialized_slices() {
        let n = 300;
        let bits = |m: usize| (0..n).map(|i| (i * 7919 + m * 104729) % 11 < 5).collect::<Vec<_>>();
        let feats: Vec<FeaturePair> = (0..4).map(|m| fp(&bits(m))).collect();
        let refs: Vec<&FeaturePair> = feats.iter().collect();
        let labels = BitVec::from_bools(&bits(9));
        let c = gather_pattern_counts(&refs, &labels).unwrap();
        let slices = tensor_product(&refs).unwrap();
        assert_eq!(c.c1, count_per_slice(&slices, &labels).unwrap());
        assert_eq!(c.c0, count_per_slice(&slices, &labels.not()).unwrap());
    }

    #[test]
    fn shape_errors() {
        let x = fp(&[true; 4]);
        assert!(gather_pattern_counts(&[&x], &BitVec::zeros(5)).is_err());
        assert!(gather_pattern_counts::<u64>(&[], &BitVec::zeros(5)).is_err());
        assert!(PatternCounts::new(2, vec![0; 4], vec![0; 3]).is_err());
    }
}
