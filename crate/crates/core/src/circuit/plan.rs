//! Straight-line AND/OR/NOT programs that evaluate one truth table on packed
//! words.
//!
//! A `k`-input table is split into high inputs (the first `k/2`) and low
//! inputs (the rest). Partial tensor products of each half are built by
//! doubling and shared between patterns. For every high pattern `q` the
//! selected low slices are ORed together (or the unselected ones are ORed
//! and negated, whichever is shorter), ANDed with the high slice, and the
//! terms are ORed into the output. Per word this costs well under the
//! `2^k + 2^(k-1) + 1` operations of the direct tensor-product scheme.

use crate::bitcore::{tail_mask, Word};
use crate::circuit::TruthTable;
use crate::par::Exec;

/// Words processed per instruction pass; registers are this wide.
const BLOCK: usize = 32;
/// Words per parallel task.
const PAR_CHUNK: usize = BLOCK * 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Src {
    Input(u8),
    Reg(u16),
}

#[derive(Clone, Copy, Debug)]
enum Op {
    Not(Src),
    And(Src, Src),
    Or(Src, Src),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Out {
    Zero,
    Ones,
    Src(Src),
}

/// Compiled evaluation program for one gate. Instruction `i` writes
/// register `i`.
#[derive(Clone, Debug)]
pub struct GatePlan {
    arity: usize,
    ops: Vec<Op>,
    out: Out,
}

struct Builder {
    ops: Vec<Op>,
    neg: [Option<Src>; 8],
}

impl Builder {
    fn push(&mut self, op: Op) -> Src {
        self.ops.push(op);
        Src::Reg((self.ops.len() - 1) as u16)
    }

    fn literal(&mut self, input: usize, value: bool) -> Src {
        if value {
            return Src::Input(input as u8);
        }
        if let Some(s) = self.neg[input] {
            return s;
        }
        let s = self.push(Op::Not(Src::Input(input as u8)));
        self.neg[input] = Some(s);
        s
    }

    /// Product over inputs `first..first+len` for the `len`-bit pattern
    /// `q` (first input is the MSB). `memo` is indexed by `(1 << len) + q`.
    fn product(
        &mut self,
        memo: &mut [Option<Src>],
        first: usize,
        len: usize,
        q: usize,
    ) -> Src {
        let key = (1 << len) + q;
        if let Some(s) = memo[key] {
            return s;
        }
        let last = self.literal(first + len - 1, q & 1 == 1);
        let s = if len == 1 {
            last
        } else {
            let prefix = self.product(memo, first, len - 1, q >> 1);
            self.push(Op::And(prefix, last))
        };
        memo[key] = Some(s);
        s
    }

    fn or_all(&mut self, items: impl IntoIterator<Item = Src>) -> Option<Src> {
        items
            .into_iter()
            .reduce(|acc, s| self.push(Op::Or(acc, s)))
    }
}

impl GatePlan {
    pub fn compile(table: &TruthTable) -> Self {
        let k = table.arity();
        let high = k / 2;
        let low = k - high;
        let mut b = Builder {
            ops: Vec::new(),
            neg: [None; 8],
        };
        let mut high_memo = vec![None; 1 << (high + 1)];
        let mut low_memo = vec![None; 1 << (low + 1)];
        let low_size = 1usize << low;

        let mut terms = Vec::new();
        for q in 0..1usize << high {
            let selected: Vec<usize> = (0..low_size).filter(|&r| table.get(q << low | r)).collect();
            if selected.is_empty() {
                continue;
            }
            let cofactor = if selected.len() == low_size {
                None
            } else if 2 * selected.len() <= low_size {
                let slices: Vec<Src> = selected
                    .iter()
                    .map(|&r| b.product(&mut low_memo, high, low, r))
                    .collect();
                b.or_all(slices)
            } else {
                let slices: Vec<Src> = (0..low_size)
                    .filter(|r| !selected.contains(r))
                    .map(|r| b.product(&mut low_memo, high, low, r))
                    .collect();
                let rest = b.or_all(slices).expect("complement is non-empty");
                Some(b.push(Op::Not(rest)))
            };
            let prefix = (high > 0).then(|| b.product(&mut high_memo, 0, high, q));
            let term = match (prefix, cofactor) {
                (None, None) => {
                    return GatePlan {
                        arity: k,
                        ops: b.ops,
                        out: Out::Ones,
                    }
                }
                (Some(p), None) => p,
                (None, Some(c)) => c,
                (Some(p), Some(c)) => b.push(Op::And(p, c)),
            };
            terms.push(term);
        }
        let out = match b.or_all(terms) {
            Some(s) => Out::Src(s),
            None => Out::Zero,
        };
        GatePlan {
            arity: k,
            ops: b.ops,
            out,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Logic operations executed per word, excluding the tail mask.
    pub fn ops_per_word(&self) -> usize {
        self.ops.len()
    }

    /// Evaluates the plan on `inputs` (positive words of each child) into
    /// `out`, then clears padding past `n_bits`. Returns the number of word
    /// operations performed.
    pub fn run<W: Word>(&self, inputs: &[&[W]], out: &mut [W], n_bits: usize, exec: Exec) -> u64 {
        debug_assert_eq!(inputs.len(), self.arity);
        debug_assert!(inputs.iter().all(|x| x.len() == out.len()));
        let counts = exec.map_chunks_mut(out, PAR_CHUNK, |start, chunk| {
            let mut scratch = vec![W::ZERO; self.ops.len() * BLOCK];
            self.run_words(inputs, start, chunk, &mut scratch)
        });
        let mut ops: u64 = counts.into_iter().sum();
        if n_bits % W::BITS != 0 && self.out != Out::Zero {
            if let Some(last) = out.last_mut() {
                *last &= tail_mask::<W>(n_bits);
                ops += 1;
            }
        }
        ops
    }

    /// Evaluates words `start..start + out.len()` of the inputs into `out`
    /// without masking. `scratch` needs `ops_per_word() * 32` words.
    pub(crate) fn run_words<W: Word>(
        &self,
        inputs: &[&[W]],
        start: usize,
        out: &mut [W],
        scratch: &mut [W],
    ) -> u64 {
        let mut done = 0;
        let mut ops = 0u64;
        while done < out.len() {
            let len = BLOCK.min(out.len() - done);
            let base = start + done;
            for (i, op) in self.ops.iter().enumerate() {
                let (prev, cur) = scratch.split_at_mut(i * BLOCK);
                let dst = &mut cur[..len];
                let fetch = |s: Src| -> &[W] {
                    match s {
                        Src::Input(j) => &inputs[j as usize][base..base + len],
                        Src::Reg(r) => &prev[r as usize * BLOCK..r as usize * BLOCK + len],
                    }
                };
                match *op {
                    Op::Not(a) => {
                        for (d, &x) in dst.iter_mut().zip(fetch(a)) {
                            *d = !x;
                        }
                    }
                    Op::And(a, b) => {
                        for ((d, &x), &y) in dst.iter_mut().zip(fetch(a)).zip(fetch(b)) {
                            *d = x & y;
                        }
                    }
                    Op::Or(a, b) => {
                        for ((d, &x), &y) in dst.iter_mut().zip(fetch(a)).zip(fetch(b)) {
                            *d = x | y;
                        }
                    }
                }
            }
            ops += (self.ops.len() * len) as u64;
            let dst = &mut out[done..done + len];
            match self.out {
                Out::Zero => dst.fill(W::ZERO),
                Out::Ones => dst.fill(W::ONES),
                Out::Src(Src::Input(j)) => dst.copy_from_slice(&inputs[j as usize][base..base + len]),
                Out::Src(Src::Reg(r)) => {
                    let r = r as usize * BLOCK;
                    dst.copy_from_slice(&scratch[r..r + len])
                }
            }
            done += len;
        }
        ops
    }

    pub(crate) fn scratch_len(&self) -> usize {
        self.ops.len() * BLOCK
    }
}
