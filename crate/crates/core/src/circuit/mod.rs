//! Boolean circuit classifiers: full `a`-ary trees of lookup-table gates.
//!
//! Nodes are numbered breadth-first from the root. Internal node `i` has
//! children `a*i + 1 ..= a*i + a`; ids at or above
//! [`CircuitTree::internal_count`] are leaves, each wired to one input
//! coordinate.

mod format;
mod plan;

pub use format::{deserialize, export_netlist, read_model, serialize, write_model, MODEL_MAGIC};
pub use plan::GatePlan;

use std::ops::Range;

use num_bigint::BigUint;

use crate::bitcore::{tail_mask, BitDataset, BitVec, FeaturePair, Word, MAX_ARITY};
use crate::par::Exec;
use crate::{Error, Result};

/// Output bits of a `k`-input gate indexed by input pattern. Pattern `p`
/// takes input `i` from bit `k - 1 - i` of `p`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct TruthTable {
    arity: u8,
    bits: [u64; 4],
}

impl TruthTable {
    /// All-zero table.
    pub fn new(arity: usize) -> Result<Self> {
        if !(1..=MAX_ARITY).contains(&arity) {
            return Err(Error::Shape(format!(
                "gate arity {arity} outside 1..={MAX_ARITY}"
            )));
        }
        Ok(TruthTable {
            arity: arity as u8,
            bits: [0; 4],
        })
    }

    pub fn from_fn(arity: usize, f: impl Fn(usize) -> bool) -> Result<Self> {
        let mut t = Self::new(arity)?;
        for p in 0..t.len() {
            t.set(p, f(p));
        }
        Ok(t)
    }

    /// Table from its `2^k` output bits.
    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        if !bits.len().is_power_of_two() || bits.len() < 2 {
            return Err(Error::Shape(format!(
                "truth table length {} is not 2^k for k >= 1",
                bits.len()
            )));
        }
        Self::from_fn(bits.len().trailing_zeros() as usize, |p| bits[p])
    }

    /// Table whose entry `p` is bit `p` of `value` (arity at most 6).
    pub fn from_u64(arity: usize, value: u64) -> Result<Self> {
        if arity > 6 {
            return Err(Error::Shape(format!("arity {arity} does not fit in a u64")));
        }
        let mut t = Self::new(arity)?;
        let len = t.len();
        t.bits[0] = if len == 64 { value } else { value & ((1 << len) - 1) };
        Ok(t)
    }

    pub fn arity(&self) -> usize {
        self.arity as usize
    }

    /// Number of entries, `2^arity`.
    pub fn len(&self) -> usize {
        1 << self.arity
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn get(&self, p: usize) -> bool {
        debug_assert!(p < self.len());
        self.bits[p / 64] >> (p % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, p: usize, value: bool) {
        assert!(p < self.len(), "pattern {p} out of range for arity {}", self.arity);
        if value {
            self.bits[p / 64] |= 1 << (p % 64);
        } else {
            self.bits[p / 64] &= !(1 << (p % 64));
        }
    }

    pub fn count_ones(&self) -> u32 {
        self.bits.iter().map(|w| w.count_ones()).sum()
    }

    pub fn complement(&self) -> Self {
        Self::from_fn(self.arity(), |p| !self.get(p)).expect("same arity")
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len()).map(|p| self.get(p)).collect()
    }

    /// Little-endian bytes, entry `p` at bit `p % 8` of byte `p / 8`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let n = self.len().div_ceil(8);
        (0..n)
            .map(|i| (self.bits[i / 8] >> ((i % 8) * 8)) as u8)
            .map(|b| if self.len() < 8 { b & ((1 << self.len()) - 1) } else { b })
            .collect()
    }

    pub fn from_bytes(arity: usize, bytes: &[u8]) -> Result<Self> {
        let mut t = Self::new(arity)?;
        if bytes.len() != t.len().div_ceil(8) {
            return Err(Error::Shape(format!(
                "{} bytes for a table of arity {arity}",
                bytes.len()
            )));
        }
        for (i, &b) in bytes.iter().enumerate() {
            t.bits[i / 8] |= (b as u64) << ((i % 8) * 8);
        }
        if t.len() < 8 && bytes[0] >> t.len() != 0 {
            return Err(Error::Shape("truth table has bits past its length".into()));
        }
        Ok(t)
    }

    /// Hex of the integer whose bit `p` is entry `p`, e.g. `0x8` for AND.
    pub fn to_hex(&self) -> String {
        let digits = self.len().div_ceil(4);
        let mut s = String::from("0x");
        for d in (0..digits).rev() {
            let nibble = (self.bits[d / 16] >> ((d % 16) * 4)) & 0xF;
            s.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        s
    }
}

impl std::fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TruthTable({}, {})", self.arity, self.to_hex())
    }
}

/// `(internal_count, leaf_count)` of a full `arity`-ary tree of the given
/// depth.
pub fn tree_shape(arity: usize, depth: usize) -> Result<(usize, usize)> {
    if arity < 2 || depth < 1 {
        return Err(Error::Config(format!(
            "tree needs arity >= 2 and depth >= 1, got arity {arity}, depth {depth}"
        )));
    }
    let leaves = u32::try_from(depth)
        .ok()
        .and_then(|d| arity.checked_pow(d))
        .filter(|&l| l <= u32::MAX as usize)
        .ok_or_else(|| Error::Capacity(format!("{arity}^{depth} leaves")))?;
    Ok(((leaves - 1) / (arity - 1), leaves))
}

/// Number of distinct `k`-input gates, `2^(2^k)`.
pub fn gate_count_universe(arity: usize) -> Result<BigUint> {
    if !(1..=MAX_ARITY).contains(&arity) {
        return Err(Error::Shape(format!(
            "gate arity {arity} outside 1..={MAX_ARITY}"
        )));
    }
    Ok(BigUint::from(1u8) << (1usize << arity))
}

/// A full tree classifier: leaf wiring plus one truth table per gate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitTree {
    arity: usize,
    depth: usize,
    n_features: usize,
    leaf_inputs: Vec<u32>,
    gates: Vec<TruthTable>,
}

impl CircuitTree {
    pub fn new(
        arity: usize,
        depth: usize,
        n_features: usize,
        leaf_inputs: Vec<u32>,
        gates: Vec<TruthTable>,
    ) -> Result<Self> {
        let (internal, leaves) = tree_shape(arity, depth)?;
        if arity > MAX_ARITY {
            return Err(Error::Config(format!("arity {arity} exceeds {MAX_ARITY}")));
        }
        if leaf_inputs.len() != leaves {
            return Err(Error::Shape(format!(
                "{} leaf inputs for a tree with {leaves} leaves",
                leaf_inputs.len()
            )));
        }
        if gates.len() != internal {
            return Err(Error::Shape(format!(
                "{} gates for a tree with {internal} internal nodes",
                gates.len()
            )));
        }
        if let Some(g) = gates.iter().position(|t| t.arity() != arity) {
            return Err(Error::Shape(format!(
                "gate {g} has arity {}, tree arity is {arity}",
                gates[g].arity()
            )));
        }
        if let Some(leaf) = leaf_inputs.iter().position(|&x| x as usize >= n_features) {
            return Err(Error::LeafOutOfRange {
                leaf,
                input: leaf_inputs[leaf] as usize,
                n_features,
            });
        }
        Ok(CircuitTree {
            arity,
            depth,
            n_features,
            leaf_inputs,
            gates,
        })
    }

    /// Tree with the given wiring and all-zero tables.
    pub fn with_leaves(arity: usize, depth: usize, n_features: usize, leaf_inputs: Vec<u32>) -> Result<Self> {
        let (internal, _) = tree_shape(arity, depth)?;
        let gates = vec![TruthTable::new(arity)?; internal];
        Self::new(arity, depth, n_features, leaf_inputs, gates)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Input width the tree was built for.
    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn internal_count(&self) -> usize {
        self.gates.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_inputs.len()
    }

    pub fn leaf_inputs(&self) -> &[u32] {
        &self.leaf_inputs
    }

    pub fn gates(&self) -> &[TruthTable] {
        &self.gates
    }

    pub fn gate(&self, node: usize) -> &TruthTable {
        &self.gates[node]
    }

    pub fn set_gate(&mut self, node: usize, table: TruthTable) {
        assert_eq!(table.arity(), self.arity);
        self.gates[node] = table;
    }

    pub fn set_leaf_input(&mut self, leaf: usize, input: u32) {
        assert!((input as usize) < self.n_features);
        self.leaf_inputs[leaf] = input;
    }

    pub fn is_leaf(&self, node: usize) -> bool {
        node >= self.gates.len()
    }

    pub fn children(&self, node: usize) -> Range<usize> {
        let first = self.arity * node + 1;
        first..first + self.arity
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        (node > 0).then(|| (node - 1) / self.arity)
    }

    /// Node id of leaf `leaf`.
    pub fn leaf_node(&self, leaf: usize) -> usize {
        self.gates.len() + leaf
    }

    /// Gate ids at distance `level` from the root.
    pub fn level_range(&self, level: usize) -> Range<usize> {
        let start = (self.arity.pow(level as u32) - 1) / (self.arity - 1);
        start..start + self.arity.pow(level as u32)
    }

    /// Gates from the parent of `leaf` up to the root; always `depth` long.
    pub fn path_to_root(&self, leaf: usize) -> Vec<usize> {
        let mut path = Vec::with_capacity(self.depth);
        let mut node = self.leaf_node(leaf);
        while let Some(p) = self.parent(node) {
            path.push(p);
            node = p;
        }
        path
    }

    /// Checks that every leaf reads an existing coordinate.
    pub fn validate_for(&self, n_features: usize) -> Result<()> {
        match self
            .leaf_inputs
            .iter()
            .position(|&x| x as usize >= n_features)
        {
            Some(leaf) => Err(Error::LeafOutOfRange {
                leaf,
                input: self.leaf_inputs[leaf] as usize,
                n_features,
            }),
            None => Ok(()),
        }
    }
}

/// Cached output of every gate on one dataset. Only the positive half of
/// each output is stored; [`EvalCache::feature`] rebuilds the pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalCache<W: Word = u64> {
    outputs: Vec<BitVec<W>>,
}

impl<W: Word> EvalCache<W> {
    pub fn root(&self) -> &BitVec<W> {
        &self.outputs[0]
    }

    pub fn output(&self, node: usize) -> &BitVec<W> {
        &self.outputs[node]
    }

    pub fn feature(&self, node: usize) -> FeaturePair<W> {
        FeaturePair::from_positive(self.outputs[node].clone())
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    pub(crate) fn outputs_mut(&mut self) -> &mut Vec<BitVec<W>> {
        &mut self.outputs
    }

    pub(crate) fn from_outputs(outputs: Vec<BitVec<W>>) -> Self {
        EvalCache { outputs }
    }
}

/// Positive words feeding `node`: dataset features for leaf children,
/// `gate_outputs(child)` for gate children.
pub(crate) fn child_words<'a, W: Word>(
    tree: &CircuitTree,
    data: &'a BitDataset<W>,
    node: usize,
    gate_outputs: impl Fn(usize) -> &'a [W],
) -> Vec<&'a [W]> {
    tree.children(node)
        .map(|c| {
            if tree.is_leaf(c) {
                let input = tree.leaf_inputs[c - tree.internal_count()] as usize;
                data.feature(input).positive.words()
            } else {
                gate_outputs(c)
            }
        })
        .collect()
}

/// Applies a gate to its children's features.
pub fn apply_gate<W: Word>(table: &TruthTable, children: &[&FeaturePair<W>]) -> Result<FeaturePair<W>> {
    apply_gate_counted(table, children).map(|(f, _)| f)
}

/// [`apply_gate`] that also returns the number of word operations spent,
/// including the complement that produces the negative half.
pub fn apply_gate_counted<W: Word>(
    table: &TruthTable,
    children: &[&FeaturePair<W>],
) -> Result<(FeaturePair<W>, u64)> {
    if children.len() != table.arity() {
        return Err(Error::Shape(format!(
            "{} children for a gate of arity {}",
            children.len(),
            table.arity()
        )));
    }
    let n = children[0].len();
    if let Some(c) = children.iter().find(|c| c.len() != n) {
        return Err(Error::Shape(format!(
            "gate inputs of length {} and {n}",
            c.len()
        )));
    }
    let plan = GatePlan::compile(table);
    let inputs: Vec<&[W]> = children.iter().map(|c| c.positive.words()).collect();
    let mut positive = BitVec::zeros(n);
    let mut ops = plan.run(&inputs, positive.words_mut(), n, Exec::Sequential);
    let mut negative = BitVec::zeros(n);
    for (d, &p) in negative.words_mut().iter_mut().zip(positive.words()) {
        *d = !p;
    }
    ops += positive.words().len() as u64;
    if n % W::BITS != 0 {
        negative.clear_padding();
        ops += 1;
    }
    Ok((FeaturePair { positive, negative }, ops))
}

/// Evaluates every gate bottom-up, returning the root output (the
/// predictions) and the per-gate cache.
pub fn evaluate<W: Word>(tree: &CircuitTree, data: &BitDataset<W>) -> Result<(BitVec<W>, EvalCache<W>)> {
    evaluate_with(tree, data, Exec::default())
}

pub fn evaluate_with<W: Word>(
    tree: &CircuitTree,
    data: &BitDataset<W>,
    exec: Exec,
) -> Result<(BitVec<W>, EvalCache<W>)> {
    tree.validate_for(data.n_features())?;
    let n = data.n_examples();
    let mut outputs = vec![BitVec::<W>::zeros(0); tree.internal_count()];
    for level in (0..tree.depth()).rev() {
        let range = tree.level_range(level);
        let (upper, lower) = outputs.split_at_mut(range.end);
        let lower: &[BitVec<W>] = lower;
        let offset = range.end;
        exec.for_each_mut(&mut upper[range.clone()], |i, slot| {
            let node = range.start + i;
            let inputs = child_words(tree, data, node, |c| lower[c - offset].words());
            *slot = run_gate(tree.gate(node), &inputs, n, Exec::Sequential);
        });
    }
    let cache = EvalCache::from_outputs(outputs);
    Ok((cache.root().clone(), cache))
}

pub(crate) fn run_gate<W: Word>(table: &TruthTable, inputs: &[&[W]], n: usize, exec: Exec) -> BitVec<W> {
    let mut out = BitVec::zeros(n);
    GatePlan::compile(table).run(inputs, out.words_mut(), n, exec);
    out
}

/// Recomputes `node` from the cached outputs of its children.
pub fn recompute_node<W: Word>(
    tree: &CircuitTree,
    data: &BitDataset<W>,
    cache: &EvalCache<W>,
    node: usize,
) -> BitVec<W> {
    let inputs = child_words(tree, data, node, |c| cache.output(c).words());
    run_gate(tree.gate(node), &inputs, data.n_examples(), Exec::Sequential)
}

/// Root output only, without keeping every gate's output in memory.
pub fn predict<W: Word>(tree: &CircuitTree, data: &BitDataset<W>) -> Result<BitVec<W>> {
    predict_with(tree, data, Exec::default())
}

pub fn predict_with<W: Word>(tree: &CircuitTree, data: &BitDataset<W>, exec: Exec) -> Result<BitVec<W>> {
    tree.validate_for(data.n_features())?;
    let n = data.n_examples();
    let n_words = data.n_words();
    // Large-arity plans are big, so they are compiled per visit instead of
    // being held for the whole tree.
    let plans: Option<Vec<GatePlan>> =
        (tree.arity() <= 6).then(|| tree.gates().iter().map(GatePlan::compile).collect());
    let threads = if exec.is_parallel() { available_threads() } else { 1 };
    let chunk = (n_words / (4 * threads)).clamp(64, 4096);

    let mut predictions = BitVec::zeros(n);
    exec.map_chunks_mut(predictions.words_mut(), chunk, |start, out| {
        let words = eval_subtree(tree, data, plans.as_deref(), 0, start, out.len());
        out.copy_from_slice(&words);
    });
    if let Some(last) = predictions.words_mut().last_mut() {
        *last &= tail_mask::<W>(n);
    }
    Ok(predictions)
}

fn available_threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// Depth-first evaluation of `node` on words `start..start + len`.
fn eval_subtree<W: Word>(
    tree: &CircuitTree,
    data: &BitDataset<W>,
    plans: Option<&[GatePlan]>,
    node: usize,
    start: usize,
    len: usize,
) -> Vec<W> {
    let owned: Vec<Option<Vec<W>>> = tree
        .children(node)
        .map(|c| (!tree.is_leaf(c)).then(|| eval_subtree(tree, data, plans, c, start, len)))
        .collect();
    let inputs: Vec<&[W]> = tree
        .children(node)
        .zip(&owned)
        .map(|(c, o)| match o {
            Some(v) => v.as_slice(),
            None => {
                let input = tree.leaf_inputs[c - tree.internal_count()] as usize;
                &data.feature(input).positive.words()[start..start + len]
            }
        })
        .collect();
    let compiled;
    let plan = match plans {
        Some(p) => &p[node],
        None => {
            compiled = GatePlan::compile(tree.gate(node));
            &compiled
        }
    };
    let mut out = vec![W::ZERO; len];
    let mut scratch = vec![W::ZERO; plan.scratch_len()];
    plan.run_words(&inputs, 0, &mut out, &mut scratch);
    out
}
