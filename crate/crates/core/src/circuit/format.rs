//! Model files and netlist export.
//!
//! Model layout (all integers little-endian):
//!
//! | bytes | field |
//! |-------|-------|
//! | 4 | magic `BGC1` |
//! | 1 | arity |
//! | 1 | depth |
//! | 4 | input width (`n_features`) |
//! | 4 | leaf count |
//! | 4 x leaves | leaf input coordinates |
//! | ceil(2^arity / 8) x gates | truth tables, breadth-first |
//! | 4 | CRC-32 of everything before it |

use std::fmt::Write as _;
use std::path::Path;

use super::{tree_shape, CircuitTree, TruthTable};
use crate::{Error, Result};

pub const MODEL_MAGIC: &[u8; 4] = b"BGC1";

pub fn serialize(tree: &CircuitTree) -> Vec<u8> {
    let mut out = Vec::with_capacity(18 + 4 * tree.leaf_count() + tree.internal_count() * 32);
    out.extend_from_slice(MODEL_MAGIC);
    out.push(tree.arity() as u8);
    out.push(tree.depth() as u8);
    out.extend_from_slice(&(tree.n_features() as u32).to_le_bytes());
    out.extend_from_slice(&(tree.leaf_count() as u32).to_le_bytes());
    for &leaf in tree.leaf_inputs() {
        out.extend_from_slice(&leaf.to_le_bytes());
    }
    for gate in tree.gates() {
        out.extend_from_slice(&gate.to_bytes());
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::format(
                self.pos as u64,
                format!("truncated while reading {what}"),
            ));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }
}

pub fn deserialize(bytes: &[u8]) -> Result<CircuitTree> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4, "magic")? != MODEL_MAGIC {
        return Err(Error::format(0, "bad magic, expected BGC1"));
    }
    let arity = r.u8("arity")? as usize;
    let depth = r.u8("depth")? as usize;
    let n_features = r.u32("input width")? as usize;
    let leaf_pos = r.pos as u64;
    let leaves = r.u32("leaf count")? as usize;
    let (internal, expected_leaves) =
        tree_shape(arity, depth).map_err(|e| Error::format(4, e.to_string()))?;
    if !(2..=crate::bitcore::MAX_ARITY).contains(&arity) {
        return Err(Error::format(4, format!("unsupported arity {arity}")));
    }
    if leaves != expected_leaves {
        return Err(Error::format(
            leaf_pos,
            format!("leaf count {leaves} does not match arity {arity}, depth {depth}"),
        ));
    }
    let mut leaf_inputs = Vec::with_capacity(leaves);
    for i in 0..leaves {
        let at = r.pos as u64;
        let x = r.u32("leaf inputs")?;
        if x as usize >= n_features {
            return Err(Error::format(
                at,
                format!("leaf {i} reads input {x} of {n_features}"),
            ));
        }
        leaf_inputs.push(x);
    }
    let table_len = (1usize << arity).div_ceil(8);
    let mut gates = Vec::with_capacity(internal);
    for _ in 0..internal {
        let at = r.pos as u64;
        let raw = r.take(table_len, "truth tables")?;
        gates.push(TruthTable::from_bytes(arity, raw).map_err(|e| Error::format(at, e.to_string()))?);
    }
    let body_end = r.pos;
    let crc = r.u32("checksum")?;
    if crc != crc32fast::hash(&bytes[..body_end]) {
        return Err(Error::format(body_end as u64, "checksum mismatch"));
    }
    if r.pos != bytes.len() {
        return Err(Error::format(r.pos as u64, "trailing bytes after checksum"));
    }
    CircuitTree::new(arity, depth, n_features, leaf_inputs, gates)
}

pub fn write_model(tree: &CircuitTree, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, serialize(tree))?;
    Ok(())
}

pub fn read_model(path: impl AsRef<Path>) -> Result<CircuitTree> {
    deserialize(&std::fs::read(path)?)
}

/// Line-oriented netlist, children before parents.
///
/// ```text
/// # boolcirc netlist v1
/// # arity 2 depth 1 inputs 10 luts 1
/// lut n0 0x8 x3 x7
/// output n0
/// ```
///
/// Each `lut` line names the gate, its table in hex (bit `p` is the output
/// for pattern `p`) and its inputs: `x<i>` for input coordinate `i`, `n<j>`
/// for gate `j`. The first listed input is the most significant bit of `p`.
pub fn export_netlist(tree: &CircuitTree) -> String {
    let mut s = String::new();
    s.push_str("# boolcirc netlist v1\n");
    writeln!(
        s,
        "# arity {} depth {} inputs {} luts {}",
        tree.arity(),
        tree.depth(),
        tree.n_features(),
        tree.internal_count()
    )
    .unwrap();
    s.push_str("# lut <id> <table> <inputs, first = most significant pattern bit>\n");
    for node in (0..tree.internal_count()).rev() {
        write!(s, "lut n{node} {}", tree.gate(node).to_hex()).unwrap();
        for c in tree.children(node) {
            if tree.is_leaf(c) {
                write!(s, " x{}", tree.leaf_inputs()[c - tree.internal_count()]).unwrap();
            } else {
                write!(s, " n{c}").unwrap();
            }
        }
        s.push('\n');
    }
    s.push_str("output n0\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CircuitTree {
        let gates = (0..5)
            .map(|i| TruthTable::from_u64(4, 0x1234 * (i + 1)).unwrap())
            .collect();
        CircuitTree::new(4, 2, 20, (0..16).collect(), gates).unwrap()
    }

    #[test]
    fn layout_is_as_documented() {
        let t = sample();
        let b = serialize(&t);
        assert_eq!(&b[..4], b"BGC1");
        assert_eq!(b[4], 4);
        assert_eq!(b[5], 2);
        assert_eq!(u32::from_le_bytes(b[6..10].try_into().unwrap()), 20);
        assert_eq!(u32::from_le_bytes(b[10..14].try_into().unwrap()), 16);
        assert_eq!(b.len(), 14 + 16 * 4 + 5 * 2 + 4);
        assert_eq!(deserialize(&b).unwrap(), t);
    }

    #[test]
    fn truncation_and_corruption_are_errors() {
        let b = serialize(&sample());
        for cut in [0, 3, 10, 20, b.len() - 1] {
            assert!(matches!(deserialize(&b[..cut]), Err(Error::Format { .. })), "cut {cut}");
        }
        let mut bad = b.clone();
        bad[0] = b'X';
        assert!(matches!(deserialize(&bad), Err(Error::Format { offset: 0, .. })));
        let mut flipped = b.clone();
        flipped[20] ^= 1;
        assert!(deserialize(&flipped).is_err());
        let mut long = b;
        long.push(0);
        assert!(deserialize(&long).is_err());
    }

    #[test]
    fn and_netlist() {
        let and = TruthTable::from_u64(2, 0b1000).unwrap();
        let t = CircuitTree::new(2, 1, 10, vec![3, 7], vec![and]).unwrap();
        let text = export_netlist(&t);
        let luts: Vec<&str> = text.lines().filter(|l| l.starts_with("lut")).collect();
        assert_eq!(luts, vec!["lut n0 0x8 x3 x7"]);
        assert!(text.ends_with("output n0\n"));
    }
}
