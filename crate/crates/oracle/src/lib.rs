//! Naive reference implementations used as test oracles.
//!
//! Everything here works one example at a time on plain `bool` data, with
//! no packing, no shared code and no attempt at speed.

use std::collections::HashMap;

/// Number of internal gates of a complete `arity`-ary tree of `depth`.
pub fn internal_count(arity: usize, depth: usize) -> usize {
    (0..depth).map(|l| arity.pow(l as u32)).sum()
}

/// Pattern index of gate inputs, first input most significant.
pub fn pattern_of(bits: &[bool]) -> usize {
    bits.iter().fold(0, |p, &b| p << 1 | b as usize)
}

/// Tree of truth tables in breadth-first order; node `i` has children
/// `arity*i + 1 ..= arity*i + arity`, and nodes past the internal gates are
/// leaves reading `leaves[node - internal]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaiveTree {
    pub arity: usize,
    pub depth: usize,
    pub leaves: Vec<usize>,
    pub tables: Vec<Vec<bool>>,
}

impl NaiveTree {
    pub fn eval(&self, x: &[bool]) -> bool {
        self.eval_node(0, x)
    }

    pub fn eval_node(&self, node: usize, x: &[bool]) -> bool {
        let internal = self.tables.len();
        if node >= internal {
            return x[self.leaves[node - internal]];
        }
        let inputs: Vec<bool> = (1..=self.arity)
            .map(|c| self.eval_node(self.arity * node + c, x))
            .collect();
        self.tables[node][pattern_of(&inputs)]
    }

    pub fn predict(&self, rows: &[Vec<bool>]) -> Vec<bool> {
        rows.iter().map(|x| self.eval(x)).collect()
    }
}

pub fn transpose(rows: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let width = rows.first().map_or(0, Vec::len);
    (0..width)
        .map(|c| rows.iter().map(|r| r[c]).collect())
        .collect()
}

/// `slices[p][j]` is true iff example `j` produces pattern `p` on `columns`.
pub fn one_hot_slices(columns: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let k = columns.len();
    let n = columns.first().map_or(0, Vec::len);
    let mut slices = vec![vec![false; n]; 1 << k];
    for j in 0..n {
        let bits: Vec<bool> = columns.iter().map(|c| c[j]).collect();
        slices[pattern_of(&bits)][j] = true;
    }
    slices
}

/// Per-pattern class counts `(c0, c1)`.
pub fn tally(columns: &[Vec<bool>], labels: &[bool]) -> (Vec<u64>, Vec<u64>) {
    let k = columns.len();
    let mut c0 = vec![0; 1 << k];
    let mut c1 = vec![0; 1 << k];
    for (j, &y) in labels.iter().enumerate() {
        let bits: Vec<bool> = columns.iter().map(|c| c[j]).collect();
        let p = pattern_of(&bits);
        if y {
            c1[p] += 1;
        } else {
            c0[p] += 1;
        }
    }
    (c0, c1)
}

/// Every truth table over `patterns` entries, entry `p` taken from bit `p`
/// of the enumeration index.
pub fn all_tables(patterns: usize) -> impl Iterator<Item = Vec<bool>> {
    assert!(patterns <= 16, "too many tables to enumerate");
    (0u64..1 << patterns).map(move |t| (0..patterns).map(|p| t >> p & 1 == 1).collect())
}

pub fn correct(c0: &[u64], c1: &[u64], table: &[bool]) -> u64 {
    table
        .iter()
        .enumerate()
        .map(|(p, &out)| if out { c1[p] } else { c0[p] })
        .sum()
}

fn entropy(a: u64, b: u64) -> f64 {
    let n = (a + b) as f64;
    let h = |c: u64| {
        if c == 0 {
            0.0
        } else {
            let q = c as f64 / n;
            -q * q.log2()
        }
    };
    h(a) + h(b)
}

/// `H(label) - H(label | output)` in bits for the split induced by `table`.
pub fn mutual_information(c0: &[u64], c1: &[u64], table: &[bool]) -> f64 {
    let (mut z0, mut z1, mut o0, mut o1) = (0u64, 0u64, 0u64, 0u64);
    for (p, &out) in table.iter().enumerate() {
        if out {
            o0 += c0[p];
            o1 += c1[p];
        } else {
            z0 += c0[p];
            z1 += c1[p];
        }
    }
    let n = (z0 + z1 + o0 + o1) as f64;
    let mut conditional = 0.0;
    if z0 + z1 > 0 {
        conditional += (z0 + z1) as f64 / n * entropy(z0, z1);
    }
    if o0 + o1 > 0 {
        conditional += (o0 + o1) as f64 / n * entropy(o0, o1);
    }
    entropy(z0 + o0, z1 + o1) - conditional
}

pub fn best_correct(c0: &[u64], c1: &[u64]) -> u64 {
    all_tables(c0.len()).map(|t| correct(c0, c1, &t)).max().unwrap()
}

pub fn best_information(c0: &[u64], c1: &[u64]) -> f64 {
    all_tables(c0.len())
        .map(|t| mutual_information(c0, c1, &t))
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn misclassified(pred: &[bool], labels: &[bool]) -> usize {
    pred.iter().zip(labels).filter(|(p, y)| p != y).count()
}

/// Parses a hex truth table: entry `p` is bit `p` of the number.
pub fn parse_hex_table(hex: &str, patterns: usize) -> Result<Vec<bool>, String> {
    let digits = hex.strip_prefix("0x").ok_or("table without 0x prefix")?;
    let mut bits = Vec::new();
    for ch in digits.chars().rev() {
        let v = ch.to_digit(16).ok_or_else(|| format!("bad hex digit {ch:?}"))?;
        bits.extend((0..4).map(|b| v >> b & 1 == 1));
    }
    if bits.len() < patterns || bits[patterns..].iter().any(|&b| b) {
        return Err(format!("table {hex} does not fit {patterns} entries"));
    }
    bits.truncate(patterns);
    Ok(bits)
}

#[derive(Clone, Debug)]
enum Source {
    Input(usize),
    Lut(String),
}

/// Look-up-table netlist: `lut <name> <hex> <inputs...>` lines, inputs named
/// `x<coord>` or another lut, and a final `output <name>`.
#[derive(Clone, Debug)]
pub struct Netlist {
    luts: HashMap<String, (Vec<bool>, Vec<Source>)>,
    output: String,
}

impl Netlist {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut luts = HashMap::new();
        let mut output = None;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                ["lut", name, hex, inputs @ ..] => {
                    let sources = inputs
                        .iter()
                        .map(|s| match s.strip_prefix('x') {
                            Some(c) => c.parse().map(Source::Input).map_err(|e| format!("{s}: {e}")),
                            None => Ok(Source::Lut(s.to_string())),
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    let table = parse_hex_table(hex, 1 << sources.len())?;
                    luts.insert(name.to_string(), (table, sources));
                }
                ["output", name] => output = Some(name.to_string()),
                _ => return Err(format!("unrecognized line {line:?}")),
            }
        }
        let output = output.ok_or("missing output line")?;
        if !luts.contains_key(&output) {
            return Err(format!("output {output} is not a lut"));
        }
        Ok(Netlist { luts, output })
    }

    pub fn eval(&self, x: &[bool]) -> bool {
        self.eval_lut(&self.output, x)
    }

    fn eval_lut(&self, name: &str, x: &[bool]) -> bool {
        let (table, sources) = &self.luts[name];
        let inputs: Vec<bool> = sources
            .iter()
            .map(|s| match s {
                Source::Input(c) => x[*c],
                Source::Lut(n) => self.eval_lut(n, x),
            })
            .collect();
        table[pattern_of(&inputs)]
    }
}
