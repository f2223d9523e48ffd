//! Dataset generators and loaders.
//!
//! Everything is first produced as [`LabeledRows`] (row-major examples plus
//! labels) so it can be pooled, shuffled and split before being transposed
//! into a [`BitDataset`].

mod amat;
mod cifar;
mod idx;
mod synth;

pub use amat::{load_amat, read_amat};
pub use cifar::{load_cifar10, parse_cifar_batch, CIFAR_AUTOMOBILE, CIFAR_BIRD, CIFAR_RECORDS_PER_BATCH, CIFAR_RECORD_LEN};
pub use idx::{load_idx, parse_idx_images, parse_idx_labels, read_idx, IdxImages};
pub use synth::{
    gauss_integers, gen_cubes, gen_cubes_rows, gen_gauss, gen_gauss_rows, render_cubes, CubesLayout, CubesSpec,
    GaussSpec, Square,
};

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bitcore::{BitDataset, BitRows, Word};
use crate::{Error, Result};

/// Examples in row-major form with their class labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledRows {
    pub rows: BitRows,
    pub labels: Vec<bool>,
}

impl LabeledRows {
    pub fn new(rows: BitRows, labels: Vec<bool>) -> Result<Self> {
        if rows.n_rows() != labels.len() {
            return Err(Error::Shape(format!(
                "{} rows but {} labels",
                rows.n_rows(),
                labels.len()
            )));
        }
        Ok(LabeledRows { rows, labels })
    }

    pub fn empty(width: usize) -> Self {
        LabeledRows {
            rows: BitRows::new(width),
            labels: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn width(&self) -> usize {
        self.rows.width()
    }

    pub fn push(&mut self, row: &[bool], label: bool) -> Result<()> {
        self.rows.push_row(row)?;
        self.labels.push(label);
        Ok(())
    }

    pub fn append(&mut self, other: &LabeledRows) -> Result<()> {
        self.rows.append(&other.rows)?;
        self.labels.extend_from_slice(&other.labels);
        Ok(())
    }

    pub fn select(&self, indices: &[usize]) -> Self {
        LabeledRows {
            rows: self.rows.select(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// First `n` examples.
    pub fn head(&self, n: usize) -> Self {
        self.select(&(0..n.min(self.len())).collect::<Vec<_>>())
    }

    /// Shuffles with `seed` and returns disjoint subsets of `first` and
    /// `second` examples.
    pub fn shuffled_split(&self, seed: u64, first: usize, second: usize) -> Result<(Self, Self)> {
        if first + second > self.len() {
            return Err(Error::Config(format!(
                "requested {first} + {second} examples from a pool of {}",
                self.len()
            )));
        }
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        Ok((
            self.select(&order[..first]),
            self.select(&order[first..first + second]),
        ))
    }

    pub fn to_dataset<W: Word>(&self) -> Result<BitDataset<W>> {
        BitDataset::from_rows(&self.rows, &self.labels)
    }
}

/// Bit depth of quantized channel values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuantizeSpec {
    bits: usize,
    channels: usize,
}

impl QuantizeSpec {
    pub fn new(bits: usize, channels: usize) -> Result<Self> {
        if !(1..=8).contains(&bits) {
            return Err(Error::Config(format!("bits per channel {bits} outside 1..=8")));
        }
        if channels == 0 {
            return Err(Error::Config("channel count must be positive".into()));
        }
        Ok(QuantizeSpec { bits, channels })
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn channels(&self) -> usize {
        self.channels
    }
}

/// Keeps the `spec.bits()` most significant bits of every value, MSB first.
pub fn quantize_msb(values: &[u8], spec: QuantizeSpec) -> Vec<bool> {
    let k = spec.bits;
    let mut out = Vec::with_capacity(values.len() * k);
    for &v in values {
        for b in 0..k {
            out.push(v >> (7 - b) & 1 == 1);
        }
    }
    out
}

/// Independent seed for stream `stream` of an experiment seeded with `seed`
/// (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Text dump: a `bgd <examples> <features>` header, then one line per
/// example holding the label, a space, and the features as hex (feature
/// `4i` is the high bit of digit `i`; the last digit is zero-padded).
pub fn write_bgd(data: &LabeledRows) -> String {
    let width = data.width();
    let mut s = String::new();
    writeln!(s, "bgd {} {}", data.len(), width).unwrap();
    for (j, &label) in data.labels.iter().enumerate() {
        s.push(if label { '1' } else { '0' });
        s.push(' ');
        for d in 0..width.div_ceil(4) {
            let mut nibble = 0u32;
            for b in 0..4 {
                let col = 4 * d + b;
                if col < width && data.rows.get(j, col) {
                    nibble |= 8 >> b;
                }
            }
            s.push(char::from_digit(nibble, 16).unwrap());
        }
        s.push('\n');
    }
    s
}

pub fn read_bgd(text: &str) -> Result<LabeledRows> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "missing bgd header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (count, width) = match fields.as_slice() {
        ["bgd", n, m] => (
            n.parse::<usize>().map_err(|e| Error::parse(1, e.to_string()))?,
            m.parse::<usize>().map_err(|e| Error::parse(1, e.to_string()))?,
        ),
        _ => return Err(Error::parse(1, "expected `bgd <examples> <features>`")),
    };
    let mut out = LabeledRows::empty(width);
    let mut row = vec![false; width];
    for (i, line) in lines {
        let line_no = i + 1;
        let (label, hex) = line
            .trim()
            .split_once(' ')
            .unwrap_or((line.trim(), ""));
        let label = match label {
            "0" => false,
            "1" => true,
            other => return Err(Error::parse(line_no, format!("label {other:?} is not 0 or 1"))),
        };
        if hex.len() != width.div_ceil(4) {
            return Err(Error::parse(
                line_no,
                format!("{} hex digits for {width} features", hex.len()),
            ));
        }
        for (d, ch) in hex.chars().enumerate() {
            let nibble = ch
                .to_digit(16)
                .ok_or_else(|| Error::parse(line_no, format!("bad hex digit {ch:?}")))?;
            for b in 0..4 {
                let col = 4 * d + b;
                if col < width {
                    row[col] = nibble & (8 >> b) != 0;
                }
            }
        }
        out.push(&row, label)?;
    }
    if out.len() != count {
        return Err(Error::parse(
            text.lines().count(),
            format!("header announces {count} examples, found {}", out.len()),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn msb_quantization() {
        let q = |v: u8, k: usize| quantize_msb(&[v], QuantizeSpec::new(k, 1).unwrap());
        assert_eq!(q(255, 2), [true, true]);
        assert_eq!(q(130, 1), [true]);
        assert_eq!(q(0b0110_0000, 3), [false, true, true]);
        assert!(QuantizeSpec::new(0, 1).is_err());
        assert!(QuantizeSpec::new(9, 1).is_err());
    }

    #[test]
    fn bgd_round_trip() {
        let mut d = LabeledRows::empty(6);
        d.push(&[true, false, false, true, true, true], true).unwrap();
        d.push(&[false; 6], false).unwrap();
        let text = write_bgd(&d);
        assert_eq!(text, "bgd 2 6\n1 9c\n0 00\n");
        assert_eq!(read_bgd(&text).unwrap(), d);
        assert!(read_bgd("bgd 3 6\n1 9c\n").is_err());
        assert!(matches!(read_bgd("bgd 1 6\n2 9c\n"), Err(Error::Parse { line: 2, .. })));
        assert!(read_bgd("bgd 1 6\n1 9x\n").is_err());
    }

    #[test]
    fn split_is_disjoint_and_seeded() {
        let mut d = LabeledRows::empty(8);
        for i in 0..20u8 {
            let row: Vec<bool> = (0..8).map(|b| i >> b & 1 == 1).collect();
            d.push(&row, i % 3 == 0).unwrap();
        }
        let (a, b) = d.shuffled_split(4, 12, 8).unwrap();
        let (a2, _) = d.shuffled_split(4, 12, 8).unwrap();
        assert_eq!(a, a2);
        let mut all: Vec<Vec<bool>> = (0..12).map(|i| a.rows.row(i)).chain((0..8).map(|i| b.rows.row(i))).collect();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 20);
        assert!(d.shuffled_split(0, 15, 6).is_err());
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(0, 1), derive_seed(0, 2));
        assert_ne!(derive_seed(1, 1), derive_seed(0, 1));
        assert_eq!(derive_seed(7, 3), derive_seed(7, 3));
    }
}
