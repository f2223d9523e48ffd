//! Packed binary vectors and the word-parallel primitives everything else is
//! built on.
//!
//! A dataset of `n` examples with `m` binary features is stored transposed:
//! one [`BitVec`] of `n` bits per feature, so bit `j` of feature `i` is the
//! value of feature `i` on example `j`. Bits past `n` in the last word are
//! always zero.

use std::fmt;
use std::ops::{BitAnd, BitAndAssign, BitOr, BitOrAssign, BitXor, Not};

use crate::{Error, Result};

/// Largest supported gate arity; a truth table then has 256 entries.
pub const MAX_ARITY: usize = 8;

/// Machine word used for packing. Implemented for `u32` and `u64`.
pub trait Word:
    Copy
    + Eq
    + Default
    + Send
    + Sync
    + fmt::Debug
    + 'static
    + BitAnd<Output = Self>
    + BitOr<Output = Self>
    + BitXor<Output = Self>
    + Not<Output = Self>
    + BitAndAssign
    + BitOrAssign
{
    const BITS: usize;
    const ZERO: Self;
    const ONES: Self;

    fn count_ones(self) -> u32;
    fn trailing_zeros(self) -> u32;
    /// Word with only bit `i` set.
    fn bit(i: usize) -> Self;
    /// Word with the low `n` bits set; `n == BITS` gives all ones.
    fn low_mask(n: usize) -> Self;
}

macro_rules! impl_word {
    ($t:ty) => {
        impl Word for $t {
            const BITS: usize = <$t>::BITS as usize;
            const ZERO: Self = 0;
            const ONES: Self = <$t>::MAX;

            #[inline(always)]
            fn count_ones(self) -> u32 {
                <$t>::count_ones(self)
            }

            #[inline(always)]
            fn trailing_zeros(self) -> u32 {
                <$t>::trailing_zeros(self)
            }

            #[inline(always)]
            fn bit(i: usize) -> Self {
                1 << i
            }

            #[inline(always)]
            fn low_mask(n: usize) -> Self {
                if n >= <Self as Word>::BITS {
                    Self::ONES
                } else {
                    ((1 as $t) << n) - 1
                }
            }
        }
    };
}

impl_word!(u32);
impl_word!(u64);

/// Number of words needed to hold `bits` bits.
#[inline]
pub fn words_for<W: Word>(bits: usize) -> usize {
    bits.div_ceil(W::BITS)
}

/// Mask of the valid bits in the last word of a `len`-bit vector.
#[inline]
pub fn tail_mask<W: Word>(len: usize) -> W {
    match len % W::BITS {
        0 => W::ONES,
        r => W::low_mask(r),
    }
}

/// Fixed-length packed bit vector with zeroed padding.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec<W: Word = u64> {
    len: usize,
    words: Vec<W>,
}

impl<W: Word> Default for BitVec<W> {
    fn default() -> Self {
        BitVec { len: 0, words: Vec::new() }
    }
}

impl<W: Word> BitVec<W> {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![W::ZERO; words_for::<W>(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = BitVec {
            len,
            words: vec![W::ONES; words_for::<W>(len)],
        };
        v.clear_padding();
        v
    }

    /// Wraps raw words, zeroing any padding bits.
    pub fn from_words(len: usize, mut words: Vec<W>) -> Result<Self> {
        if words.len() != words_for::<W>(len) {
            return Err(Error::Shape(format!(
                "{} words cannot hold exactly {len} bits",
                words.len()
            )));
        }
        if let Some(last) = words.last_mut() {
            *last &= tail_mask::<W>(len);
        }
        Ok(BitVec { len, words })
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
            v.words[i / W::BITS] |= W::bit(i % W::BITS);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[W] {
        &self.words
    }

    /// Mutable word access. Callers must leave padding bits zero (see
    /// [`BitVec::clear_padding`]).
    pub fn words_mut(&mut self) -> &mut [W] {
        &mut self.words
    }

    pub fn clear_padding(&mut self) {
        let mask = tail_mask::<W>(self.len);
        if let Some(last) = self.words.last_mut() {
            *last &= mask;
        }
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.words[i / W::BITS] & W::bit(i % W::BITS) != W::ZERO
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let (w, b) = (i / W::BITS, W::bit(i % W::BITS));
        if value {
            self.words[w] |= b;
        } else {
            self.words[w] &= !b;
        }
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    /// Indices of the set bits, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == W::ZERO {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= !W::bit(b);
                Some(wi * W::BITS + b)
            })
        })
    }

    /// Complement on the first `len` bits.
    pub fn not(&self) -> Self {
        let mut out = BitVec {
            len: self.len,
            words: self.words.iter().map(|&w| !w).collect(),
        };
        out.clear_padding();
        out
    }

    fn zip_with(&self, other: &Self, f: impl Fn(W, W) -> W) -> Result<Self> {
        self.check_len(other)?;
        Ok(BitVec {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn and(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn or(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a ^ b)
    }

    /// `popcount(self XOR other)`.
    pub fn hamming(&self, other: &Self) -> Result<u64> {
        self.check_len(other)?;
        Ok(xor_popcount(&self.words, &other.words))
    }

    pub fn check_len(&self, other: &Self) -> Result<()> {
        if self.len != other.len {
            return Err(Error::Shape(format!(
                "bit vectors of length {} and {}",
                self.len, other.len
            )));
        }
        Ok(())
    }
}

impl<W: Word> fmt::Debug for BitVec<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec[{}](", self.len)?;
        for i in 0..self.len.min(128) {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        if self.len > 128 {
            f.write_str("...")?;
        }
        f.write_str(")")
    }
}

#[inline]
pub(crate) fn xor_popcount<W: Word>(a: &[W], b: &[W]) -> u64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x ^ y).count_ones() as u64)
        .sum()
}

/// A binary feature over all examples and its precomputed complement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeaturePair<W: Word = u64> {
    pub positive: BitVec<W>,
    pub negative: BitVec<W>,
}

impl<W: Word> FeaturePair<W> {
    pub fn from_positive(positive: BitVec<W>) -> Self {
        let negative = positive.not();
        FeaturePair { positive, negative }
    }

    pub fn len(&self) -> usize {
        self.positive.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positive.is_empty()
    }

    /// Swaps the two halves, i.e. the pair of the negated feature.
    pub fn negated(&self) -> Self {
        FeaturePair {
            positive: self.negative.clone(),
            negative: self.positive.clone(),
        }
    }

    /// Checks disjointness, cover and zero padding.
    pub fn is_consistent(&self) -> bool {
        let n = self.len();
        if self.negative.len() != n {
            return false;
        }
        let mask = tail_mask::<W>(n);
        let last = self.positive.words.len().saturating_sub(1);
        self.positive
            .words
            .iter()
            .zip(&self.negative.words)
            .enumerate()
            .all(|(i, (&p, &q))| {
                let valid = if i == last { mask } else { W::ONES };
                p & q == W::ZERO && (p | q) == valid && (p | q) & !valid == W::ZERO
            })
    }
}

/// Row-major bit matrix: the natural layout of raw examples before
/// transposition. Rows are packed into `u64` words regardless of the word
/// size later used for the transposed data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitRows {
    width: usize,
    row_words: usize,
    n_rows: usize,
    data: Vec<u64>,
}

impl BitRows {
    pub fn new(width: usize) -> Self {
        BitRows {
            width,
            row_words: width.div_ceil(64),
            n_rows: 0,
            data: Vec::new(),
        }
    }

    pub fn with_capacity(width: usize, rows: usize) -> Self {
        let mut r = Self::new(width);
        r.data.reserve(rows * r.row_words);
        r
    }

    pub fn from_bool_rows<R: AsRef<[bool]>>(rows: &[R]) -> Result<Self> {
        let width = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut out = Self::with_capacity(width, rows.len());
        for row in rows {
            out.push_row(row.as_ref())?;
        }
        Ok(out)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn push_row(&mut self, bits: &[bool]) -> Result<()> {
        if bits.len() != self.width {
            return Err(Error::Shape(format!(
                "row {} has width {}, expected {}",
                self.n_rows,
                bits.len(),
                self.width
            )));
        }
        let start = self.data.len();
        self.data.resize(start + self.row_words, 0);
        for (i, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
            self.data[start + i / 64] |= 1 << (i % 64);
        }
        self.n_rows += 1;
        Ok(())
    }

    /// Appends a row given as packed little-endian `u64` words.
    pub fn push_packed(&mut self, words: &[u64]) -> Result<()> {
        if words.len() != self.row_words {
            return Err(Error::Shape(format!(
                "packed row has {} words, expected {}",
                words.len(),
                self.row_words
            )));
        }
        self.data.extend_from_slice(words);
        if let (Some(last), r) = (self.data.last_mut(), self.width % 64) {
            if r != 0 {
                *last &= (1u64 << r) - 1;
            }
        }
        self.n_rows += 1;
        Ok(())
    }

    pub fn row_words(&self, row: usize) -> &[u64] {
        &self.data[row * self.row_words..(row + 1) * self.row_words]
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        assert!(row < self.n_rows && col < self.width);
        self.row_words(row)[col / 64] >> (col % 64) & 1 == 1
    }

    pub fn row(&self, row: usize) -> Vec<bool> {
        (0..self.width).map(|c| self.get(row, c)).collect()
    }

    /// New matrix holding the given rows, in the given order.
    pub fn select(&self, rows: &[usize]) -> Self {
        let mut out = Self::with_capacity(self.width, rows.len());
        for &r in rows {
            out.data.extend_from_slice(self.row_words(r));
            out.n_rows += 1;
        }
        out
    }

    pub fn append(&mut self, other: &BitRows) -> Result<()> {
        if other.width != self.width {
            return Err(Error::Shape(format!(
                "cannot append rows of width {} to width {}",
                other.width, self.width
            )));
        }
        self.data.extend_from_slice(&other.data);
        self.n_rows += other.n_rows;
        Ok(())
    }
}

/// Transposes row-major examples into feature-major [`FeaturePair`]s.
///
/// Bit `j` of feature `i` equals bit `i` of row `j`.
pub fn pack_and_transpose<W: Word>(rows: &BitRows) -> Result<Vec<FeaturePair<W>>> {
    if rows.n_rows() == 0 {
        return Err(Error::Shape("cannot transpose an empty set of rows".into()));
    }
    let n = rows.n_rows();
    let n_words = words_for::<W>(n);
    let mut columns = vec![vec![W::ZERO; n_words]; rows.width()];
    for j in 0..n {
        let (wj, bj) = (j / W::BITS, W::bit(j % W::BITS));
        for (k, &word) in rows.row_words(j).iter().enumerate() {
            let mut rest = word;
            while rest != 0 {
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                columns[k * 64 + b][wj] |= bj;
            }
        }
    }
    columns
        .into_iter()
        .map(|words| BitVec::from_words(n, words).map(FeaturePair::from_positive))
        .collect()
}

/// [`pack_and_transpose`] on rows given as `bool` slices.
pub fn pack_and_transpose_bools<W: Word, R: AsRef<[bool]>>(
    rows: &[R],
) -> Result<Vec<FeaturePair<W>>> {
    pack_and_transpose(&BitRows::from_bool_rows(rows)?)
}

/// Inverse of [`pack_and_transpose`]: feature vectors back to example rows.
pub fn features_to_rows<W: Word>(features: &[BitVec<W>]) -> Result<BitRows> {
    let n = features.first().map(BitVec::len).unwrap_or(0);
    let mut rows = BitRows::new(features.len());
    let row_words = features.len().div_ceil(64);
    rows.data = vec![0; n * row_words];
    rows.n_rows = n;
    for (i, f) in features.iter().enumerate() {
        if f.len() != n {
            return Err(Error::Shape(format!(
                "feature {i} has length {}, expected {n}",
                f.len()
            )));
        }
        for j in f.iter_ones() {
            rows.data[j * row_words + i / 64] |= 1 << (i % 64);
        }
    }
    Ok(rows)
}

/// Transposed binary dataset: one [`FeaturePair`] per input coordinate plus
/// the packed class labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitDataset<W: Word = u64> {
    n_examples: usize,
    features: Vec<FeaturePair<W>>,
    labels: BitVec<W>,
}

impl<W: Word> BitDataset<W> {
    pub fn new(features: Vec<FeaturePair<W>>, labels: BitVec<W>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::Shape("dataset has no examples".into()));
        }
        if let Some((i, f)) = features
            .iter()
            .enumerate()
            .find(|(_, f)| f.len() != n || f.negative.len() != n)
        {
            return Err(Error::Shape(format!(
                "feature {i} has length {}, labels have length {n}",
                f.len()
            )));
        }
        Ok(BitDataset {
            n_examples: n,
            features,
            labels,
        })
    }

    /// Transposes labelled rows into a dataset.
    pub fn from_rows(rows: &BitRows, labels: &[bool]) -> Result<Self> {
        if labels.len() != rows.n_rows() {
            return Err(Error::Shape(format!(
                "{} rows but {} labels",
                rows.n_rows(),
                labels.len()
            )));
        }
        Self::new(pack_and_transpose(rows)?, BitVec::from_bools(labels))
    }

    pub fn n_examples(&self) -> usize {
        self.n_examples
    }

    pub fn n_features(&self) -> usize {
        self.features.len()
    }

    pub fn n_words(&self) -> usize {
        words_for::<W>(self.n_examples)
    }

    pub fn features(&self) -> &[FeaturePair<W>] {
        &self.features
    }

    pub fn feature(&self, i: usize) -> &FeaturePair<W> {
        &self.features[i]
    }

    pub fn labels(&self) -> &BitVec<W> {
        &self.labels
    }

    /// Example `j` as a row of feature bits.
    pub fn example(&self, j: usize) -> Vec<bool> {
        self.features.iter().map(|f| f.positive.get(j)).collect()
    }

    pub fn to_rows(&self) -> Result<BitRows> {
        let pos: Vec<BitVec<W>> = self.features.iter().map(|f| f.positive.clone()).collect();
        features_to_rows(&pos)
    }
}

/// The `2^k` pattern indicator vectors of `k` features.
///
/// `slices[p]` marks the examples whose inputs form pattern `p`, where input
/// `i` supplies bit `k - 1 - i` of `p` (the first input is the most
/// significant bit).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternSlices<W: Word = u64> {
    pub arity: usize,
    pub slices: Vec<BitVec<W>>,
}

/// Tensor product of `k` features: AND of every combination of each input
/// or its complement.
pub fn tensor_product<W: Word>(inputs: &[&FeaturePair<W>]) -> Result<PatternSlices<W>> {
    let k = inputs.len();
    if k == 0 || k > MAX_ARITY {
        return Err(Error::Shape(format!(
            "tensor product arity {k} outside 1..={MAX_ARITY}"
        )));
    }
    let n = inputs[0].len();
    if let Some(f) = inputs.iter().find(|f| f.len() != n) {
        return Err(Error::Shape(format!(
            "tensor inputs of length {} and {n}",
            f.len()
        )));
    }
    // Doubling: after processing input i, slice q covers the first i+1 inputs.
    let mut slices = vec![inputs[0].negative.clone(), inputs[0].positive.clone()];
    for f in &inputs[1..] {
        let mut next = Vec::with_capacity(slices.len() * 2);
        for s in &slices {
            next.push(s.and(&f.negative)?);
            next.push(s.and(&f.positive)?);
        }
        slices = next;
    }
    Ok(PatternSlices { arity: k, slices })
}

/// `counts[p] = popcount(slices[p] AND mask)`.
pub fn count_per_slice<W: Word>(slices: &PatternSlices<W>, mask: &BitVec<W>) -> Result<Vec<u64>> {
    slices
        .slices
        .iter()
        .map(|s| {
            s.check_len(mask)?;
            Ok(s
                .words()
                .iter()
                .zip(mask.words())
                .map(|(&a, &b)| (a & b).count_ones() as u64)
                .sum())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(bits: &[bool]) -> FeaturePair<u64> {
        FeaturePair::from_positive(BitVec::from_bools(bits))
    }

    #[test]
    fn cubes_sized_transpose_uses_1000_words_per_line() {
        let rows = BitRows::from_bool_rows(&vec![vec![true; 10]; 64000]).unwrap();
        let feats = pack_and_transpose::<u64>(&rows).unwrap();
        assert_eq!(feats.len(), 10);
        assert!(feats.iter().all(|f| f.positive.words().len() == 1000));
        let feats32 = pack_and_transpose::<u32>(&rows).unwrap();
        assert!(feats32.iter().all(|f| f.positive.words().len() == 2000));
    }

    #[test]
    fn single_row_transpose() {
        let feats = pack_and_transpose_bools::<u64, _>(&[vec![true, false, true]]).unwrap();
        let got: Vec<Vec<bool>> = feats.iter().map(|f| f.positive.to_bools()).collect();
        assert_eq!(got, vec![vec![true], vec![false], vec![true]]);
        assert!(feats.iter().all(FeaturePair::is_consistent));
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let err = pack_and_transpose_bools::<u64, _>(&[vec![true, false], vec![true]]);
        assert!(matches!(err, Err(Error::Shape(_))));
        assert!(pack_and_transpose::<u64>(&BitRows::new(3)).is_err());
    }

    #[test]
    fn ones_and_not_keep_padding_zero() {
        let v = BitVec::<u32>::ones(37);
        assert_eq!(v.count_ones(), 37);
        assert_eq!(v.words()[1], 0b11111);
        let z = BitVec::<u32>::zeros(37).not();
        assert_eq!(z, v);
    }

    #[test]
    fn tensor_of_one_input_is_negative_then_positive() {
        let f = fp(&[true, false, false, true, true]);
        let s = tensor_product(&[&f]).unwrap();
        assert_eq!(s.slices, vec![f.negative.clone(), f.positive.clone()]);
    }

    #[test]
    fn tensor_all_ones_example_lands_in_last_slice() {
        let (x, y, z) = (fp(&[true, false]), fp(&[true, true]), fp(&[true, false]));
        let s = tensor_product(&[&x, &y, &z]).unwrap();
        for (p, slice) in s.slices.iter().enumerate() {
            assert_eq!(slice.get(0), p == 0b111);
        }
        // example 1 has (x,y,z) = (0,1,0)
        assert!(s.slices[0b010].get(1));
    }

    #[test]
    fn tensor_rejects_bad_shapes() {
        let a = fp(&[true; 3]);
        let b = fp(&[true; 4]);
        assert!(tensor_product(&[&a, &b]).is_err());
        assert!(tensor_product::<u64>(&[]).is_err());
        let many: Vec<&FeaturePair> = vec![&a; 9];
        assert!(tensor_product(&many).is_err());
    }

    #[test]
    fn count_per_slice_complement_counting() {
        let f = fp(&[true, false, false, true, false, true, false, false]);
        let s = tensor_product(&[&f]).unwrap();
        assert_eq!(count_per_slice(&s, &BitVec::ones(8)).unwrap(), vec![5, 3]);
        assert_eq!(count_per_slice(&s, &BitVec::zeros(8)).unwrap(), vec![0, 0]);
        assert!(count_per_slice(&s, &BitVec::zeros(9)).is_err());
    }

    #[test]
    fn dataset_rejects_mismatched_features() {
        let f = fp(&[true, false]);
        assert!(BitDataset::new(vec![f.clone()], BitVec::zeros(3)).is_err());
        assert!(BitDataset::<u64>::new(vec![], BitVec::zeros(0)).is_err());
        let d = BitDataset::new(vec![f], BitVec::zeros(2)).unwrap();
        assert_eq!(d.example(0), vec![true]);
    }
}
