//! Synthetic benchmarks: CUBES (square images with bit-flip noise) and
//! GAUSS (lists of normally distributed 16-bit integers).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::LabeledRows;
use crate::bitcore::{BitDataset, BitRows, Word};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CubesSpec {
    /// Image side in pixels.
    pub side: usize,
    /// Square side of class 0.
    pub single: usize,
    /// Square sides of class 1.
    pub pair: (usize, usize),
    /// Per-pixel flip probability.
    pub delta: f64,
    pub seed: u64,
}

impl Default for CubesSpec {
    fn default() -> Self {
        CubesSpec {
            side: 32,
            single: 15,
            pair: (12, 9),
            delta: 0.0,
            seed: 0,
        }
    }
}

impl CubesSpec {
    pub fn new(delta: f64, seed: u64) -> Self {
        CubesSpec {
            delta,
            seed,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(Error::Config(format!("noise {} outside [0, 1]", self.delta)));
        }
        let largest = self.single.max(self.pair.0).max(self.pair.1);
        if largest == 0 || largest > self.side {
            return Err(Error::Config(format!(
                "squares of side up to {largest} do not fit a {0}x{0} image",
                self.side
            )));
        }
        Ok(())
    }
}

/// Filled square with top-left corner at (`row`, `col`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Square {
    pub row: usize,
    pub col: usize,
    pub size: usize,
}

impl Square {
    pub fn overlap(&self, other: &Square) -> usize {
        let span = |a: usize, la: usize, b: usize, lb: usize| (a + la).min(b + lb).saturating_sub(a.max(b));
        span(self.row, self.size, other.row, other.size) * span(self.col, self.size, other.col, other.size)
    }
}

/// Square placement of one CUBES image before noise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubesLayout {
    pub label: bool,
    pub squares: Vec<Square>,
}

/// Noise-free pixels of a layout, row-major. Squares are XORed, so
/// overlapping pixels are background.
pub fn render_cubes(layout: &CubesLayout, side: usize) -> Vec<bool> {
    let mut px = vec![false; side * side];
    for sq in &layout.squares {
        for r in sq.row..sq.row + sq.size {
            for c in sq.col..sq.col + sq.size {
                px[r * side + c] ^= true;
            }
        }
    }
    px
}

fn place(rng: &mut ChaCha8Rng, side: usize, size: usize) -> Square {
    Square {
        row: rng.random_range(0..=side - size),
        col: rng.random_range(0..=side - size),
        size,
    }
}

/// CUBES images and their layouts. Odd-indexed examples are class 1 (two
/// squares), even-indexed are class 0 (one square), so an odd count gives
/// class 0 the extra example.
pub fn gen_cubes_rows(count: usize, spec: &CubesSpec) -> Result<(LabeledRows, Vec<CubesLayout>)> {
    spec.validate()?;
    if count == 0 {
        return Err(Error::Config("example count must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut rows = BitRows::with_capacity(spec.side * spec.side, count);
    let mut labels = Vec::with_capacity(count);
    let mut layouts = Vec::with_capacity(count);
    for i in 0..count {
        let label = i % 2 == 1;
        let squares = if label {
            vec![place(&mut rng, spec.side, spec.pair.0), place(&mut rng, spec.side, spec.pair.1)]
        } else {
            vec![place(&mut rng, spec.side, spec.single)]
        };
        let layout = CubesLayout { label, squares };
        let mut px = render_cubes(&layout, spec.side);
        if spec.delta > 0.0 {
            for p in px.iter_mut() {
                if rng.random_bool(spec.delta) {
                    *p = !*p;
                }
            }
        }
        rows.push_row(&px)?;
        labels.push(label);
        layouts.push(layout);
    }
    Ok((LabeledRows::new(rows, labels)?, layouts))
}

pub fn gen_cubes<W: Word>(count: usize, spec: &CubesSpec) -> Result<BitDataset<W>> {
    gen_cubes_rows(count, spec)?.0.to_dataset()
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaussSpec {
    /// Integers per example.
    pub len: usize,
    /// Bits per integer; values are clamped to `0..2^bits`.
    pub bits: usize,
    /// (mean, standard deviation) of class 0.
    pub class0: (f64, f64),
    /// (mean, standard deviation) of class 1.
    pub class1: (f64, f64),
    pub seed: u64,
}

impl GaussSpec {
    pub fn new(class0: (f64, f64), class1: (f64, f64), seed: u64) -> Self {
        GaussSpec {
            len: 32,
            bits: 16,
            class0,
            class1,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        for (mu, sigma) in [self.class0, self.class1] {
            if !(sigma >= 0.0 && sigma.is_finite() && mu.is_finite()) {
                return Err(Error::Config(format!("invalid normal parameters ({mu}, {sigma})")));
            }
        }
        if !(1..=31).contains(&self.bits) || self.len == 0 {
            return Err(Error::Config(format!(
                "{} integers of {} bits",
                self.len, self.bits
            )));
        }
        Ok(())
    }
}

/// Raw GAUSS integers and labels; class assignment alternates as in
/// [`gen_cubes_rows`].
pub fn gauss_integers(count: usize, spec: &GaussSpec) -> Result<(Vec<Vec<u32>>, Vec<bool>)> {
    spec.validate()?;
    if count == 0 {
        return Err(Error::Config("example count must be positive".into()));
    }
    let max = ((1u64 << spec.bits) - 1) as f64;
    let normal = |(mu, sigma): (f64, f64)| Normal::new(mu, sigma).map_err(|e| Error::Config(e.to_string()));
    let dists = [normal(spec.class0)?, normal(spec.class1)?];
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut values = Vec::with_capacity(count);
    let mut labels = Vec::with_capacity(count);
    for i in 0..count {
        let label = i % 2 == 1;
        let dist = &dists[label as usize];
        let example = (0..spec.len)
            .map(|_| dist.sample(&mut rng).round().clamp(0.0, max) as u32)
            .collect();
        values.push(example);
        labels.push(label);
    }
    Ok((values, labels))
}

/// GAUSS examples: integers concatenated as big-endian bit strings.
pub fn gen_gauss_rows(count: usize, spec: &GaussSpec) -> Result<LabeledRows> {
    let (values, labels) = gauss_integers(count, spec)?;
    let mut rows = BitRows::with_capacity(spec.len * spec.bits, count);
    let mut bits = vec![false; spec.len * spec.bits];
    for example in &values {
        for (i, &v) in example.iter().enumerate() {
            for b in 0..spec.bits {
                bits[i * spec.bits + b] = v >> (spec.bits - 1 - b) & 1 == 1;
            }
        }
        rows.push_row(&bits)?;
    }
    LabeledRows::new(rows, labels)
}

pub fn gen_gauss<W: Word>(count: usize, spec: &GaussSpec) -> Result<BitDataset<W>> {
    gen_gauss_rows(count, spec)?.to_dataset()
}
