//! Dataset selection and loading from command-line options.

use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use boolcirc::data::{
    derive_seed, gen_cubes_rows, gen_gauss_rows, parse_cifar_batch, read_amat, read_idx, CubesSpec, GaussSpec,
    LabeledRows, QuantizeSpec, CIFAR_AUTOMOBILE, CIFAR_BIRD, CIFAR_RECORDS_PER_BATCH,
};
use clap::{Args, ValueEnum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DatasetKind {
    Cubes,
    Gauss,
    Mnist,
    Cifar,
    Amat,
}

impl DatasetKind {
    pub fn name(self) -> &'static str {
        match self {
            DatasetKind::Cubes => "cubes",
            DatasetKind::Gauss => "gauss",
            DatasetKind::Mnist => "mnist",
            DatasetKind::Cifar => "cifar",
            DatasetKind::Amat => "amat",
        }
    }
}

#[derive(Clone, Debug, Args)]
pub struct DataArgs {
    #[arg(long, value_enum, default_value_t = DatasetKind::Cubes)]
    pub dataset: DatasetKind,
    /// CUBES: probability of flipping each pixel.
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// GAUSS: mean of class 0.
    #[arg(long, default_value_t = 32768.0)]
    pub mu0: f64,
    /// GAUSS: standard deviation of class 0.
    #[arg(long, default_value_t = 2000.0)]
    pub sigma0: f64,
    /// GAUSS: mean of class 1.
    #[arg(long, default_value_t = 32768.0)]
    pub mu1: f64,
    /// GAUSS: standard deviation of class 1.
    #[arg(long, default_value_t = 8000.0)]
    pub sigma1: f64,
    /// MNIST, CIFAR-10: most significant bits kept per pixel or channel.
    #[arg(long, default_value_t = 2)]
    pub bits: usize,
    /// Training examples (default depends on the dataset).
    #[arg(long)]
    pub train: Option<usize>,
    /// Test examples (default depends on the dataset).
    #[arg(long)]
    pub test: Option<usize>,
    /// Directory with the four MNIST IDX files under their usual names.
    #[arg(long)]
    pub mnist_dir: Option<PathBuf>,
    /// Directory with the CIFAR-10 binary batches.
    #[arg(long)]
    pub cifar_dir: Option<PathBuf>,
    /// Original label mapped to class 0 (MNIST: 3, CIFAR-10: automobile).
    #[arg(long)]
    pub class_a: Option<u8>,
    /// Original label mapped to class 1 (MNIST: 5, CIFAR-10: bird).
    #[arg(long)]
    pub class_b: Option<u8>,
    #[arg(long)]
    pub amat_train: Option<PathBuf>,
    #[arg(long)]
    pub amat_test: Option<PathBuf>,
    /// amat: pixels at or above this value become 1.
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
}

impl Default for DataArgs {
    fn default() -> Self {
        DataArgs {
            dataset: DatasetKind::Cubes,
            delta: 0.1,
            mu0: 32768.0,
            sigma0: 2000.0,
            mu1: 32768.0,
            sigma1: 8000.0,
            bits: 2,
            train: None,
            test: None,
            mnist_dir: None,
            cifar_dir: None,
            class_a: None,
            class_b: None,
            amat_train: None,
            amat_test: None,
            threshold: 0.5,
        }
    }
}

/// Training and test examples.
#[derive(Clone, Debug)]
pub struct Split {
    pub train: LabeledRows,
    pub test: LabeledRows,
}

pub const MNIST_FILES: [&str; 4] = [
    "train-images-idx3-ubyte",
    "train-labels-idx1-ubyte",
    "t10k-images-idx3-ubyte",
    "t10k-labels-idx1-ubyte",
];

const CIFAR_TRAIN_FILES: [&str; 5] = [
    "data_batch_1.bin",
    "data_batch_2.bin",
    "data_batch_3.bin",
    "data_batch_4.bin",
    "data_batch_5.bin",
];
const CIFAR_TEST_FILE: &str = "test_batch.bin";

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("reading {}", path.display()))
}

impl DataArgs {
    pub fn with_kind(dataset: DatasetKind) -> Self {
        DataArgs {
            dataset,
            ..Self::default()
        }
    }

    /// Default (train, test) sizes; `None` means every available example.
    fn default_sizes(&self) -> (Option<usize>, Option<usize>) {
        match self.dataset {
            DatasetKind::Cubes => (Some(12_000), Some(50_000)),
            DatasetKind::Gauss => (Some(10_000), Some(10_000)),
            DatasetKind::Mnist => (Some(2_276), Some(9_662)),
            DatasetKind::Cifar | DatasetKind::Amat => (None, None),
        }
    }

    pub fn sizes(&self) -> (Option<usize>, Option<usize>) {
        let (train, test) = self.default_sizes();
        (self.train.or(train), self.test.or(test))
    }

    fn classes(&self) -> (u8, u8) {
        let (a, b) = match self.dataset {
            DatasetKind::Cifar => (CIFAR_AUTOMOBILE, CIFAR_BIRD),
            _ => (3, 5),
        };
        (self.class_a.unwrap_or(a), self.class_b.unwrap_or(b))
    }

    /// Dataset-specific parameters as `key=value` pairs joined by `;`.
    pub fn params(&self) -> String {
        let (a, b) = self.classes();
        match self.dataset {
            DatasetKind::Cubes => format!("delta={}", self.delta),
            DatasetKind::Gauss => format!(
                "mu0={};sigma0={};mu1={};sigma1={}",
                self.mu0, self.sigma0, self.mu1, self.sigma1
            ),
            DatasetKind::Mnist | DatasetKind::Cifar => format!("bits={};classes={a}/{b}", self.bits),
            DatasetKind::Amat => format!("threshold={}", self.threshold),
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.train != Some(0), "--train must be at least 1");
        ensure!(self.test != Some(0), "--test must be at least 1");
        ensure!((0.0..=1.0).contains(&self.delta), "--delta must lie in [0, 1]");
        ensure!(self.sigma0 >= 0.0 && self.sigma1 >= 0.0, "standard deviations must be non-negative");
        ensure!((1..=8).contains(&self.bits), "--bits must lie in 1..=8");
        let (a, b) = self.classes();
        ensure!(a != b, "--class-a and --class-b must differ");
        match self.dataset {
            DatasetKind::Mnist => ensure!(self.mnist_dir.is_some(), "--dataset mnist needs --mnist-dir"),
            DatasetKind::Cifar => ensure!(self.cifar_dir.is_some(), "--dataset cifar needs --cifar-dir"),
            DatasetKind::Amat => ensure!(
                self.amat_train.is_some() && self.amat_test.is_some(),
                "--dataset amat needs --amat-train and --amat-test"
            ),
            _ => {}
        }
        Ok(())
    }

    /// Builds or loads the training and test examples for experiment
    /// `seed`. Generated datasets draw from streams derived from the seed,
    /// and pooled real data is shuffled with another derived stream.
    pub fn load(&self, seed: u64) -> Result<Split> {
        self.validate()?;
        let (train, test) = self.sizes();
        let split = match self.dataset {
            DatasetKind::Cubes => {
                let spec = |stream| CubesSpec::new(self.delta, derive_seed(seed, stream));
                Split {
                    train: gen_cubes_rows(train.unwrap(), &spec(1))?.0,
                    test: gen_cubes_rows(test.unwrap(), &spec(2))?.0,
                }
            }
            DatasetKind::Gauss => {
                let spec = |stream| {
                    GaussSpec::new((self.mu0, self.sigma0), (self.mu1, self.sigma1), derive_seed(seed, stream))
                };
                Split {
                    train: gen_gauss_rows(train.unwrap(), &spec(1))?,
                    test: gen_gauss_rows(test.unwrap(), &spec(2))?,
                }
            }
            DatasetKind::Mnist => {
                let dir = self.mnist_dir.as_ref().unwrap();
                let (a, b) = self.classes();
                let q = QuantizeSpec::new(self.bits, 1)?;
                let path = |i: usize| dir.join(MNIST_FILES[i]);
                let mut pool = read_idx(&read(&path(0))?, &read(&path(1))?, a, b, q)
                    .with_context(|| format!("parsing {}", path(0).display()))?;
                let t10k = read_idx(&read(&path(2))?, &read(&path(3))?, a, b, q)
                    .with_context(|| format!("parsing {}", path(2).display()))?;
                pool.append(&t10k)?;
                let (train, test) = pool.shuffled_split(derive_seed(seed, 3), train.unwrap(), test.unwrap())?;
                Split { train, test }
            }
            DatasetKind::Cifar => {
                let dir = self.cifar_dir.as_ref().unwrap();
                let (a, b) = self.classes();
                let q = QuantizeSpec::new(self.bits, 3)?;
                let batch = |name: &str| -> Result<LabeledRows> {
                    let path = dir.join(name);
                    parse_cifar_batch(&read(&path)?, Some(CIFAR_RECORDS_PER_BATCH), a, b, q)
                        .with_context(|| format!("parsing {}", path.display()))
                };
                let mut pool = batch(CIFAR_TRAIN_FILES[0])?;
                for name in &CIFAR_TRAIN_FILES[1..] {
                    pool.append(&batch(name)?)?;
                }
                Split {
                    train: subsample(pool, train, derive_seed(seed, 3))?,
                    test: subsample(batch(CIFAR_TEST_FILE)?, test, derive_seed(seed, 4))?,
                }
            }
            DatasetKind::Amat => {
                let load = |path: &PathBuf, n: Option<usize>| -> Result<LabeledRows> {
                    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                    let rows = read_amat(&text, self.threshold).with_context(|| format!("parsing {}", path.display()))?;
                    take_head(rows, n)
                };
                Split {
                    train: load(self.amat_train.as_ref().unwrap(), train)?,
                    test: load(self.amat_test.as_ref().unwrap(), test)?,
                }
            }
        };
        if split.train.width() != split.test.width() {
            bail!(
                "training examples have {} features, test examples {}",
                split.train.width(),
                split.test.width()
            );
        }
        Ok(split)
    }
}

fn take_head(rows: LabeledRows, n: Option<usize>) -> Result<LabeledRows> {
    match n {
        None => Ok(rows),
        Some(n) if n <= rows.len() => Ok(rows.head(n)),
        Some(n) => bail!("requested {n} examples but only {} are available", rows.len()),
    }
}

fn subsample(rows: LabeledRows, n: Option<usize>, seed: u64) -> Result<LabeledRows> {
    match n {
        None => Ok(rows),
        Some(n) => Ok(rows.shuffled_split(seed, n, 0)?.0),
    }
}
