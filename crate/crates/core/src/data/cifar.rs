//! CIFAR-10 binary batches: records of one label byte and 3072 channel
//! bytes (1024 red, then 1024 green, then 1024 blue).

use std::path::Path;

use super::{quantize_msb, LabeledRows, QuantizeSpec};
use crate::bitcore::{BitRows, Word};
use crate::{BitDataset, Error, Result};

pub const CIFAR_RECORD_LEN: usize = 3073;
pub const CIFAR_RECORDS_PER_BATCH: usize = 10_000;
pub const CIFAR_AUTOMOBILE: u8 = 1;
pub const CIFAR_BIRD: u8 = 2;

/// Parses one batch, keeping records labeled `class_a` (class 0) or
/// `class_b` (class 1). With `expected_records` set, any other record count
/// is a format error.
pub fn parse_cifar_batch(
    bytes: &[u8],
    expected_records: Option<usize>,
    class_a: u8,
    class_b: u8,
    spec: QuantizeSpec,
) -> Result<LabeledRows> {
    if spec.channels() != 3 {
        return Err(Error::Config("CIFAR-10 images have three channels".into()));
    }
    let whole = bytes.len() / CIFAR_RECORD_LEN;
    if bytes.len() % CIFAR_RECORD_LEN != 0 {
        return Err(Error::format(
            (whole * CIFAR_RECORD_LEN) as u64,
            format!("truncated record {whole}"),
        ));
    }
    if let Some(expected) = expected_records {
        if whole != expected {
            return Err(Error::format(
                bytes.len() as u64,
                format!("{whole} records, expected {expected}"),
            ));
        }
    }
    let mut rows = BitRows::new((CIFAR_RECORD_LEN - 1) * spec.bits());
    let mut labels = Vec::new();
    for (i, record) in bytes.chunks_exact(CIFAR_RECORD_LEN).enumerate() {
        let label = record[0];
        if label > 9 {
            return Err(Error::format(
                (i * CIFAR_RECORD_LEN) as u64,
                format!("label byte {label} outside 0..=9"),
            ));
        }
        let class = if label == class_a {
            false
        } else if label == class_b {
            true
        } else {
            continue;
        };
        rows.push_row(&quantize_msb(&record[1..], spec))?;
        labels.push(class);
    }
    LabeledRows::new(rows, labels)
}

/// Concatenates the filtered records of full-size batch files in order.
pub fn load_cifar10<W: Word>(
    batches: &[&Path],
    class_a: u8,
    class_b: u8,
    spec: QuantizeSpec,
) -> Result<BitDataset<W>> {
    let mut all = LabeledRows::empty((CIFAR_RECORD_LEN - 1) * spec.bits());
    for path in batches {
        let bytes = std::fs::read(path)?;
        all.append(&parse_cifar_batch(&bytes, Some(CIFAR_RECORDS_PER_BATCH), class_a, class_b, spec)?)?;
    }
    all.to_dataset()
}
