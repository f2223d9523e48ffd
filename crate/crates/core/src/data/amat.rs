//! `.amat` text: one example per line, whitespace-separated numbers, the
//! last column being the 0/1 label.

use std::path::Path;

use super::LabeledRows;
use crate::bitcore::Word;
use crate::{BitDataset, Error, Result};

/// Binarizes every pixel as `pixel >= threshold`.
pub fn read_amat(text: &str, threshold: f64) -> Result<LabeledRows> {
    let mut out: Option<LabeledRows> = None;
    let mut row = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        row.clear();
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| Error::parse(line_no, format!("non-numeric token {tok:?}")))?;
            row.push(v);
        }
        let Some((&label, pixels)) = row.split_last() else {
            continue;
        };
        let label = if label == 0.0 {
            false
        } else if label == 1.0 {
            true
        } else {
            return Err(Error::parse(line_no, format!("label {label} is not 0 or 1")));
        };
        let data = out.get_or_insert_with(|| LabeledRows::empty(pixels.len()));
        if pixels.len() != data.width() {
            return Err(Error::parse(
                line_no,
                format!("{} pixels, earlier rows have {}", pixels.len(), data.width()),
            ));
        }
        let bits: Vec<bool> = pixels.iter().map(|&p| p >= threshold).collect();
        data.push(&bits, label)?;
    }
    out.ok_or_else(|| Error::parse(1, "no examples"))
}

pub fn load_amat<W: Word>(path: &Path, threshold: f64) -> Result<BitDataset<W>> {
    read_amat(&std::fs::read_to_string(path)?, threshold)?.to_dataset()
}
