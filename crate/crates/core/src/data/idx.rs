//! IDX files (MNIST): big-endian magic and dimensions followed by raw bytes.

use std::path::Path;

use super::{quantize_msb, LabeledRows, QuantizeSpec};
use crate::bitcore::{BitRows, Word};
use crate::{BitDataset, Error, Result};

const IMAGE_MAGIC: u32 = 0x0000_0803;
const LABEL_MAGIC: u32 = 0x0000_0801;

/// Parsed image file borrowing its pixel bytes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IdxImages<'a> {
    pub count: usize,
    pub rows: usize,
    pub cols: usize,
    pub pixels: &'a [u8],
}

impl<'a> IdxImages<'a> {
    pub fn image(&self, i: usize) -> &'a [u8] {
        let size = self.rows * self.cols;
        &self.pixels[i * size..(i + 1) * size]
    }
}

fn be_u32(bytes: &[u8], offset: usize) -> Result<u32> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_be_bytes(b.try_into().unwrap()))
        .ok_or_else(|| Error::format(offset as u64, "file ends inside the header"))
}

fn check_magic(bytes: &[u8], expected: u32) -> Result<()> {
    let magic = be_u32(bytes, 0)?;
    if magic != expected {
        return Err(Error::format(
            0,
            format!("magic {magic:#010x}, expected {expected:#010x}"),
        ));
    }
    Ok(())
}

pub fn parse_idx_images(bytes: &[u8]) -> Result<IdxImages<'_>> {
    check_magic(bytes, IMAGE_MAGIC)?;
    let count = be_u32(bytes, 4)? as usize;
    let rows = be_u32(bytes, 8)? as usize;
    let cols = be_u32(bytes, 12)? as usize;
    if rows == 0 || cols == 0 {
        return Err(Error::format(8, format!("image dimensions {rows}x{cols}")));
    }
    let expected = count
        .checked_mul(rows * cols)
        .ok_or_else(|| Error::format(4, "image dimensions overflow"))?;
    let pixels = &bytes[16..];
    if pixels.len() != expected {
        return Err(Error::format(
            16,
            format!(
                "{count} images of {rows}x{cols} need {expected} bytes, found {}",
                pixels.len()
            ),
        ));
    }
    Ok(IdxImages { count, rows, cols, pixels })
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<&[u8]> {
    check_magic(bytes, LABEL_MAGIC)?;
    let count = be_u32(bytes, 4)? as usize;
    let labels = &bytes[8..];
    if labels.len() != count {
        return Err(Error::format(
            8,
            format!("header announces {count} labels, found {}", labels.len()),
        ));
    }
    Ok(labels)
}

/// Keeps images labeled `class_a` (class 0) or `class_b` (class 1) in file
/// order, quantized to `spec.bits()` bits per pixel.
pub fn read_idx(
    image_bytes: &[u8],
    label_bytes: &[u8],
    class_a: u8,
    class_b: u8,
    spec: QuantizeSpec,
) -> Result<LabeledRows> {
    let images = parse_idx_images(image_bytes)?;
    let labels = parse_idx_labels(label_bytes)?;
    if labels.len() != images.count {
        return Err(Error::format(
            4,
            format!("{} labels for {} images", labels.len(), images.count),
        ));
    }
    if spec.channels() != 1 {
        return Err(Error::Config("IDX images are single-channel".into()));
    }
    let width = images.rows * images.cols * spec.bits();
    let mut rows = BitRows::new(width);
    let mut out_labels = Vec::new();
    for (i, &label) in labels.iter().enumerate() {
        let class = if label == class_a {
            false
        } else if label == class_b {
            true
        } else {
            continue;
        };
        rows.push_row(&quantize_msb(images.image(i), spec))?;
        out_labels.push(class);
    }
    LabeledRows::new(rows, out_labels)
}

pub fn load_idx<W: Word>(
    images: &Path,
    labels: &Path,
    class_a: u8,
    class_b: u8,
    spec: QuantizeSpec,
) -> Result<BitDataset<W>> {
    read_idx(&std::fs::read(images)?, &std::fs::read(labels)?, class_a, class_b, spec)?.to_dataset()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn images(count: u32, rows: u32, cols: u32, pixels: &[u8]) -> Vec<u8> {
        let mut b = IMAGE_MAGIC.to_be_bytes().to_vec();
        for v in [count, rows, cols] {
            b.extend(v.to_be_bytes());
        }
        b.extend_from_slice(pixels);
        b
    }

    fn labels(ls: &[u8]) -> Vec<u8> {
        let mut b = LABEL_MAGIC.to_be_bytes().to_vec();
        b.extend((ls.len() as u32).to_be_bytes());
        b.extend_from_slice(ls);
        b
    }

    #[test]
    fn two_image_fixture() {
        let px = [0u8, 255, 128, 7, 200, 64, 3, 129];
        let img = images(2, 2, 2, &px);
        let parsed = parse_idx_images(&img).unwrap();
        assert_eq!((parsed.count, parsed.rows, parsed.cols), (2, 2, 2));
        assert_eq!(parsed.pixels, px);
        assert_eq!(parsed.image(1), &px[4..]);

        let d = read_idx(&img, &labels(&[5, 3]), 3, 5, QuantizeSpec::new(1, 1).unwrap()).unwrap();
        assert_eq!(d.labels, [true, false]);
        assert_eq!(d.rows.row(0), [false, true, true, false]);
        assert_eq!(d.rows.row(1), [true, false, false, true]);
    }

    #[test]
    fn filtering_keeps_file_order() {
        let px: Vec<u8> = (0..4).map(|i| i * 60).collect();
        let img = images(4, 1, 1, &px);
        let d = read_idx(&img, &labels(&[5, 1, 3, 5]), 3, 5, QuantizeSpec::new(8, 1).unwrap()).unwrap();
        assert_eq!(d.labels, [true, false, true]);
        let back: Vec<u8> = (0..3)
            .map(|j| d.rows.row(j).iter().fold(0u8, |acc, &b| acc << 1 | b as u8))
            .collect();
        assert_eq!(back, [0, 120, 180]);
    }

    #[test]
    fn malformed_files() {
        let px = [0u8; 8];
        let mut img = images(2, 2, 2, &px);
        let spec = QuantizeSpec::new(1, 1).unwrap();
        assert!(matches!(
            read_idx(&img, &labels(&[3, 5, 3]), 3, 5, spec),
            Err(Error::Format { offset: 4, .. })
        ));
        assert!(matches!(parse_idx_images(&img[..10]), Err(Error::Format { offset: 8, .. })));
        assert!(matches!(parse_idx_images(&img[..20]), Err(Error::Format { offset: 16, .. })));
        img[3] = 0x01;
        assert!(matches!(parse_idx_images(&img), Err(Error::Format { offset: 0, .. })));
        assert!(parse_idx_labels(&images(2, 2, 2, &px)).is_err());
    }
}
