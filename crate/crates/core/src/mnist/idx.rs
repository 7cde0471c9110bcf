//! IDX image/label files (big-endian headers).

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const IMAGES_MAGIC: u32 = 0x0000_0803;
pub const LABELS_MAGIC: u32 = 0x0000_0801;

/// Images and labels of one split, in file order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MnistSet {
    rows: usize,
    cols: usize,
    pixels: Vec<u8>,
    labels: Vec<u8>,
}

impl MnistSet {
    pub fn new(rows: usize, cols: usize, pixels: Vec<u8>, labels: Vec<u8>) -> Result<Self> {
        let size = rows * cols;
        if size == 0 || pixels.len() != size * labels.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} pixel bytes do not form {} images of {rows}x{cols}",
                pixels.len(),
                labels.len()
            )));
        }
        if let Some(bad) = labels.iter().find(|&&l| l > 9) {
            return Err(Error::Format(format!("label {bad} outside 0..=9")));
        }
        Ok(MnistSet {
            rows,
            cols,
            pixels,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn image_size(&self) -> usize {
        self.rows * self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn image(&self, i: usize) -> &[u8] {
        let n = self.image_size();
        &self.pixels[i * n..(i + 1) * n]
    }

    pub fn label(&self, i: usize) -> u8 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }
}

fn be_u32(bytes: &[u8], at: usize, what: &str) -> Result<u32> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_be_bytes(b.try_into().expect("4 bytes")))
        .ok_or_else(|| Error::Truncated(format!("{what}: header ends at byte {}", bytes.len())))
}

fn check_magic(bytes: &[u8], expected: u32, what: &str) -> Result<()> {
    let magic = be_u32(bytes, 0, what)?;
    if magic != expected {
        return Err(Error::Format(format!(
            "{what}: magic {magic:#010x}, expected {expected:#010x}"
        )));
    }
    Ok(())
}

/// Parses an image file into `(count, rows, cols, pixels)`.
pub fn parse_images(bytes: &[u8]) -> Result<(usize, usize, usize, Vec<u8>)> {
    check_magic(bytes, IMAGES_MAGIC, "image file")?;
    let count = be_u32(bytes, 4, "image file")? as usize;
    let rows = be_u32(bytes, 8, "image file")? as usize;
    let cols = be_u32(bytes, 12, "image file")? as usize;
    let len = count * rows * cols;
    let payload = &bytes[16..];
    if payload.len() < len {
        return Err(Error::Truncated(format!(
            "image file: expected {len} pixel bytes, found {}",
            payload.len()
        )));
    }
    Ok((count, rows, cols, payload[..len].to_vec()))
}

pub fn parse_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    check_magic(bytes, LABELS_MAGIC, "label file")?;
    let count = be_u32(bytes, 4, "label file")? as usize;
    let payload = &bytes[8..];
    if payload.len() < count {
        return Err(Error::Truncated(format!(
            "label file: expected {count} labels, found {}",
            payload.len()
        )));
    }
    Ok(payload[..count].to_vec())
}

pub fn encode_images(rows: usize, cols: usize, pixels: &[u8]) -> Vec<u8> {
    let count = pixels.len() / (rows * cols);
    let mut out = Vec::with_capacity(16 + pixels.len());
    for v in [IMAGES_MAGIC, count as u32, rows as u32, cols as u32] {
        out.extend(v.to_be_bytes());
    }
    out.extend_from_slice(pixels);
    out
}

pub fn encode_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend(LABELS_MAGIC.to_be_bytes());
    out.extend((labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}

pub fn decode_idx(images: &[u8], labels: &[u8]) -> Result<MnistSet> {
    let (count, rows, cols, pixels) = parse_images(images)?;
    let labels = parse_labels(labels)?;
    if count != labels.len() {
        return Err(Error::DimensionMismatch(format!(
            "{count} images but {} labels",
            labels.len()
        )));
    }
    MnistSet::new(rows, cols, pixels, labels)
}

pub fn load_idx(images_path: impl AsRef<Path>, labels_path: impl AsRef<Path>) -> Result<MnistSet> {
    let read = |p: &Path| fs::read(p).map_err(|e| Error::io(p, e));
    decode_idx(&read(images_path.as_ref())?, &read(labels_path.as_ref())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let pixels: Vec<u8> = (0..2 * 784).map(|i| (i % 251) as u8).collect();
        let set = decode_idx(&encode_images(28, 28, &pixels), &encode_labels(&[3, 9])).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.image(1), &pixels[784..]);
        assert_eq!(set.label(1), 9);
    }

    #[test]
    fn errors() {
        let imgs = encode_images(2, 2, &[0; 12]);
        assert!(matches!(
            decode_idx(&imgs, &encode_labels(&[1, 2])),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            decode_idx(&encode_labels(&[1]), &encode_labels(&[1])),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            decode_idx(&imgs[..20], &encode_labels(&[1, 2, 3])),
            Err(Error::Truncated(_))
        ));
        assert!(matches!(
            decode_idx(&imgs, &encode_labels(&[1, 2])[..9]),
            Err(Error::Truncated(_))
        ));
        assert!(matches!(
            decode_idx(&imgs, &encode_labels(&[1, 2, 10])),
            Err(Error::Format(_))
        ));
    }
}
