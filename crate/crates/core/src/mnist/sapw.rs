//! SAPW weights files.
//!
//! Little-endian layout:
//!
//! ```text
//! "SAPW"  u32 version (=1)  u32 layer_count
//! per layer:
//!   u32 rows  u32 cols  f64 weight_scale  f64 input_scale  f64 output_scale
//!   rows*cols i8 weights (row-major)
//!   rows i32 biases
//! ```

use std::fs;
use std::path::Path;

use super::network::{QuantizedDense, QuantizedNetwork};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"SAPW";
pub const VERSION: u32 = 1;

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let s = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(Error::Truncated(format!(
                "weights file ends at byte {} while reading {what}",
                self.bytes.len()
            ))),
        }
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(
            self.take(4, what)?.try_into().expect("4 bytes"),
        ))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(
            self.take(8, what)?.try_into().expect("8 bytes"),
        ))
    }
}

pub fn decode_weights(bytes: &[u8]) -> Result<QuantizedNetwork> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4, "magic")? != MAGIC {
        return Err(Error::Format("missing SAPW magic".into()));
    }
    let version = r.u32("version")?;
    if version != VERSION {
        return Err(Error::UnsupportedFormat(format!("SAPW version {version}")));
    }
    let layer_count = r.u32("layer count")?;
    let mut layers = Vec::new();
    for l in 0..layer_count {
        let rows = r.u32("layer rows")? as usize;
        let cols = r.u32("layer cols")? as usize;
        let weight_scale = r.f64("weight scale")?;
        let input_scale = r.f64("input scale")?;
        let output_scale = r.f64("output scale")?;
        let n = rows
            .checked_mul(cols)
            .ok_or_else(|| Error::Format(format!("layer {l}: {rows}x{cols} overflows")))?;
        let weights = r.take(n, "weights")?.iter().map(|&b| b as i8).collect();
        let bias = r
            .take(
                rows.checked_mul(4)
                    .ok_or_else(|| Error::Format(format!("layer {l}: too many rows")))?,
                "biases",
            )?
            .chunks_exact(4)
            .map(|c| i32::from_le_bytes(c.try_into().expect("4 bytes")))
            .collect();
        layers.push(QuantizedDense::new(
            rows,
            cols,
            weights,
            bias,
            weight_scale,
            input_scale,
            output_scale,
        )?);
    }
    if r.pos != bytes.len() {
        return Err(Error::Format(format!(
            "{} trailing bytes after last layer",
            bytes.len() - r.pos
        )));
    }
    QuantizedNetwork::new(layers)
}

pub fn encode_weights(net: &QuantizedNetwork) -> Vec<u8> {
    let mut out = MAGIC.to_vec();
    out.extend(VERSION.to_le_bytes());
    out.extend((net.layers().len() as u32).to_le_bytes());
    for layer in net.layers() {
        out.extend((layer.rows() as u32).to_le_bytes());
        out.extend((layer.cols() as u32).to_le_bytes());
        out.extend(layer.weight_scale().to_le_bytes());
        out.extend(layer.input_scale().to_le_bytes());
        out.extend(layer.output_scale().to_le_bytes());
        out.extend(layer.weights().iter().map(|&w| w as u8));
        for b in layer.bias() {
            out.extend(b.to_le_bytes());
        }
    }
    out
}

pub fn load_weights(path: impl AsRef<Path>) -> Result<QuantizedNetwork> {
    let path = path.as_ref();
    decode_weights(&fs::read(path).map_err(|e| Error::io(path, e))?)
}

pub fn save_weights(net: &QuantizedNetwork, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_weights(net)).map_err(|e| Error::io(path, e))
}
