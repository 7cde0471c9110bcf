//! MNIST inference on the approximate multiplier: IDX and SAPW file
//! formats, the quantized network and accuracy/cost evaluation.

mod idx;
mod network;
mod sapw;

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use idx::{
    decode_idx, encode_images, encode_labels, load_idx, MnistSet, IMAGES_MAGIC, LABELS_MAGIC,
};
pub use network::{
    argmax, evaluate, infer, inference_mul_config, requantize, sweep, EvalReport, Inference,
    QuantizedDense, QuantizedNetwork, ACTIVATION_BITS, WEIGHT_MAGNITUDE_BITS,
};
pub use sapw::{decode_weights, encode_weights, load_weights, save_weights};

use crate::error::{Error, Result};

/// Companion report of a weights export: float and quantized-reference
/// accuracy plus the quantized reference's predicted classes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceReport {
    pub float_accuracy: f64,
    pub quantized_reference_accuracy: f64,
    pub predictions: Vec<u8>,
}

pub fn load_reference_report(path: impl AsRef<Path>) -> Result<ReferenceReport> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}
