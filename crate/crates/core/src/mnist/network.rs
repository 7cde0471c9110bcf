//! Quantized fully connected classifier on the approximate multiplier.
//!
//! Activations are `u8`, weights symmetric `i8` in `[-127, 127]`, biases
//! `i32` in units of `weight_scale * input_scale`. A layer computes
//!
//! ```text
//! acc[i] = bias[i] + sum_j sign(w[i][j]) * mul(|w[i][j]|, x[j])
//! ```
//!
//! where `mul` is the shift-and-add multiplier with the activation as the
//! multiplier operand. Accumulation across products is exact. Hidden
//! layers apply ReLU and requantize with
//! `floor(acc * weight_scale * input_scale / output_scale + 0.5)` clamped
//! to `[0, 255]`; the class is the argmax of the last layer's accumulators
//! with ties going to the lowest index.

use rayon::prelude::*;
use serde::Serialize;

use crate::adders::AdderKind;
use crate::error::{Error, Result};
use crate::rca::{shift_add_multiply, MulConfig, RcaConfig};

use super::MnistSet;

/// Operand widths of one weight-activation product: 7-bit magnitude times
/// 8-bit activation.
pub const WEIGHT_MAGNITUDE_BITS: u32 = 7;
pub const ACTIVATION_BITS: u32 = 8;

/// Multiplier for network inference on an `n`-bit adder.
pub fn inference_mul_config(rca: RcaConfig) -> Result<MulConfig> {
    MulConfig::new(rca, WEIGHT_MAGNITUDE_BITS, ACTIVATION_BITS)
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantizedDense {
    rows: usize,
    cols: usize,
    weights: Vec<i8>,
    bias: Vec<i32>,
    weight_scale: f64,
    input_scale: f64,
    output_scale: f64,
}

impl QuantizedDense {
    pub fn new(
        rows: usize,
        cols: usize,
        weights: Vec<i8>,
        bias: Vec<i32>,
        weight_scale: f64,
        input_scale: f64,
        output_scale: f64,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 || weights.len() != rows * cols || bias.len() != rows {
            return Err(Error::DimensionMismatch(format!(
                "layer {rows}x{cols} with {} weights and {} biases",
                weights.len(),
                bias.len()
            )));
        }
        if weights.contains(&i8::MIN) {
            return Err(Error::Range("weight -128 outside symmetric range".into()));
        }
        for (name, s) in [
            ("weight_scale", weight_scale),
            ("input_scale", input_scale),
            ("output_scale", output_scale),
        ] {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {s}")));
            }
        }
        Ok(QuantizedDense {
            rows,
            cols,
            weights,
            bias,
            weight_scale,
            input_scale,
            output_scale,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn weights(&self) -> &[i8] {
        &self.weights
    }

    pub fn bias(&self) -> &[i32] {
        &self.bias
    }

    pub fn weight_scale(&self) -> f64 {
        self.weight_scale
    }

    pub fn input_scale(&self) -> f64 {
        self.input_scale
    }

    pub fn output_scale(&self) -> f64 {
        self.output_scale
    }

    /// Accumulator-to-activation factor used by requantization.
    pub fn requant_factor(&self) -> f64 {
        self.weight_scale * self.input_scale / self.output_scale
    }

    /// Returns the accumulators and the number of adder invocations.
    fn forward(&self, input: &[u8], mul: &MulConfig) -> Result<(Vec<i64>, u64)> {
        let mut additions = 0u64;
        let mut out = Vec::with_capacity(self.rows);
        for (row, &bias) in self.weights.chunks_exact(self.cols).zip(&self.bias) {
            let mut acc = i64::from(bias);
            for (&w, &x) in row.iter().zip(input) {
                let p = shift_add_multiply(mul, u64::from(w.unsigned_abs()), u64::from(x))?;
                additions += p.additions;
                let p = p.product as i64;
                acc += if w < 0 { -p } else { p };
            }
            if i32::try_from(acc).is_err() {
                return Err(Error::Range(format!("accumulator {acc} overflows i32")));
            }
            out.push(acc);
        }
        Ok((out, additions))
    }
}

pub fn requantize(acc: i64, factor: f64) -> u8 {
    if acc <= 0 {
        return 0;
    }
    (acc as f64 * factor + 0.5).floor().clamp(0.0, 255.0) as u8
}

/// Lowest index of the maximum.
pub fn argmax(values: &[i64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantizedNetwork {
    layers: Vec<QuantizedDense>,
}

impl QuantizedNetwork {
    pub fn new(layers: Vec<QuantizedDense>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Config("network has no layers".into()));
        }
        for (i, pair) in layers.windows(2).enumerate() {
            if pair[1].cols != pair[0].rows {
                return Err(Error::ChainMismatch(format!(
                    "layer {i} outputs {} values but layer {} expects {}",
                    pair[0].rows,
                    i + 1,
                    pair[1].cols
                )));
            }
        }
        Ok(QuantizedNetwork { layers })
    }

    pub fn layers(&self) -> &[QuantizedDense] {
        &self.layers
    }

    pub fn input_size(&self) -> usize {
        self.layers[0].cols
    }

    pub fn classes(&self) -> usize {
        self.layers[self.layers.len() - 1].rows
    }

    /// Final-layer accumulators and adder invocations for one input.
    pub fn logits(&self, image: &[u8], mul: &MulConfig) -> Result<(Vec<i64>, u64)> {
        if image.len() != self.input_size() {
            return Err(Error::DimensionMismatch(format!(
                "network expects {} inputs, got {}",
                self.input_size(),
                image.len()
            )));
        }
        let mut activations = image.to_vec();
        let mut additions = 0;
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            let (acc, adds) = layer.forward(&activations, mul)?;
            additions += adds;
            if l == last {
                return Ok((acc, additions));
            }
            let factor = layer.requant_factor();
            activations = acc.into_iter().map(|a| requantize(a, factor)).collect();
        }
        unreachable!("network has at least one layer")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Inference {
    pub class: usize,
    pub additions: u64,
}

pub fn infer(net: &QuantizedNetwork, image: &[u8], mul: &MulConfig) -> Result<Inference> {
    let (logits, additions) = net.logits(image, mul)?;
    Ok(Inference {
        class: argmax(&logits),
        additions,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    pub kind: AdderKind,
    pub n: u32,
    pub k: u32,
    pub samples: usize,
    /// `None` when no samples were evaluated.
    pub accuracy: Option<f64>,
    pub energy_j: f64,
    pub steps: u64,
    pub additions: u64,
    #[serde(skip)]
    pub predictions: Vec<u8>,
}

/// Classifies the first `sample_limit` images in file order.
pub fn evaluate(
    net: &QuantizedNetwork,
    set: &MnistSet,
    mul: &MulConfig,
    sample_limit: usize,
) -> Result<EvalReport> {
    if sample_limit > set.len() {
        return Err(Error::Range(format!(
            "sample limit {sample_limit} exceeds the {} available images",
            set.len()
        )));
    }
    let results = (0..sample_limit)
        .into_par_iter()
        .map(|i| infer(net, set.image(i), mul))
        .collect::<Result<Vec<_>>>()?;
    let correct = results
        .iter()
        .enumerate()
        .filter(|(i, r)| r.class == usize::from(set.label(*i)))
        .count();
    let additions: u64 = results.iter().map(|r| r.additions).sum();
    let rca = &mul.rca;
    Ok(EvalReport {
        kind: rca.kind(),
        n: rca.width(),
        k: rca.approx_degree(),
        samples: sample_limit,
        accuracy: (sample_limit > 0).then(|| correct as f64 / sample_limit as f64),
        energy_j: additions as f64 * rca.energy_per_add_nj() * 1e-9,
        steps: additions * rca.steps_per_add(),
        additions,
        predictions: results.iter().map(|r| r.class as u8).collect(),
    })
}

/// One [`evaluate`] run per approximation degree.
pub fn sweep(
    net: &QuantizedNetwork,
    set: &MnistSet,
    width: u32,
    kind: AdderKind,
    degrees: impl IntoIterator<Item = u32>,
    sample_limit: usize,
) -> Result<Vec<EvalReport>> {
    degrees
        .into_iter()
        .map(|k| {
            let mul = inference_mul_config(RcaConfig::new(width, k, kind)?)?;
            evaluate(net, set, &mul, sample_limit)
        })
        .collect()
}
