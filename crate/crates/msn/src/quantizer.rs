//! Symmetric N-bit post-training weight quantization.
//!
//! Weights are mapped onto a symmetric integer grid
//! `[-(2^(N-1)-1), +(2^(N-1)-1)]` with a per-tensor scale equal to the
//! maximum absolute weight; the most-negative two's-complement code is
//! unused so that 0 is exactly representable and negation is a code-level
//! negation.

use crate::tensor::Tensor;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum QuantError {
    #[error("weight at flat index {0} is not finite")]
    NonFiniteWeight(usize),
    #[error("bit width {0} out of supported range 2..=16")]
    InvalidBits(u32),
}

/// Bit width plus per-tensor scale (the real value of the maximum code).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantSpec {
    pub bits: u32,
    pub scale: f64,
}

impl QuantSpec {
    pub fn new(bits: u32, scale: f64) -> Result<Self, QuantError> {
        if !(2..=16).contains(&bits) {
            return Err(QuantError::InvalidBits(bits));
        }
        Ok(Self { bits, scale })
    }

    /// Largest representable code, `2^(bits-1) - 1`.
    pub fn max_code(&self) -> i32 {
        (1i32 << (self.bits - 1)) - 1
    }

    /// Grid spacing between adjacent representable values.
    pub fn step(&self) -> f64 {
        self.scale / self.max_code() as f64
    }
}

/// Integer weight codes with their quantization spec.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantizedWeights {
    pub codes: Vec<i32>,
    pub shape: Vec<usize>,
    pub spec: QuantSpec,
}

/// Quantize with per-tensor max-abs calibration. Ties round away from zero.
///
/// An all-zero tensor gets scale 1 and all-zero codes.
pub fn quantize(weights: &Tensor, bits: u32) -> Result<QuantizedWeights, QuantError> {
    if let Some(ix) = weights.iter().position(|v| !v.is_finite()) {
        return Err(QuantError::NonFiniteWeight(ix));
    }
    let max_abs = weights.max_abs();
    let scale = if max_abs == 0.0 { 1.0 } else { max_abs };
    let spec = QuantSpec::new(bits, scale)?;
    Ok(quantize_with_spec(weights, spec))
}

/// Quantize onto an existing grid, saturating codes that fall outside the
/// symmetric range. Used for bias tensors, which share their layer's spec.
pub fn quantize_with_spec(weights: &Tensor, spec: QuantSpec) -> QuantizedWeights {
    let max_code = spec.max_code();
    let inv_step = max_code as f64 / spec.scale;
    let codes = weights
        .iter()
        .map(|&w| {
            // f64::round ties away from zero, preserving odd symmetry.
            let c = (w * inv_step).round();
            (c as i32).clamp(-max_code, max_code)
        })
        .collect();
    QuantizedWeights {
        codes,
        shape: weights.shape().to_vec(),
        spec,
    }
}

/// Reconstruct the real tensor `codes * step`. Exact for on-grid values.
pub fn dequantize(q: &QuantizedWeights) -> Tensor {
    let step = q.spec.step();
    Tensor::from_vec(
        q.shape.clone(),
        q.codes.iter().map(|&c| c as f64 * step).collect(),
    )
}

/// Worst-case rounding error for in-range values: half a grid step.
pub fn quantization_error_sup(bits: u32, scale: f64) -> f64 {
    scale / (2.0 * ((1u32 << (bits - 1)) - 1) as f64)
}
