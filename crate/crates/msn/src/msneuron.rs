//! Behavioral mixed-signal neuron: a MAC feeding a differential-amplifier
//! transfer (tanh) with unit branch gain, plus the noisy-weight sampler that
//! turns a [`NoiseSpec`] into a perturbation of quantized weights.

use crate::noisemodel::{NoiseError, NoiseSpec};
use crate::quantizer::{dequantize, QuantSpec, QuantizedWeights};
use crate::rng::gaussian_at;
use crate::tensor::Tensor;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum NeuronError {
    #[error("inputs ({0}) and weights ({1}) differ in length")]
    LengthMismatch(usize, usize),
    #[error("input shape {0:?} does not end in weight length {1}")]
    ShapeMismatch(Vec<usize>, usize),
    #[error("negative noise power {0}")]
    NegativePower(f64),
}

/// Volt-domain operating point. Unit branch gain requires `gm * R == 1`.
#[derive(Clone, Copy, Debug)]
pub struct NeuronConfig {
    pub activation_gain_alpha: f64,
    pub full_scale_v: f64,
    pub gm: f64,
    pub load_resistance_equiv: f64,
}

impl NeuronConfig {
    /// Configuration with the load resistance chosen for unit branch gain.
    pub fn unit_gain(alpha: f64, full_scale_v: f64, gm: f64) -> Self {
        Self {
            activation_gain_alpha: alpha,
            full_scale_v,
            gm,
            load_resistance_equiv: 1.0 / gm,
        }
    }

    pub fn validate(&self) -> bool {
        (self.gm * self.load_resistance_equiv - 1.0).abs() <= 1e-12
            && self.activation_gain_alpha > 0.0
            && self.full_scale_v > 0.0
    }
}

/// Volt-domain MAC with amplifier saturation.
///
/// Currents `gm * w_k * V_k` sum at the output node, the load converts them
/// back to a voltage, and the amplifier transfer clips at the full scale:
/// `fs * tanh(alpha * R * sum / fs)`.
pub fn neuron_forward(
    inputs_v: &[f64],
    weights: &[f64],
    cfg: &NeuronConfig,
) -> Result<f64, NeuronError> {
    if inputs_v.len() != weights.len() {
        return Err(NeuronError::LengthMismatch(inputs_v.len(), weights.len()));
    }
    let mut current = 0.0;
    for (v, w) in inputs_v.iter().zip(weights) {
        current += cfg.gm * w * v;
    }
    let summed_v = cfg.load_resistance_equiv * current;
    Ok(cfg.full_scale_v * (cfg.activation_gain_alpha * summed_v / cfg.full_scale_v).tanh())
}

/// Normalized-domain neuron: `tanh(alpha * (w . x))` for `x` in units of the
/// full scale. Accepts a single vector `(n)` or a batch `(m, n)`.
pub fn normalized_forward(x: &Tensor, w: &Tensor, alpha: f64) -> Result<Tensor, NeuronError> {
    let n = w.len();
    let xs = x.shape();
    if xs.last().copied().unwrap_or(0) != n {
        return Err(NeuronError::ShapeMismatch(xs.to_vec(), n));
    }
    let rows = x.len() / n;
    let mut out = Vec::with_capacity(rows);
    for r in 0..rows {
        let row = &x.data()[r * n..(r + 1) * n];
        let mut acc = 0.0;
        for (xi, wi) in row.iter().zip(w.iter()) {
            acc += wi * xi;
        }
        out.push((alpha * acc).tanh());
    }
    let out_shape = if xs.len() <= 1 {
        vec![]
    } else {
        xs[..xs.len() - 1].to_vec()
    };
    Ok(Tensor::from_vec(out_shape, out))
}

/// Dequantized weights plus a sampled perturbation.
#[derive(Clone, Debug)]
pub struct NoisyWeights {
    pub values: Tensor,
    pub source_spec: QuantSpec,
    pub noise: NoiseSpec,
    pub seed: u64,
}

/// Add i.i.d. zero-mean Gaussian noise (std = `noise.weight_sigma`) to the
/// dequantized weights. Element `i` draws from the counter-based stream
/// keyed by `(seed, i)`, so identical `(q, noise, seed)` is bit-identical
/// and evaluation order never matters.
pub fn sample_noisy_weights(q: &QuantizedWeights, noise: &NoiseSpec, seed: u64) -> NoisyWeights {
    let mut values = dequantize(q);
    if noise.weight_sigma > 0.0 {
        let sigma = noise.weight_sigma;
        for (i, v) in values.data_mut().iter_mut().enumerate() {
            *v += sigma * gaussian_at(seed, i as u64);
        }
    }
    NoisyWeights {
        values,
        source_spec: q.spec,
        noise: *noise,
        seed,
    }
}

/// Weight-domain sigma for an integrated noise power: `sqrt(P)/full_scale`.
pub fn weight_sigma_from_power(power_v2: f64, full_scale_v: f64) -> Result<f64, NeuronError> {
    if power_v2 < 0.0 {
        return Err(NeuronError::NegativePower(power_v2));
    }
    Ok(NoiseSpec::from_power(power_v2, full_scale_v)
        .map_err(|_| NeuronError::NegativePower(power_v2))?
        .weight_sigma)
}
