//! Circuit noise physics: subthreshold transconductance, thermal and flicker
//! input-referred PSDs, and band integration mapping an operating point to a
//! weight-domain perturbation sigma.
//!
//! The band integral uses a first-order rectangular rule: each PSD component
//! is a representative level times the bandwidth. The white (thermal) term is
//! exact by construction. The 1/f term is evaluated at the logarithmic-mean
//! frequency `(hi-lo)/ln(hi/lo)`, which makes the rectangle agree with the
//! closed-form log integral; [`integrate_exact`] provides an independent
//! trapezoidal oracle.
//!
//! The default band (1 Hz - 117 kHz) is reverse-engineered so that a 100 pA
//! branch integrates to ~1e-6 V^2; it is a modeling anchor, not a measured
//! value.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Boltzmann constant (J/K).
pub const BOLTZMANN: f64 = 1.380649e-23;
/// Elementary charge (C).
pub const ELECTRON_CHARGE: f64 = 1.602176634e-19;

#[derive(Debug, Error, PartialEq)]
pub enum NoiseError {
    #[error("{0} must be positive")]
    NonPositiveInput(&'static str),
    #[error("frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),
    #[error("band [{0}, {1}] must satisfy 0 < lo < hi")]
    BadBand(f64, f64),
}

/// MS neuron operating point and integration band.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitParams {
    /// Branch bias current in amperes.
    pub bias_current_a: f64,
    pub temperature_k: f64,
    /// Subthreshold slope factor n.
    pub slope_n: f64,
    /// Excess-noise factor gamma (2/3 long-channel).
    pub gamma: f64,
    /// Devices contributing input-referred thermal noise.
    pub pair_count: u32,
    /// Frequency where 1/f PSD crosses the thermal floor; 0 disables flicker.
    pub flicker_corner_hz: f64,
    pub band_lo_hz: f64,
    pub band_hi_hz: f64,
    /// Weight-domain normalization voltage.
    pub full_scale_v: f64,
}

impl Default for CircuitParams {
    fn default() -> Self {
        Self {
            bias_current_a: 100e-12,
            temperature_k: 300.0,
            slope_n: 1.5,
            gamma: 2.0 / 3.0,
            pair_count: 2,
            flicker_corner_hz: 1e3,
            band_lo_hz: 1.0,
            band_hi_hz: 117e3,
            full_scale_v: 0.1,
        }
    }
}

impl CircuitParams {
    pub fn validate(&self) -> Result<(), NoiseError> {
        if self.bias_current_a <= 0.0 {
            return Err(NoiseError::NonPositiveInput("bias_current_a"));
        }
        if self.temperature_k <= 0.0 {
            return Err(NoiseError::NonPositiveInput("temperature_k"));
        }
        if self.slope_n <= 0.0 {
            return Err(NoiseError::NonPositiveInput("slope_n"));
        }
        if self.gamma < 0.0 || self.flicker_corner_hz < 0.0 {
            return Err(NoiseError::NonPositiveInput("gamma/flicker_corner_hz"));
        }
        if !(0.0 < self.band_lo_hz && self.band_lo_hz < self.band_hi_hz) {
            return Err(NoiseError::BadBand(self.band_lo_hz, self.band_hi_hz));
        }
        if self.full_scale_v <= 0.0 {
            return Err(NoiseError::NonPositiveInput("full_scale_v"));
        }
        Ok(())
    }
}

/// Integrated in-band noise power and its weight-domain sigma.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub integrated_power_v2: f64,
    pub weight_sigma: f64,
}

impl NoiseSpec {
    /// Zero-noise spec (ideal weights).
    pub fn noiseless() -> Self {
        Self {
            integrated_power_v2: 0.0,
            weight_sigma: 0.0,
        }
    }

    /// Spec from an integrated power and a normalization voltage.
    pub fn from_power(power_v2: f64, full_scale_v: f64) -> Result<Self, NoiseError> {
        if power_v2 < 0.0 {
            return Err(NoiseError::NonPositiveInput("integrated power"));
        }
        if full_scale_v <= 0.0 {
            return Err(NoiseError::NonPositiveInput("full_scale_v"));
        }
        Ok(Self {
            integrated_power_v2: power_v2,
            weight_sigma: power_v2.sqrt() / full_scale_v,
        })
    }
}

/// Subthreshold transconductance `I / (n kT/q)`.
pub fn gm_subthreshold(bias_current_a: f64, slope_n: f64, temperature_k: f64) -> Result<f64, NoiseError> {
    if bias_current_a <= 0.0 {
        return Err(NoiseError::NonPositiveInput("bias_current_a"));
    }
    if slope_n <= 0.0 {
        return Err(NoiseError::NonPositiveInput("slope_n"));
    }
    if temperature_k <= 0.0 {
        return Err(NoiseError::NonPositiveInput("temperature_k"));
    }
    let thermal_voltage = BOLTZMANN * temperature_k / ELECTRON_CHARGE;
    Ok(bias_current_a / (slope_n * thermal_voltage))
}

/// Input-referred white PSD `pair_count * 4 kT gamma / gm` in V^2/Hz.
pub fn thermal_psd(gm: f64, temperature_k: f64, gamma: f64, pair_count: u32) -> Result<f64, NoiseError> {
    if gm <= 0.0 {
        return Err(NoiseError::NonPositiveInput("gm"));
    }
    if temperature_k <= 0.0 {
        return Err(NoiseError::NonPositiveInput("temperature_k"));
    }
    if gamma < 0.0 {
        return Err(NoiseError::NonPositiveInput("gamma"));
    }
    Ok(pair_count as f64 * 4.0 * BOLTZMANN * temperature_k * gamma / gm)
}

/// 1/f PSD pinned to the thermal floor at the corner frequency.
pub fn flicker_psd(f_hz: f64, thermal_psd_level: f64, flicker_corner_hz: f64) -> Result<f64, NoiseError> {
    if f_hz <= 0.0 {
        return Err(NoiseError::NonPositiveFrequency(f_hz));
    }
    Ok(thermal_psd_level * flicker_corner_hz / f_hz)
}

fn psd_components(params: &CircuitParams) -> Result<f64, NoiseError> {
    let gm = gm_subthreshold(params.bias_current_a, params.slope_n, params.temperature_k)?;
    thermal_psd(gm, params.temperature_k, params.gamma, params.pair_count)
}

/// Logarithmic mean of the band edges; the 1/f sample frequency.
fn log_mean(lo: f64, hi: f64) -> f64 {
    (hi - lo) / (hi / lo).ln()
}

/// First-order rectangular band integration.
///
/// thermal = PSD * BW (exact for white noise); flicker = PSD(f_lm) * BW with
/// f_lm the log-mean frequency, which reproduces the closed-form
/// `S_th * fc * ln(hi/lo)`.
pub fn integrate_rectangular(params: &CircuitParams) -> Result<NoiseSpec, NoiseError> {
    params.validate()?;
    let white = psd_components(params)?;
    let bandwidth = params.band_hi_hz - params.band_lo_hz;
    let thermal_term = white * bandwidth;
    let flicker_term = if params.flicker_corner_hz > 0.0 {
        let sample = log_mean(params.band_lo_hz, params.band_hi_hz);
        flicker_psd(sample, white, params.flicker_corner_hz)? * bandwidth
    } else {
        0.0
    };
    NoiseSpec::from_power(thermal_term + flicker_term, params.full_scale_v)
}

/// Validation oracle: trapezoidal integration of the total PSD on a
/// log-spaced grid. Exact for the white term; converges from above to the
/// closed-form log integral for the 1/f term.
pub fn integrate_exact(params: &CircuitParams, grid_points: usize) -> Result<f64, NoiseError> {
    params.validate()?;
    assert!(grid_points >= 2, "need at least two grid points");
    let white = psd_components(params)?;
    let psd = |f: f64| white + white * params.flicker_corner_hz / f;
    let (lo, hi) = (params.band_lo_hz, params.band_hi_hz);
    let ratio = hi / lo;
    let mut total = 0.0;
    let mut f_prev = lo;
    let mut psd_prev = psd(lo);
    for j in 1..grid_points {
        let f = lo * ratio.powf(j as f64 / (grid_points - 1) as f64);
        let psd_here = psd(f);
        total += (f - f_prev) * 0.5 * (psd_prev + psd_here);
        f_prev = f;
        psd_prev = psd_here;
    }
    Ok(total)
}

/// Rectangular integration across a bias-current sweep; gm is recomputed per
/// current, so lower current means higher integrated power.
pub fn noise_for_current_sweep(
    currents_a: &[f64],
    params: &CircuitParams,
) -> Result<Vec<NoiseSpec>, NoiseError> {
    currents_a
        .iter()
        .map(|&i| {
            let point = CircuitParams {
                bias_current_a: i,
                ..*params
            };
            integrate_rectangular(&point)
        })
        .collect()
}
