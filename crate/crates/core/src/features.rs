//! Time- and frequency-domain parameterization of glottal estimates.
//!
//! Time-domain features follow the sample-grid convention: flow is the
//! running sum of the derivative (unit sample spacing) and periods are given
//! in samples, which makes NAQ dimensionless without unit juggling.

use crate::dsp::fft::{magnitude_spectrum, next_pow2};
use crate::estimators::Method;
use crate::{Error, Result};

/// Per-frame feature vector.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRecord {
    pub naq: Option<f64>,
    pub qoq: Option<f64>,
    pub h1h2: Option<f64>,
    pub hrf: Option<f64>,
    pub f0_used: f64,
    pub method: Method,
}

/// Normalized amplitude quotient: `max(flow) / (|min(dflow)| * t0)`.
///
/// Flow and derivative must live on the same sample grid (flow a running sum
/// of dflow); `t0` is the pitch period in samples.
pub fn naq(flow: &[f64], dflow: &[f64], t0: usize) -> Result<f64> {
    if flow.is_empty() || dflow.is_empty() {
        return Err(Error::EmptyInput("naq"));
    }
    if t0 == 0 {
        return Err(Error::InvalidParam {
            name: "t0",
            reason: "period must be positive".into(),
        });
    }
    let min_d = dflow.iter().cloned().fold(f64::MAX, f64::min);
    if !(min_d < 0.0) {
        return Err(Error::FeatureUndefined(
            "derivative never negative: no closure event".into(),
        ));
    }
    let max_flow = flow.iter().cloned().fold(f64::MIN, f64::max);
    Ok(max_flow / (min_d.abs() * t0 as f64))
}

/// Quasi-open quotient: duration above half the peak-to-peak flow, taken as
/// the longest contiguous run containing the flow maximum, normalized by the
/// period.
pub fn qoq(flow: &[f64], t0: usize) -> Result<f64> {
    if flow.is_empty() {
        return Err(Error::EmptyInput("qoq"));
    }
    if t0 == 0 {
        return Err(Error::InvalidParam {
            name: "t0",
            reason: "period must be positive".into(),
        });
    }
    let min = flow.iter().cloned().fold(f64::MAX, f64::min);
    let max = flow.iter().cloned().fold(f64::MIN, f64::max);
    if !(max > min) {
        return Err(Error::DegenerateSignal("constant flow"));
    }
    let threshold = min + 0.5 * (max - min);
    let argmax = flow
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap()
        .0;
    let mut lo = argmax;
    while lo > 0 && flow[lo - 1] > threshold {
        lo -= 1;
    }
    let mut hi = argmax;
    while hi + 1 < flow.len() && flow[hi + 1] > threshold {
        hi += 1;
    }
    Ok((hi - lo + 1) as f64 / t0 as f64)
}

/// Read the amplitude of harmonic `k` as the spectral maximum within
/// `+- f0/4` of `k*f0`.
fn harmonic_amplitude(spec: &[f64], k: usize, f0: f64, fs: f64, nfft: usize) -> f64 {
    let df = fs / nfft as f64;
    let center = k as f64 * f0;
    let lo = (((center - f0 / 4.0) / df).ceil() as usize).max(1);
    let hi = (((center + f0 / 4.0) / df).floor() as usize).min(nfft / 2);
    if lo > hi {
        return 0.0;
    }
    spec[lo..=hi].iter().cloned().fold(0.0, f64::max)
}

fn harmonic_setup(signal: &[f64], f0: f64, fs: f64) -> Result<(Vec<f64>, usize)> {
    if !(f0 > 0.0 && fs > 0.0) {
        return Err(Error::InvalidParam {
            name: "f0",
            reason: "frequencies must be positive".into(),
        });
    }
    if 2.0 * f0 >= fs / 2.0 {
        return Err(Error::FeatureUndefined(
            "fewer than 2 harmonics below Nyquist".into(),
        ));
    }
    let needed = (4.0 * fs / f0).floor() as usize;
    if signal.len() < needed {
        return Err(Error::TooShort {
            context: "harmonic analysis needs 4 periods",
            needed,
            got: signal.len(),
        });
    }
    let nfft = next_pow2(std::cmp::max(8192, 2 * signal.len()));
    Ok((magnitude_spectrum(signal, nfft), nfft))
}

/// H1-H2: dB ratio of the spectral amplitude at the fundamental to the
/// second harmonic.
pub fn h1h2(signal: &[f64], f0: f64, fs: f64) -> Result<f64> {
    let (spec, nfft) = harmonic_setup(signal, f0, fs)?;
    let peak = spec.iter().cloned().fold(0.0, f64::max);
    let h1 = harmonic_amplitude(&spec, 1, f0, fs, nfft);
    let h2 = harmonic_amplitude(&spec, 2, f0, fs, nfft);
    if h2 < 1e-12 * peak {
        return Err(Error::FeatureUndefined(
            "second harmonic below noise floor".into(),
        ));
    }
    Ok(20.0 * (h1 / h2).log10())
}

/// Harmonic richness factor: dB ratio of the summed harmonic amplitudes
/// (k >= 2, up to `n_harmonics` capped below Nyquist) to the fundamental.
pub fn hrf(signal: &[f64], f0: f64, fs: f64, n_harmonics: usize) -> Result<f64> {
    let (spec, nfft) = harmonic_setup(signal, f0, fs)?;
    let peak = spec.iter().cloned().fold(0.0, f64::max);
    let cap = ((fs / 2.0) / f0).floor() as usize;
    let k_max = n_harmonics.min(cap.saturating_sub(1));
    if k_max < 2 {
        return Err(Error::FeatureUndefined(
            "fewer than 2 harmonics below Nyquist".into(),
        ));
    }
    let h1 = harmonic_amplitude(&spec, 1, f0, fs, nfft);
    if h1 < 1e-12 * peak {
        return Err(Error::FeatureUndefined("fundamental below noise floor".into()));
    }
    let sum: f64 = (2..=k_max)
        .map(|k| harmonic_amplitude(&spec, k, f0, fs, nfft))
        .sum();
    if sum < 1e-12 * peak {
        return Err(Error::FeatureUndefined(
            "no harmonics above the noise floor (pure tone)".into(),
        ));
    }
    Ok(20.0 * (sum / h1).log10())
}

/// Scale a signal to unit peak magnitude.
pub fn peak_normalized(signal: &[f64]) -> Result<Vec<f64>> {
    let peak = signal.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(peak > 0.0) {
        return Err(Error::DegenerateSignal("cannot normalize an all-zero signal"));
    }
    Ok(signal.iter().map(|v| v / peak).collect())
}

/// Band-limited RMS log-spectral distortion in dB between two equal-length
/// signals:
///
/// `sqrt( (2/8000) * sum_{20Hz..4kHz} (20 log10 |Se/Sr|)^2 df )`
///
/// evaluated as a Riemann sum over the bins of a >= 4096-point transform.
/// Gain-sensitive: peak-normalize both inputs first when comparing shapes.
pub fn spectral_distortion(estimate: &[f64], reference: &[f64], fs: f64) -> Result<f64> {
    if estimate.len() != reference.len() {
        return Err(Error::InvalidParam {
            name: "estimate",
            reason: format!(
                "length {} != reference length {}",
                estimate.len(),
                reference.len()
            ),
        });
    }
    if estimate.is_empty() {
        return Err(Error::EmptyInput("spectral_distortion"));
    }
    let nfft = next_pow2(std::cmp::max(4096, estimate.len()));
    let se = magnitude_spectrum(estimate, nfft);
    let sr = magnitude_spectrum(reference, nfft);
    let df = fs / nfft as f64;
    let lo = (20.0 / df).ceil() as usize;
    let hi = ((4000.0 / df).floor() as usize).min(nfft / 2);
    let mut acc = 0.0;
    for k in lo..=hi {
        if sr[k] < 1e-300 {
            return Err(Error::SpectralZero {
                bin: k,
                magnitude: sr[k],
            });
        }
        let num = se[k].max(1e-300);
        let term = 20.0 * (num / sr[k]).log10();
        acc += term * term * df;
    }
    Ok((acc * 2.0 / 8000.0).sqrt())
}
