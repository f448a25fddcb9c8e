//! All-pole vocal tract models: vowel presets, synthesis and inverse
//! filtering, and SNR-controlled additive noise.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{Error, Result};

/// All-pole filter `gain / A(z)` with `A(z) = 1 + sum a_k z^-k`.
///
/// Stability (all roots of `A` strictly inside the unit circle) is checked at
/// construction. An empty coefficient vector is the identity filter scaled
/// by `gain`.
#[derive(Debug, Clone, PartialEq)]
pub struct ARModel {
    coeffs: Vec<f64>,
    gain: f64,
}

impl ARModel {
    pub fn new(coeffs: Vec<f64>, gain: f64) -> Result<Self> {
        if !gain.is_finite() || gain <= 0.0 {
            return Err(Error::InvalidParam {
                name: "gain",
                reason: format!("must be finite and positive, got {gain}"),
            });
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParam {
                name: "coeffs",
                reason: "non-finite coefficient".into(),
            });
        }
        if !poly_is_stable(&coeffs) {
            return Err(Error::InvalidParam {
                name: "coeffs",
                reason: "A(z) has a root on or outside the unit circle".into(),
            });
        }
        Ok(Self { coeffs, gain })
    }

    /// Identity filter with the given gain.
    pub fn identity(gain: f64) -> Result<Self> {
        Self::new(Vec::new(), gain)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficients `a_1..a_p` of `A(z)`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    /// Magnitude of `A` on an `n`-point frequency grid.
    pub fn a_magnitude(&self, n: usize) -> Vec<f64> {
        let mut a = Vec::with_capacity(self.coeffs.len() + 1);
        a.push(1.0);
        a.extend_from_slice(&self.coeffs);
        crate::dsp::fft::magnitude_spectrum(&a, n)
    }
}

/// Schur-Cohn stability test on a monic polynomial `1 + sum a_k z^-k`.
///
/// Steps the order down through reflection coefficients; the polynomial has
/// all roots strictly inside the unit circle iff every |k| < 1.
pub(crate) fn poly_is_stable(coeffs: &[f64]) -> bool {
    let mut a = coeffs.to_vec();
    while let Some(&k) = a.last() {
        if !(k.abs() < 1.0) {
            return false;
        }
        let p = a.len() - 1;
        let denom = 1.0 - k * k;
        let prev: Vec<f64> = (0..p)
            .map(|i| (a[i] - k * a[p - 1 - i]) / denom)
            .collect();
        if prev.iter().any(|c| !c.is_finite()) {
            return false;
        }
        a = prev;
    }
    true
}

/// One vowel: an ordered list of (center frequency, bandwidth) pairs in Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct VowelPreset {
    pub label: String,
    pub formants: Vec<(f64, f64)>,
}

impl VowelPreset {
    pub fn new(label: impl Into<String>, formants: Vec<(f64, f64)>) -> Result<Self> {
        for w in formants.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidParam {
                    name: "formants",
                    reason: "center frequencies must be strictly increasing".into(),
                });
            }
        }
        if formants.iter().any(|&(f, b)| f <= 0.0 || b <= 0.0) {
            return Err(Error::InvalidParam {
                name: "formants",
                reason: "frequencies and bandwidths must be positive".into(),
            });
        }
        Ok(Self {
            label: label.into(),
            formants,
        })
    }

    /// First formant frequency in Hz.
    pub fn f1(&self) -> f64 {
        self.formants.first().map(|&(f, _)| f).unwrap_or(0.0)
    }
}

/// The 14 built-in vowel presets, ordered by first formant frequency.
///
/// Values are typical adult female formant targets; the set spans F1 from
/// below 300 Hz to above 800 Hz so that first-formant trends can be swept.
pub fn vowel_presets() -> Vec<VowelPreset> {
    let table: [(&str, [(f64, f64); 4]); 14] = [
        ("i", [(280.0, 90.0), (2250.0, 110.0), (2890.0, 140.0), (3600.0, 180.0)]),
        ("y", [(300.0, 90.0), (1900.0, 110.0), (2500.0, 140.0), (3400.0, 180.0)]),
        ("u", [(310.0, 90.0), (870.0, 110.0), (2250.0, 140.0), (3260.0, 180.0)]),
        ("ih", [(360.0, 90.0), (1920.0, 110.0), (2570.0, 140.0), (3500.0, 180.0)]),
        ("uh", [(430.0, 90.0), (1100.0, 110.0), (2280.0, 140.0), (3250.0, 180.0)]),
        ("e", [(450.0, 90.0), (2050.0, 110.0), (2650.0, 140.0), (3500.0, 180.0)]),
        ("o", [(480.0, 90.0), (920.0, 110.0), (2370.0, 140.0), (3300.0, 180.0)]),
        ("schwa", [(520.0, 90.0), (1450.0, 110.0), (2450.0, 140.0), (3300.0, 180.0)]),
        ("eh", [(580.0, 90.0), (1800.0, 110.0), (2550.0, 140.0), (3450.0, 180.0)]),
        ("oh", [(600.0, 90.0), (900.0, 110.0), (2430.0, 140.0), (3250.0, 180.0)]),
        ("vv", [(640.0, 90.0), (1200.0, 110.0), (2390.0, 140.0), (3300.0, 180.0)]),
        ("ae", [(710.0, 90.0), (1750.0, 110.0), (2480.0, 140.0), (3400.0, 180.0)]),
        ("aa", [(780.0, 90.0), (1150.0, 110.0), (2450.0, 140.0), (3300.0, 180.0)]),
        ("a", [(850.0, 90.0), (1300.0, 110.0), (2500.0, 140.0), (3350.0, 180.0)]),
    ];
    table
        .iter()
        .map(|(label, formants)| VowelPreset::new(*label, formants.to_vec()).unwrap())
        .collect()
}

/// Look up a built-in preset by label.
pub fn vowel_preset(label: &str) -> Option<VowelPreset> {
    vowel_presets().into_iter().find(|p| p.label == label)
}

/// Build an all-pole model from formant targets.
///
/// Each (F, B) pair places a conjugate pole pair at
/// `exp(-pi B / fs) * exp(+-j 2 pi F / fs)`; remaining coefficients are zero.
pub fn ar_from_formants(preset: &VowelPreset, fs: f64, order: usize) -> Result<ARModel> {
    let nyquist = fs / 2.0;
    if 2 * preset.formants.len() > order {
        return Err(Error::OrderTooSmall {
            order,
            reason: format!("{} formant pairs need order {}", preset.formants.len(), 2 * preset.formants.len()),
        });
    }
    for &(f, _) in &preset.formants {
        if f >= nyquist {
            return Err(Error::FormantAboveNyquist {
                frequency: f,
                nyquist,
            });
        }
    }
    // Expand prod (1 - 2 r cos(theta) z^-1 + r^2 z^-2).
    let mut a = vec![1.0];
    for &(f, b) in &preset.formants {
        let r = (-std::f64::consts::PI * b / fs).exp();
        let theta = 2.0 * std::f64::consts::PI * f / fs;
        let quad = [1.0, -2.0 * r * theta.cos(), r * r];
        let mut next = vec![0.0; a.len() + 2];
        for (i, &ai) in a.iter().enumerate() {
            for (j, &qj) in quad.iter().enumerate() {
                next[i + j] += ai * qj;
            }
        }
        a = next;
    }
    let mut coeffs = a[1..].to_vec();
    coeffs.resize(order, 0.0);
    ARModel::new(coeffs, 1.0)
}

/// All-pole synthesis: `y(n) = gain x(n) - sum a_k y(n-k)`, zero initial state.
pub fn filter(signal: &[f64], model: &ARModel) -> Vec<f64> {
    let a = model.coeffs();
    let mut y = vec![0.0; signal.len()];
    for n in 0..signal.len() {
        let mut acc = model.gain() * signal[n];
        for (k, &ak) in a.iter().enumerate() {
            if n > k {
                acc -= ak * y[n - 1 - k];
            }
        }
        y[n] = acc;
    }
    y
}

/// FIR inverse of [`filter`]: `y(n) = (x(n) + sum a_k x(n-k)) / gain`.
pub fn inverse_filter(signal: &[f64], model: &ARModel) -> Vec<f64> {
    let a = model.coeffs();
    let inv_gain = 1.0 / model.gain();
    let mut y = vec![0.0; signal.len()];
    for n in 0..signal.len() {
        let mut acc = signal[n];
        for (k, &ak) in a.iter().enumerate() {
            if n > k {
                acc += ak * signal[n - 1 - k];
            }
        }
        y[n] = acc * inv_gain;
    }
    y
}

/// Add white Gaussian noise at an exact signal-to-noise ratio.
///
/// The generated noise is rescaled so the realized power ratio matches
/// `snr_db`; the result is deterministic for a given seed.
pub fn add_noise(signal: &[f64], snr_db: f64, seed: u64) -> Result<Vec<f64>> {
    let p_signal = signal.iter().map(|x| x * x).sum::<f64>() / signal.len().max(1) as f64;
    if !(p_signal > 0.0) {
        return Err(Error::DegenerateSignal("add_noise needs positive energy"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise: Vec<f64> = (0..signal.len())
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    let p_noise = noise.iter().map(|x| x * x).sum::<f64>() / noise.len() as f64;
    let target = p_signal * 10f64.powf(-snr_db / 10.0);
    let scale = (target / p_noise).sqrt();
    Ok(signal
        .iter()
        .zip(noise.iter())
        .map(|(&s, &w)| s + scale * w)
        .collect())
}
