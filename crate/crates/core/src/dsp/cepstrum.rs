//! Complex cepstrum with explicit phase unwrapping and linear-phase removal,
//! and reconstruction of the maximum-phase (anticausal) component.

use rustfft::num_complex::Complex;

use super::fft::{fft_in_place, ifft_in_place};
use super::Frame;
use crate::{Error, Result};

/// Real-valued complex cepstrum on an `nfft`-point quefrency grid.
///
/// Values are stored in transform order: quefrency `n >= 0` at index `n`,
/// `n < 0` at `nfft + n`. The analyzed signal is normalized to a positive DC
/// spectrum value before the complex log; `negated` records whether that
/// required a sign flip of the input.
#[derive(Debug, Clone)]
pub struct ComplexCepstrum {
    values: Vec<f64>,
    nfft: usize,
    negated: bool,
}

impl ComplexCepstrum {
    pub fn nfft(&self) -> usize {
        self.nfft
    }

    pub fn negated(&self) -> bool {
        self.negated
    }

    /// Cepstrum value at quefrency `n` in `[-nfft/2, nfft/2)`.
    pub fn at(&self, n: isize) -> f64 {
        let half = (self.nfft / 2) as isize;
        assert!(n >= -half && n < half, "quefrency out of range");
        let idx = n.rem_euclid(self.nfft as isize) as usize;
        self.values[idx]
    }

    /// Values in transform order.
    pub fn buffer(&self) -> &[f64] {
        &self.values
    }
}

/// Threshold phase unwrapping: remove jumps larger than pi between
/// consecutive bins by adding multiples of 2 pi.
pub fn unwrap_phase(phase: &mut [f64]) {
    use std::f64::consts::PI;
    let mut offset = 0.0;
    for k in 1..phase.len() {
        let prev = phase[k - 1];
        let mut d = phase[k] + offset - prev;
        while d > PI {
            offset -= 2.0 * PI;
            d -= 2.0 * PI;
        }
        while d < -PI {
            offset += 2.0 * PI;
            d += 2.0 * PI;
        }
        phase[k] += offset;
    }
}

fn validate_nfft(nfft: usize, frame_len: usize) -> Result<()> {
    if !nfft.is_power_of_two() || nfft < 4096 {
        return Err(Error::InvalidParam {
            name: "nfft",
            reason: format!("must be a power of two >= 4096, got {nfft}"),
        });
    }
    if nfft < 4 * frame_len {
        return Err(Error::InvalidParam {
            name: "nfft",
            reason: format!("must be >= 4x frame length ({frame_len}), got {nfft}"),
        });
    }
    Ok(())
}

/// Complex cepstrum of a GCI-centered frame.
///
/// The frame is rotated so its center sits at time zero; the remaining
/// integer linear phase is estimated from the unwrapped phase at Nyquist and
/// removed, which anchors the maximum-phase component so that it ends at the
/// frame center.
pub fn complex_cepstrum(frame: &Frame, nfft: usize) -> Result<ComplexCepstrum> {
    cepstrum_anchored(frame.samples(), frame.center(), nfft)
}

/// Complex cepstrum of a raw sequence with an explicit time-zero anchor.
pub fn cepstrum_anchored(x: &[f64], anchor: usize, nfft: usize) -> Result<ComplexCepstrum> {
    use std::f64::consts::PI;
    validate_nfft(nfft, x.len())?;
    assert!(anchor < x.len().max(1), "anchor outside sequence");

    let mut buf = vec![Complex::new(0.0, 0.0); nfft];
    for (i, &v) in x.iter().enumerate() {
        buf[(i + nfft - anchor) % nfft] = Complex::new(v, 0.0);
    }
    fft_in_place(&mut buf);

    let negated = buf[0].re < 0.0;
    if negated {
        for v in buf.iter_mut() {
            *v = -*v;
        }
    }

    let half = nfft / 2;
    let mut log_mag = vec![0.0; half + 1];
    let mut phase = vec![0.0; half + 1];
    for k in 0..=half {
        let m = buf[k].norm();
        if m < 1e-300 {
            return Err(Error::SpectralZero { bin: k, magnitude: m });
        }
        log_mag[k] = m.ln();
        phase[k] = buf[k].im.atan2(buf[k].re);
    }
    // DC is real and positive after sign normalization.
    phase[0] = 0.0;
    unwrap_phase(&mut phase);

    // The spectrum at Nyquist is real, so the unwrapped phase there is an
    // integer multiple of pi; that integer is the residual linear phase in
    // samples and removing it minimizes |phase at pi|.
    let shift = (phase[half] / PI).round();
    for (k, p) in phase.iter_mut().enumerate() {
        *p -= shift * 2.0 * PI * k as f64 / nfft as f64;
    }

    let mut log_spec = vec![Complex::new(0.0, 0.0); nfft];
    log_spec[0] = Complex::new(log_mag[0], 0.0);
    log_spec[half] = Complex::new(log_mag[half], phase[half]);
    for k in 1..half {
        let v = Complex::new(log_mag[k], phase[k]);
        log_spec[k] = v;
        log_spec[nfft - k] = v.conj();
    }
    ifft_in_place(&mut log_spec);

    Ok(ComplexCepstrum {
        values: log_spec.iter().map(|c| c.re).collect(),
        nfft,
        negated,
    })
}

/// Reconstruct the maximum-phase component from a cepstrum.
///
/// Positive quefrencies (and the Nyquist bin) are zeroed, quefrency zero is
/// retained with the maximum-phase part, and the chain
/// FFT -> exp -> IFFT maps the truncated cepstrum back to a time signal.
/// The result is in transform order (anticausal samples at the end of the
/// buffer) with the input's sign restored.
pub fn max_phase_component(cc: &ComplexCepstrum) -> Vec<f64> {
    let nfft = cc.nfft();
    let half = nfft / 2;
    let mut buf: Vec<Complex<f64>> = cc
        .buffer()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if (1..=half).contains(&i) {
                Complex::new(0.0, 0.0)
            } else {
                Complex::new(v, 0.0)
            }
        })
        .collect();
    fft_in_place(&mut buf);
    for v in buf.iter_mut() {
        *v = v.exp();
    }
    ifft_in_place(&mut buf);
    let sign = if cc.negated() { -1.0 } else { 1.0 };
    buf.iter().map(|c| sign * c.re).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_min_phase_zero_matches_series_expansion() {
        // X(z) = 1 - 0.5 z^-1: cepstrum -0.5^n / n at n >= 1, zero at n < 0.
        let c = cepstrum_anchored(&[1.0, -0.5], 0, 4096).unwrap();
        assert!((c.at(1).abs() - 0.5).abs() < 1e-3, "got {}", c.at(1));
        assert!((c.at(2).abs() - 0.125).abs() < 1e-3);
        assert!((c.at(1) + 0.5).abs() < 1e-3, "sign convention: -a^n/n");
        assert!((c.at(2) + 0.125).abs() < 1e-3);
        assert!(c.at(0).abs() < 1e-3, "unit gain has zero quefrency-zero bin");
        for n in 1..=32 {
            assert!(c.at(-n).abs() < 1e-3, "anticausal part must vanish");
        }
    }

    #[test]
    fn time_reversed_counterpart_is_anticausal() {
        // [-0.5, 1] with the anchor on the trailing sample is the
        // maximum-phase mirror of the previous test.
        let c = cepstrum_anchored(&[-0.5, 1.0], 1, 4096).unwrap();
        assert!((c.at(-1) + 0.5).abs() < 1e-3, "got {}", c.at(-1));
        assert!((c.at(-2) + 0.125).abs() < 1e-3);
        for n in 1..=32 {
            assert!(c.at(n).abs() < 1e-3, "causal part must vanish");
        }
    }

    #[test]
    fn convolution_maps_to_addition() {
        let a = [1.0, -0.5];
        let b = [1.0, 0.3, 0.1];
        let mut conv = vec![0.0; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            for (j, &bj) in b.iter().enumerate() {
                conv[i + j] += ai * bj;
            }
        }
        let ca = cepstrum_anchored(&a, 0, 4096).unwrap();
        let cb = cepstrum_anchored(&b, 0, 4096).unwrap();
        let cc = cepstrum_anchored(&conv, 0, 4096).unwrap();
        for n in -64..64 {
            assert!(
                (cc.at(n) - ca.at(n) - cb.at(n)).abs() < 1e-6,
                "mismatch at quefrency {n}"
            );
        }
    }

    #[test]
    fn grid_zero_is_reported_with_bin() {
        // x = [1, -1] has an exact spectral zero at DC.
        match cepstrum_anchored(&[1.0, -1.0], 0, 4096) {
            Err(Error::SpectralZero { bin, .. }) => assert_eq!(bin, 0),
            other => panic!("expected spectral zero, got {other:?}"),
        }
    }

    #[test]
    fn max_phase_round_trip_on_pure_anticausal_input() {
        // A reversed minimum-phase sequence anchored on its last sample is
        // purely maximum-phase, so the reconstruction must reproduce it.
        let x = [0.25, 0.6, 1.0];
        let c = cepstrum_anchored(&x, 2, 4096).unwrap();
        let rec = max_phase_component(&c);
        let nfft = c.nfft();
        assert!((rec[0] - 1.0).abs() < 1e-6);
        assert!((rec[nfft - 1] - 0.6).abs() < 1e-6);
        assert!((rec[nfft - 2] - 0.25).abs() < 1e-6);
        // causal side empty
        for n in 1..32 {
            assert!(rec[n].abs() < 1e-6);
        }
    }

    #[test]
    fn sign_flip_is_restored() {
        let x = [-0.25, -0.6, -1.0];
        let c = cepstrum_anchored(&x, 2, 4096).unwrap();
        assert!(c.negated());
        let rec = max_phase_component(&c);
        let nfft = c.nfft();
        assert!((rec[0] + 1.0).abs() < 1e-6);
        assert!((rec[nfft - 1] + 0.6).abs() < 1e-6);
    }

    #[test]
    fn nfft_constraints_enforced() {
        assert!(cepstrum_anchored(&[1.0, 0.5], 0, 2048).is_err());
        assert!(cepstrum_anchored(&[1.0, 0.5], 0, 4100).is_err());
        let long = vec![1.0; 2000];
        assert!(cepstrum_anchored(&long, 0, 4096).is_err());
    }
}
