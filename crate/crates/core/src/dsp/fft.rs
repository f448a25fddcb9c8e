//! Thin wrappers over rustfft with per-thread plan caching.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANS: RefCell<PlanCache> = RefCell::new(PlanCache::default());
}

#[derive(Default)]
struct PlanCache {
    planner: Option<FftPlanner<f64>>,
    forward: HashMap<usize, Arc<dyn Fft<f64>>>,
    inverse: HashMap<usize, Arc<dyn Fft<f64>>>,
}

impl PlanCache {
    fn forward(&mut self, n: usize) -> Arc<dyn Fft<f64>> {
        let planner = self.planner.get_or_insert_with(FftPlanner::new);
        self.forward
            .entry(n)
            .or_insert_with(|| planner.plan_fft_forward(n))
            .clone()
    }

    fn inverse(&mut self, n: usize) -> Arc<dyn Fft<f64>> {
        let planner = self.planner.get_or_insert_with(FftPlanner::new);
        self.inverse
            .entry(n)
            .or_insert_with(|| planner.plan_fft_inverse(n))
            .clone()
    }
}

/// In-place forward FFT.
pub fn fft_in_place(buf: &mut [Complex<f64>]) {
    let plan = PLANS.with(|p| p.borrow_mut().forward(buf.len()));
    plan.process(buf);
}

/// In-place inverse FFT, normalized by 1/N.
pub fn ifft_in_place(buf: &mut [Complex<f64>]) {
    let plan = PLANS.with(|p| p.borrow_mut().inverse(buf.len()));
    plan.process(buf);
    let scale = 1.0 / buf.len() as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

/// FFT of a real signal zero-padded (or time-aliased) to `n` points.
///
/// Signals longer than `n` are folded modulo `n` before transforming, which
/// evaluates the discrete-time Fourier transform of the full signal at the
/// `n` grid frequencies.
pub fn fft_real(signal: &[f64], n: usize) -> Vec<Complex<f64>> {
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    for (i, &x) in signal.iter().enumerate() {
        buf[i % n].re += x;
    }
    fft_in_place(&mut buf);
    buf
}

/// Magnitude spectrum of a real signal on an `n`-point grid.
pub fn magnitude_spectrum(signal: &[f64], n: usize) -> Vec<f64> {
    fft_real(signal, n).iter().map(|c| c.norm()).collect()
}

/// Smallest power of two that is >= `n`.
pub fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_identity() {
        let x = [1.0, -2.0, 3.5, 0.25, -1.0, 0.0, 2.0, -0.5];
        let mut buf = fft_real(&x, 8);
        ifft_in_place(&mut buf);
        for (a, b) in buf.iter().zip(x.iter()) {
            assert!((a.re - b).abs() < 1e-12);
            assert!(a.im.abs() < 1e-12);
        }
    }

    #[test]
    fn impulse_has_flat_spectrum() {
        let spec = magnitude_spectrum(&[1.0, 0.0, 0.0, 0.0], 16);
        for m in spec {
            assert!((m - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn folding_matches_dtft_subsampling() {
        // DTFT of a long signal at 2*pi*k/n equals the DFT of the signal
        // folded modulo n.
        let signal: Vec<f64> = (0..23).map(|i| (i as f64 * 0.7).sin()).collect();
        let n = 8;
        let folded = fft_real(&signal, n);
        for k in 0..n {
            let w = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            let mut direct = Complex::new(0.0, 0.0);
            for (i, &x) in signal.iter().enumerate() {
                direct += Complex::from_polar(x, -w * i as f64);
            }
            assert!((direct - folded[k]).norm() < 1e-10);
        }
    }
}
