//! Discrete all-pole modeling: all-pole fits to sampled power spectra under
//! the discrete Itakura-Saito distance, with LPC initialization and a damped
//! fixed-point update.

use nalgebra::{DMatrix, DVector};
use rustfft::num_complex::Complex;

use super::fft::{fft_real, ifft_in_place};
use super::lpc::lpc;
use crate::vocal_tract::{poly_is_stable, ARModel};
use crate::{Error, Result};

/// Outcome of a discrete all-pole fit.
#[derive(Debug, Clone)]
pub struct DapFit {
    pub model: ARModel,
    /// False when `max_iter` was reached before the tolerance.
    pub converged: bool,
    pub iterations: usize,
    /// Final Itakura-Saito distance on the fitting grid.
    pub distance: f64,
    /// Distance after initialization and after every accepted update.
    pub history: Vec<f64>,
}

/// Itakura-Saito distance between a sampled power spectrum and the all-pole
/// model `sigma^2 / |A|^2` with the gain chosen optimally.
///
/// With the optimal gain the distance reduces to
/// `ln(mean(P |A|^2)) - mean(ln(P |A|^2))`, which is nonnegative by Jensen's
/// inequality and zero only for an exact fit.
fn is_distance(power: &[f64], a_mag_sq: &[f64]) -> f64 {
    let n = power.len() as f64;
    let mut mean = 0.0;
    let mut mean_log = 0.0;
    for (&p, &m) in power.iter().zip(a_mag_sq.iter()) {
        let v = p * m;
        mean += v;
        mean_log += v.ln();
    }
    mean /= n;
    mean_log /= n;
    mean.ln() - mean_log
}

fn a_mag_sq(coeffs: &[f64], nbins: usize) -> Vec<f64> {
    let mut a = Vec::with_capacity(coeffs.len() + 1);
    a.push(1.0);
    a.extend_from_slice(coeffs);
    fft_real(&a, nbins).iter().map(|c| c.norm_sqr()).collect()
}

fn optimal_gain_sq(power: &[f64], a_mag_sq: &[f64]) -> f64 {
    power
        .iter()
        .zip(a_mag_sq.iter())
        .map(|(&p, &m)| p * m)
        .sum::<f64>()
        / power.len() as f64
}

/// Fit an all-pole model of the given order to the power spectrum of
/// `signal` sampled at `nbins` uniform frequencies.
///
/// Signals longer than `nbins` are treated through their exact DTFT samples
/// on the grid. Iterates from the LPC solution; the distance is
/// non-increasing across iterations, so the result never does worse than
/// LPC on the same bins.
pub fn dap_fit(
    signal: &[f64],
    order: usize,
    nbins: usize,
    tol: f64,
    max_iter: usize,
) -> Result<DapFit> {
    if signal.len() < order + 2 {
        return Err(Error::TooShort {
            context: "dap_fit",
            needed: order + 2,
            got: signal.len(),
        });
    }
    if nbins < 2 * order.max(1) {
        return Err(Error::InvalidParam {
            name: "nbins",
            reason: format!("need at least 2*order = {}, got {nbins}", 2 * order),
        });
    }
    let scale = 1.0 / signal.len() as f64;
    let power: Vec<f64> = fft_real(signal, nbins)
        .iter()
        .map(|c| c.norm_sqr() * scale)
        .collect();
    dap_fit_spectrum(&power, order, tol, max_iter, signal)
}

/// Fit an all-pole model directly to a sampled power spectrum.
///
/// `init_signal` provides the LPC initializer; pass the time signal the
/// spectrum came from (or any signal with a comparable envelope).
pub fn dap_fit_spectrum(
    power: &[f64],
    order: usize,
    tol: f64,
    max_iter: usize,
    init_signal: &[f64],
) -> Result<DapFit> {
    let nbins = power.len();
    let peak = power.iter().cloned().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(Error::DegenerateSignal("all-zero spectrum"));
    }
    if let Some(bin) = power.iter().position(|&p| p < 1e-300) {
        return Err(Error::SpectralZero {
            bin,
            magnitude: power[bin],
        });
    }

    // Grid autocorrelation of the power spectrum, for the normal equations.
    let mut buf: Vec<Complex<f64>> = power.iter().map(|&p| Complex::new(p, 0.0)).collect();
    ifft_in_place(&mut buf);
    let r: Vec<f64> = buf.iter().take(order + 1).map(|c| c.re).collect();

    let mut a = lpc(init_signal, order)?.coeffs().to_vec();
    let mut mag = a_mag_sq(&a, nbins);
    let mut dist = is_distance(&power, &mag);
    let mut history = vec![dist];
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..max_iter {
        iterations += 1;
        let candidate = match fixed_point_step(&power, &r, &a, &mag, nbins, order) {
            Some(c) => c,
            None => {
                converged = true;
                break;
            }
        };
        // Damped acceptance: walk back toward the current iterate until the
        // distance does not increase and the model stays stable.
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..50 {
            let trial: Vec<f64> = a
                .iter()
                .zip(candidate.iter())
                .map(|(&cur, &new)| cur + lambda * (new - cur))
                .collect();
            if poly_is_stable(&trial) {
                let trial_mag = a_mag_sq(&trial, nbins);
                let trial_dist = is_distance(&power, &trial_mag);
                if trial_dist <= dist {
                    accepted = Some((trial, trial_mag, trial_dist));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let Some((trial, trial_mag, trial_dist)) = accepted else {
            // No descent direction left: already at a stationary point.
            converged = true;
            break;
        };
        let decrease = dist - trial_dist;
        a = trial;
        mag = trial_mag;
        dist = trial_dist;
        history.push(dist);
        if decrease <= tol * dist.abs().max(1e-12) {
            converged = true;
            break;
        }
    }

    let gain = optimal_gain_sq(&power, &mag).sqrt();
    Ok(DapFit {
        model: ARModel::new(a, gain)?,
        converged,
        iterations,
        distance: dist,
        history,
    })
}

/// One fixed-point step of the normal equations
/// `sum_k a_k R(m-k) = sigma^2 c(m) - R(m)` where `c` is the grid inverse
/// transform of `1/A`.
fn fixed_point_step(
    power: &[f64],
    r: &[f64],
    a: &[f64],
    mag: &[f64],
    nbins: usize,
    order: usize,
) -> Option<Vec<f64>> {
    if order == 0 {
        return None;
    }
    let sigma_sq = optimal_gain_sq(power, mag);
    let mut a_full = Vec::with_capacity(order + 1);
    a_full.push(1.0);
    a_full.extend_from_slice(a);
    let a_spec = fft_real(&a_full, nbins);
    let mut inv: Vec<Complex<f64>> = a_spec.iter().map(|&c| c.finv()).collect();
    ifft_in_place(&mut inv);

    let mut m = DMatrix::<f64>::zeros(order, order);
    let mut rhs = DVector::<f64>::zeros(order);
    for i in 0..order {
        for j in 0..order {
            m[(i, j)] = r[(i as isize - j as isize).unsigned_abs()];
        }
        rhs[i] = sigma_sq * inv[i + 1].re - r[i + 1];
    }
    let lu = m.lu();
    let sol = lu.solve(&rhs)?;
    let out: Vec<f64> = sol.iter().cloned().collect();
    if out.iter().any(|v| !v.is_finite()) {
        return None;
    }
    Some(out)
}
