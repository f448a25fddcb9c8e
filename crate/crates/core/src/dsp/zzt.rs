//! Zeros of the z-transform: factor a frame's z-transform polynomial and
//! partition the roots with the unit circle as the discriminant boundary.

use nalgebra::DMatrix;
use rustfft::num_complex::Complex;

use super::Frame;
use crate::{Error, Result};

/// Relative radius band around |z| = 1 inside which a root is considered
/// boundary-ambiguous. Such roots are assigned to the inside set.
pub const BOUNDARY_BAND: f64 = 1e-8;

/// The full root set of a frame's z-transform polynomial.
#[derive(Debug, Clone)]
pub struct ZztSet {
    zeros: Vec<Complex<f64>>,
    leading: f64,
    boundary_count: usize,
}

impl ZztSet {
    pub fn zeros(&self) -> &[Complex<f64>] {
        &self.zeros
    }

    /// First nonzero sample x(0) of the (trimmed) frame.
    pub fn leading(&self) -> f64 {
        self.leading
    }

    /// Number of roots inside the ambiguity band around the unit circle.
    pub fn boundary_count(&self) -> usize {
        self.boundary_count
    }

    /// Roots strictly outside the unit circle (maximum-phase set).
    pub fn max_phase_roots(&self) -> Vec<Complex<f64>> {
        self.zeros
            .iter()
            .cloned()
            .filter(|z| z.norm() > 1.0 + BOUNDARY_BAND)
            .collect()
    }

    /// Roots inside the unit circle, including boundary-ambiguous ones.
    pub fn min_phase_roots(&self) -> Vec<Complex<f64>> {
        self.zeros
            .iter()
            .cloned()
            .filter(|z| z.norm() <= 1.0 + BOUNDARY_BAND)
            .collect()
    }
}

/// All `N-1` roots of the frame's z-transform via companion-matrix
/// eigenvalues.
///
/// Leading and trailing samples below `1e-12` of the frame peak are treated
/// as zeros: leading ones are trimmed (a pure time shift), trailing ones
/// contribute exact roots at the origin.
pub fn zzt_roots(frame: &Frame) -> Result<ZztSet> {
    roots_of_sequence(frame.samples())
}

pub(crate) fn roots_of_sequence(x: &[f64]) -> Result<ZztSet> {
    let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(peak > 0.0) {
        return Err(Error::DegenerateSignal("all-zero frame has no z-transform roots"));
    }
    let eps = 1e-12 * peak;
    let first = x.iter().position(|v| v.abs() > eps).unwrap();
    let last = x.iter().rposition(|v| v.abs() > eps).unwrap();
    let trailing = x.len() - 1 - last;
    let trimmed = &x[first..=last];
    if trimmed.len() < 2 {
        return Err(Error::TooShort {
            context: "zzt_roots",
            needed: 2,
            got: trimmed.len(),
        });
    }

    let degree = trimmed.len() - 1;
    let lead = trimmed[0];
    // Monic coefficients of x(0) z^d + x(1) z^(d-1) + ... + x(d).
    let monic: Vec<f64> = trimmed[1..].iter().map(|&c| c / lead).collect();

    let mut companion = DMatrix::<f64>::zeros(degree, degree);
    for i in 1..degree {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..degree {
        companion[(i, degree - 1)] = -monic[degree - 1 - i];
    }
    balance_in_place(&mut companion);
    let eig = companion.complex_eigenvalues();

    let mut zeros: Vec<Complex<f64>> = eig.iter().cloned().collect();
    zeros.extend(std::iter::repeat(Complex::new(0.0, 0.0)).take(trailing));
    let boundary_count = zeros
        .iter()
        .filter(|z| (z.norm() - 1.0).abs() <= BOUNDARY_BAND)
        .count();

    Ok(ZztSet {
        zeros,
        leading: lead,
        boundary_count,
    })
}

/// Parlett-Reinsch balancing: a diagonal similarity transform with powers of
/// two that equalizes row and column norms. Eigenvalues are unchanged, their
/// numerical conditioning improves substantially for companion matrices of
/// tapered frames.
fn balance_in_place(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    let radix: f64 = 2.0;
    let sq = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    r += a[(i, j)].abs();
                    c += a[(j, i)].abs();
                }
            }
            if r == 0.0 || c == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            while c < r / radix {
                f *= radix;
                c *= sq;
            }
            while c >= r * radix {
                f /= radix;
                c /= sq;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= g;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

/// Expand a monic polynomial from its roots (coefficients of z^d .. z^0).
pub fn poly_from_roots(roots: &[Complex<f64>]) -> Vec<Complex<f64>> {
    let mut coeffs = vec![Complex::new(1.0, 0.0)];
    for &r in roots {
        coeffs.push(Complex::new(0.0, 0.0));
        for i in (1..coeffs.len()).rev() {
            let prev = coeffs[i - 1];
            coeffs[i] = coeffs[i] - r * prev;
        }
    }
    coeffs
}

/// Relative reconstruction error: rebuild the frame polynomial from the root
/// set and compare against the original samples.
pub fn reconstruction_error(x: &[f64], set: &ZztSet) -> f64 {
    let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let eps = 1e-12 * peak;
    let first = x.iter().position(|v| v.abs() > eps).unwrap_or(0);
    let rebuilt = poly_from_roots(set.zeros());
    let mut err = 0.0f64;
    for (i, &c) in rebuilt.iter().enumerate() {
        let orig = x.get(first + i).cloned().unwrap_or(0.0);
        err = err.max((c * set.leading() - Complex::new(orig, 0.0)).norm());
    }
    err / peak
}

/// Reconstruct the maximum-phase component from the root set.
///
/// Returns `(pulse, gain)` where `pulse[m]` is the component value at time
/// `-(M_o - m)`, i.e. the pulse ends at time zero with `pulse[M_o] = gain`,
/// and `gain = x(0) * prod(-Z_max,k)`.
pub fn max_phase_signal(set: &ZztSet) -> (Vec<f64>, f64) {
    let max_roots = set.max_phase_roots();
    // Q(z) = prod (1 - z / Z_k) expanded in powers of z: q[m] is the
    // coefficient of z^m, i.e. the component value at time -m (unit gain).
    let mut q = vec![Complex::new(1.0, 0.0)];
    for r in &max_roots {
        let inv = Complex::new(1.0, 0.0) / r;
        q.push(Complex::new(0.0, 0.0));
        for i in (1..q.len()).rev() {
            let prev = q[i - 1];
            q[i] = q[i] - inv * prev;
        }
    }
    let gain = max_roots
        .iter()
        .fold(Complex::new(set.leading(), 0.0), |acc, z| acc * (-z));
    // Reverse so the pulse is in natural time order ending at index M_o.
    let mut pulse: Vec<f64> = q.iter().rev().map(|c| (c * gain).re).collect();
    if let Some(last) = pulse.last_mut() {
        // Exact by construction: q[0] = 1.
        *last = gain.re;
    }
    (pulse, gain.re)
}

/// Complex cepstrum evaluated from the root set (the analytic route):
///
/// `c(0) = ln|gain|`, `c(n<0) = sum Z_max^n / n`, `c(n>0) = -sum Z_min^n / n`.
///
/// The linear phase and overall sign are normalized away exactly as in the
/// FFT-based cepstrum, so both routes agree bin for bin up to grid aliasing.
pub fn cepstrum_from_roots(set: &ZztSet, max_quefrency: usize) -> Vec<(isize, f64)> {
    let max_roots = set.max_phase_roots();
    let min_roots = set.min_phase_roots();
    let gain = max_roots
        .iter()
        .fold(Complex::new(set.leading(), 0.0), |acc, z| acc * (-z));
    let mut out = Vec::with_capacity(2 * max_quefrency + 1);
    for n in -(max_quefrency as isize)..=(max_quefrency as isize) {
        let v = if n == 0 {
            gain.norm().ln()
        } else if n < 0 {
            let mut acc = Complex::new(0.0, 0.0);
            for z in &max_roots {
                acc += z.powi(n as i32);
            }
            acc.re / n as f64
        } else {
            let mut acc = Complex::new(0.0, 0.0);
            for z in &min_roots {
                // Roots exactly at the origin contribute nothing.
                if z.norm() > 0.0 {
                    acc += z.powi(n as i32);
                }
            }
            -acc.re / n as f64
        };
        out.push((n, v));
    }
    out
}
