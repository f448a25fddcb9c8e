//! Autocorrelation-method linear prediction.

use crate::vocal_tract::ARModel;
use crate::{Error, Result};

/// Biased autocorrelation `r(k) = sum_n x(n) x(n+k)` for `k = 0..=maxlag`.
pub fn autocorrelation(signal: &[f64], maxlag: usize) -> Vec<f64> {
    (0..=maxlag)
        .map(|k| {
            signal[..signal.len() - k]
                .iter()
                .zip(signal[k..].iter())
                .map(|(a, b)| a * b)
                .sum()
        })
        .collect()
}

/// Levinson-Durbin recursion on an autocorrelation sequence.
///
/// Returns the prediction coefficients `a_1..a_p` of `A(z)`, the final
/// prediction error energy and the reflection coefficients.
pub fn levinson(r: &[f64], order: usize) -> Result<(Vec<f64>, f64, Vec<f64>)> {
    assert!(r.len() > order, "need order+1 autocorrelation lags");
    if !(r[0] > 0.0) {
        return Err(Error::DegenerateSignal("zero-lag autocorrelation is not positive"));
    }
    let mut a = vec![0.0f64; order];
    let mut refl = Vec::with_capacity(order);
    let mut err = r[0];
    for m in 0..order {
        let mut acc = r[m + 1];
        for i in 0..m {
            acc += a[i] * r[m - i];
        }
        if !(err > 0.0) {
            return Err(Error::DegenerateSignal("singular autocorrelation matrix"));
        }
        let k = -acc / err;
        if !(k.abs() < 1.0) {
            return Err(Error::DegenerateSignal("reflection coefficient outside (-1, 1)"));
        }
        refl.push(k);
        a[m] = k;
        for i in 0..m / 2 + m % 2 {
            let tmp = a[i] + k * a[m - 1 - i];
            a[m - 1 - i] += k * a[i];
            a[i] = tmp;
        }
        err *= 1.0 - k * k;
    }
    Ok((a, err, refl))
}

/// Autocorrelation-method LPC.
///
/// The returned model is `gain / A(z)` with `gain^2` the per-sample
/// prediction error power, so the model magnitude spectrum is directly
/// comparable with `|X|^2 / N` power spectra.
pub fn lpc(signal: &[f64], order: usize) -> Result<ARModel> {
    if signal.len() <= order {
        return Err(Error::TooShort {
            context: "lpc",
            needed: order + 1,
            got: signal.len(),
        });
    }
    let first = signal[0];
    if signal.iter().all(|&x| x == first) && (first == 0.0 || signal.len() > 1) {
        return Err(Error::DegenerateSignal("constant signal"));
    }
    let r = autocorrelation(signal, order);
    if !(r[0] > 0.0) {
        return Err(Error::DegenerateSignal("signal is identically zero"));
    }
    let (a, err, _) = levinson(&r, order)?;
    let gain = (err / signal.len() as f64).sqrt();
    ARModel::new(a, gain)
}
