//! Running integration and differencing.

use crate::{Error, Result};

/// Leaky running sum: `y(n) = leak * y(n-1) + x(n)`.
///
/// `leak = 1.0` is an exact cumulative sum; values slightly below one damp
/// low-frequency drift when reconstructing flow from a noisy derivative.
pub fn integrate(signal: &[f64], leak: f64) -> Result<Vec<f64>> {
    if !(leak > 0.9 && leak <= 1.0) {
        return Err(Error::InvalidParam {
            name: "leak",
            reason: format!("must be in (0.9, 1.0], got {leak}"),
        });
    }
    let mut y = Vec::with_capacity(signal.len());
    let mut state = 0.0;
    for &x in signal {
        state = leak * state + x;
        y.push(state);
    }
    Ok(y)
}

/// First difference: `y(0) = x(0)`, `y(n) = x(n) - x(n-1)`.
pub fn differentiate(signal: &[f64]) -> Vec<f64> {
    let mut y = Vec::with_capacity(signal.len());
    let mut prev = 0.0;
    for &x in signal {
        y.push(x - prev);
        prev = x;
    }
    y
}
