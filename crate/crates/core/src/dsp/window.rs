use crate::{Error, Result};

/// Symmetric Blackman window of the given length.
///
/// Endpoints are (numerically) zero, the midpoint of an odd-length window is
/// exactly 1.
pub fn blackman(length: usize) -> Result<Vec<f64>> {
    if length < 4 {
        return Err(Error::TooShort {
            context: "blackman window",
            needed: 4,
            got: length,
        });
    }
    let denom = (length - 1) as f64;
    Ok((0..length)
        .map(|k| {
            let phase = std::f64::consts::PI * k as f64 / denom;
            0.42 - 0.5 * (2.0 * phase).cos() + 0.08 * (4.0 * phase).cos()
        })
        .collect())
}
