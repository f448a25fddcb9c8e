//! Shared numerical kernels: windows, linear prediction, discrete all-pole
//! modeling, complex cepstrum, z-transform root factoring and integration.

pub mod cepstrum;
pub mod dap;
pub mod fft;
pub mod lpc;
pub mod ops;
pub mod window;
pub mod zzt;

pub use cepstrum::{cepstrum_anchored, complex_cepstrum, max_phase_component, ComplexCepstrum};
pub use dap::{dap_fit, dap_fit_spectrum, DapFit};
pub use lpc::{autocorrelation, levinson, lpc};
pub use ops::{differentiate, integrate};
pub use window::blackman;
pub use zzt::{zzt_roots, ZztSet};

use crate::{Error, Result};

/// A windowable, GCI-anchored analysis segment.
///
/// Mixed-phase analysis frames are two pitch periods long with the glottal
/// closure instant at the midpoint; both properties are checked here.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    samples: Vec<f64>,
    fs: f64,
    t0: usize,
}

impl Frame {
    pub fn new(samples: Vec<f64>, fs: f64, t0: usize) -> Result<Self> {
        if t0 < 2 {
            return Err(Error::InvalidParam {
                name: "t0",
                reason: format!("pitch period must be at least 2 samples, got {t0}"),
            });
        }
        if samples.len() != 2 * t0 {
            return Err(Error::InvalidParam {
                name: "samples",
                reason: format!("frame length {} != 2*t0 = {}", samples.len(), 2 * t0),
            });
        }
        if !(fs > 0.0) {
            return Err(Error::InvalidParam {
                name: "fs",
                reason: "sampling rate must be positive".into(),
            });
        }
        Ok(Self { samples, fs, t0 })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    /// Local pitch period in samples.
    pub fn t0(&self) -> usize {
        self.t0
    }

    /// Index of the anchoring GCI (the frame midpoint).
    pub fn center(&self) -> usize {
        self.t0
    }
}
