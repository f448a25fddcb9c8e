//! Glottal source estimation toolkit.
//!
//! Implements three source-tract decomposition methods — closed-phase inverse
//! filtering (CPIF), iterative adaptive inverse filtering (IAIF) and complex
//! cepstrum decomposition (CCD, with a zeros-of-the-z-transform oracle) —
//! together with glottal flow synthesis, voice quality features and a
//! synthetic benchmark harness.
//!
//! The crate is organised around the processing chain:
//!
//! - [`lf_model`]: Liljencrants-Fant glottal flow / flow derivative synthesis,
//!   with exact closure and opening instants.
//! - [`vocal_tract`]: all-pole vowel filters, forward and inverse filtering,
//!   SNR-controlled noise.
//! - [`dsp`]: shared kernels (windows, LPC, discrete all-pole modeling,
//!   complex cepstrum, z-plane root factoring, integration).
//! - [`estimators`]: the three estimation methods plus the root-domain oracle.
//! - [`features`]: NAQ, QOQ, H1-H2, HRF and spectral distortion.
//! - [`bench`]: parameter-grid benchmark, error rates, histograms,
//!   KL/Jensen-Shannon divergences and the voice quality protocol.

pub mod bench;
pub mod dsp;
pub mod estimators;
pub mod features;
pub mod lf_model;
pub mod vocal_tract;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
