use thiserror::Error;

/// Errors reported by the synthesis, analysis and benchmark layers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter value violates one of its documented invariants.
    #[error("invalid parameter {name}: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    /// The sampling rate is too low to resolve the requested waveform.
    #[error("period of {samples} samples is below the {min} sample minimum")]
    Resolution { samples: usize, min: usize },

    /// An operation received an empty input.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// Signal too short for the requested analysis order or span.
    #[error("signal too short: {context} needs {needed} samples, got {got}")]
    TooShort {
        context: &'static str,
        needed: usize,
        got: usize,
    },

    /// The input has no usable structure (constant, all-zero, ...).
    #[error("degenerate signal: {0}")]
    DegenerateSignal(&'static str),

    /// A magnitude spectrum vanished on the analysis grid.
    #[error("spectral zero at bin {bin} (|X| = {magnitude:e})")]
    SpectralZero { bin: usize, magnitude: f64 },

    /// A formant preset requests a resonance at or above Nyquist.
    #[error("formant at {frequency} Hz is not below Nyquist ({nyquist} Hz)")]
    FormantAboveNyquist { frequency: f64, nyquist: f64 },

    /// Model order too small for the requested structure.
    #[error("order {order} too small: {reason}")]
    OrderTooSmall { order: usize, reason: String },

    /// No glottal closed phase could be located in the marker stream.
    #[error("no closed phase found: {0}")]
    NoClosedPhase(String),

    /// Event markers are inconsistent (not sorted, not alternating, ...).
    #[error("invalid markers: {0}")]
    InvalidMarkers(String),

    /// Two histograms do not share a bin grid.
    #[error("histogram bin grids differ: {0}")]
    BinMismatch(String),

    /// Kullback-Leibler divergence hit an empty bin in the second argument.
    #[error("KL divergence undefined: bin {bin} has zero probability in B but {a:e} in A")]
    KlUndefined { bin: usize, a: f64 },

    /// A feature could not be computed for the stated reason.
    #[error("feature undefined: {0}")]
    FeatureUndefined(String),
}
