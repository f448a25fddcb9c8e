//! Glottal source estimation: closed-phase inverse filtering (CPIF),
//! iterative adaptive inverse filtering (IAIF), complex cepstrum
//! decomposition (CCD) and its root-domain counterpart (ZZT).
//!
//! All estimators map an analysis region of a speech signal to a
//! two-period, GCI-centered glottal flow derivative estimate. Recoverable
//! per-frame failures are reported through the `valid` flag; contract
//! violations (missing markers, short signals) are hard errors.

use crate::dsp::fft::next_pow2;
use crate::dsp::{self, Frame};
use crate::vocal_tract::inverse_filter;
use crate::{Error, Result};

/// Estimation method label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Cpif,
    Iaif,
    Ccd,
    Zzt,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Cpif, Method::Iaif, Method::Ccd, Method::Zzt];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Cpif => "CPIF",
            Method::Iaif => "IAIF",
            Method::Ccd => "CCD",
            Method::Zzt => "ZZT",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Estimated glottal flow derivative and flow for one analysis frame,
/// normalized to unit peak-to-peak flow.
#[derive(Debug, Clone, PartialEq)]
pub struct GlottalEstimate {
    pub dflow: Vec<f64>,
    pub flow: Vec<f64>,
    pub method: Method,
    pub valid: bool,
    pub diagnostic: String,
}

impl GlottalEstimate {
    /// Integrate, normalize to unit peak-to-peak flow, and wrap.
    pub fn from_dflow(dflow: Vec<f64>, method: Method, leak: f64) -> Self {
        let flow = match dsp::integrate(&dflow, leak) {
            Ok(f) => f,
            Err(e) => return Self::invalid(method, format!("integration failed: {e}")),
        };
        let max = flow.iter().cloned().fold(f64::MIN, f64::max);
        let min = flow.iter().cloned().fold(f64::MAX, f64::min);
        let p2p = max - min;
        if !(p2p > 0.0) || !p2p.is_finite() {
            return Self::invalid(method, "degenerate estimate: flat flow".into());
        }
        let s = 1.0 / p2p;
        Self {
            dflow: dflow.iter().map(|v| v * s).collect(),
            flow: flow.iter().map(|v| v * s).collect(),
            method,
            valid: true,
            diagnostic: String::new(),
        }
    }

    pub fn invalid(method: Method, diagnostic: String) -> Self {
        Self {
            dflow: Vec::new(),
            flow: Vec::new(),
            method,
            valid: false,
            diagnostic,
        }
    }

    fn with_note(mut self, note: &str) -> Self {
        if !note.is_empty() {
            if !self.diagnostic.is_empty() {
                self.diagnostic.push_str("; ");
            }
            self.diagnostic.push_str(note);
        }
        self
    }
}

/// Event markers and local pitch for one analysis target.
///
/// `center` indexes the GCI the analysis frame is anchored on.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisContext {
    gci: Vec<usize>,
    goi: Vec<usize>,
    t0: usize,
    fs: f64,
    center: usize,
}

impl AnalysisContext {
    pub fn new(
        gci: Vec<usize>,
        goi: Vec<usize>,
        t0: usize,
        fs: f64,
        center: usize,
    ) -> Result<Self> {
        if gci.is_empty() || goi.is_empty() {
            return Err(Error::InvalidMarkers("need at least one GCI and one GOI".into()));
        }
        if center >= gci.len() {
            return Err(Error::InvalidMarkers(format!(
                "center index {center} out of range ({} GCIs)",
                gci.len()
            )));
        }
        for w in gci.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidMarkers("GCIs not strictly increasing".into()));
            }
        }
        for w in goi.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidMarkers("GOIs not strictly increasing".into()));
            }
        }
        // Alternation: between two consecutive GCIs there is exactly one GOI.
        for w in gci.windows(2) {
            let between = goi.iter().filter(|&&o| o > w[0] && o < w[1]).count();
            if between != 1 {
                return Err(Error::InvalidMarkers(format!(
                    "expected one GOI between GCIs {} and {}, found {between}",
                    w[0], w[1]
                )));
            }
        }
        if t0 < 2 {
            return Err(Error::InvalidMarkers("t0 must be at least 2 samples".into()));
        }
        // Local pitch consistency around the anchor.
        for neighbor in [center.wrapping_sub(1), center + 1] {
            if let (Some(&a), Some(&b)) = (gci.get(neighbor.min(center)), gci.get(neighbor.max(center))) {
                if neighbor != center && neighbor < gci.len() {
                    let gap = b - a;
                    if (gap as f64 - t0 as f64).abs() > 0.2 * t0 as f64 {
                        return Err(Error::InvalidMarkers(format!(
                            "t0 = {t0} inconsistent with local GCI spacing {gap}"
                        )));
                    }
                }
            }
        }
        Ok(Self {
            gci,
            goi,
            t0,
            fs,
            center,
        })
    }

    pub fn gci(&self) -> &[usize] {
        &self.gci
    }

    pub fn goi(&self) -> &[usize] {
        &self.goi
    }

    pub fn t0(&self) -> usize {
        self.t0
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn center_index(&self) -> usize {
        self.center
    }

    /// Sample position of the anchor GCI.
    pub fn center_gci(&self) -> usize {
        self.gci[self.center]
    }

    /// A context identical to this one anchored on another GCI.
    pub fn with_center(&self, center: usize) -> Result<Self> {
        Self::new(self.gci.clone(), self.goi.clone(), self.t0, self.fs, center)
    }
}

/// Slice the two-period analysis span `[g - t0, g + t0)` around the anchor.
pub fn raw_frame(signal: &[f64], ctx: &AnalysisContext) -> Result<Frame> {
    let g = ctx.center_gci();
    let t0 = ctx.t0();
    if g < t0 || g + t0 > signal.len() {
        return Err(Error::TooShort {
            context: "analysis frame",
            needed: 2 * t0,
            got: signal.len().saturating_sub(g.saturating_sub(t0)),
        });
    }
    Frame::new(signal[g - t0..g + t0].to_vec(), ctx.fs(), t0)
}

/// Blackman-windowed GCI-centered two-period frame for mixed-phase analysis.
pub fn windowed_frame(signal: &[f64], ctx: &AnalysisContext) -> Result<Frame> {
    let frame = raw_frame(signal, ctx)?;
    let w = dsp::blackman(frame.samples().len())?;
    let tapered: Vec<f64> = frame
        .samples()
        .iter()
        .zip(w.iter())
        .map(|(x, w)| x * w)
        .collect();
    Frame::new(tapered, ctx.fs(), ctx.t0())
}

/// Default all-pole order for vocal tract models at 16 kHz.
pub const DEFAULT_VT_ORDER: usize = 18;
/// Default low-order glottal model inside IAIF.
pub const DEFAULT_GLOTTIS_ORDER: usize = 4;

const DAP_NBINS: usize = 512;
const DAP_TOL: f64 = 1e-6;
const DAP_MAX_ITER: usize = 100;

/// Closed-phase inverse filtering.
///
/// Fits a discrete all-pole model over the closed phase following the anchor
/// GCI (pooling the preceding cycle's closed phase when a single one is
/// shorter than `order + 2` samples) and inverse filters the signal.
pub fn cpif(
    signal: &[f64],
    ctx: &AnalysisContext,
    order: usize,
    leak: f64,
) -> Result<GlottalEstimate> {
    let g = ctx.center_gci();
    let span = closed_phase_span(ctx, g, signal.len())
        .ok_or_else(|| Error::NoClosedPhase(format!("no GOI after the GCI at {g}")))?;
    let min_len = order + 2;

    let mut note = String::new();
    let fit = if span.1 - span.0 >= min_len {
        dsp::dap_fit(&signal[span.0..span.1], order, DAP_NBINS, DAP_TOL, DAP_MAX_ITER)
    } else {
        // Pool with the previous cycle's closed phase: average the two
        // spans' power spectra, as in multicycle closed-phase analysis.
        note = "pooled two closed phases".into();
        let prev = previous_closed_phase_span(ctx, g).and_then(|p| {
            if p.1 <= signal.len() {
                Some(p)
            } else {
                None
            }
        });
        let Some(prev) = prev else {
            return Ok(GlottalEstimate::invalid(
                Method::Cpif,
                format!(
                    "closed phase too short ({} < {min_len} samples) and no neighbor to pool",
                    span.1 - span.0
                ),
            ));
        };
        let pooled_len = (span.1 - span.0) + (prev.1 - prev.0);
        if pooled_len < min_len {
            return Ok(GlottalEstimate::invalid(
                Method::Cpif,
                format!("pooled closed phase still too short ({pooled_len} < {min_len} samples)"),
            ));
        }
        let pa = power_spectrum(&signal[prev.0..prev.1], DAP_NBINS);
        let pb = power_spectrum(&signal[span.0..span.1], DAP_NBINS);
        let avg: Vec<f64> = pa.iter().zip(pb.iter()).map(|(a, b)| 0.5 * (a + b)).collect();
        let longer = if span.1 - span.0 >= prev.1 - prev.0 {
            &signal[span.0..span.1]
        } else {
            &signal[prev.0..prev.1]
        };
        dsp::dap_fit_spectrum(&avg, order, DAP_TOL, DAP_MAX_ITER, longer)
    };

    let fit = match fit {
        Ok(f) => f,
        Err(e) => {
            return Ok(GlottalEstimate::invalid(
                Method::Cpif,
                format!("all-pole fit failed: {e}"),
            ))
        }
    };
    if !fit.converged {
        note = if note.is_empty() {
            "all-pole fit did not converge".into()
        } else {
            format!("{note}; all-pole fit did not converge")
        };
    }

    let dflow_full = inverse_filter(signal, &fit.model);
    let frame = frame_slice(&dflow_full, ctx)?;
    Ok(GlottalEstimate::from_dflow(frame, Method::Cpif, leak).with_note(&note))
}

fn power_spectrum(signal: &[f64], nbins: usize) -> Vec<f64> {
    let scale = 1.0 / signal.len() as f64;
    crate::dsp::fft::fft_real(signal, nbins)
        .iter()
        .map(|c| c.norm_sqr() * scale)
        .collect()
}

/// Closed phase of the cycle whose closure is `g`: `[g + 1, next GOI - 1]`
/// as a half-open span, clipped to the signal.
fn closed_phase_span(ctx: &AnalysisContext, g: usize, signal_len: usize) -> Option<(usize, usize)> {
    let next_goi = ctx.goi().iter().cloned().find(|&o| o > g)?;
    let start = g + 1;
    let end = next_goi.saturating_sub(1).min(signal_len);
    if end > start {
        Some((start, end))
    } else {
        None
    }
}

fn previous_closed_phase_span(ctx: &AnalysisContext, g: usize) -> Option<(usize, usize)> {
    let prev_gci = ctx.gci().iter().cloned().filter(|&c| c < g).next_back()?;
    let goi_between = ctx
        .goi()
        .iter()
        .cloned()
        .find(|&o| o > prev_gci && o <= g)?;
    let start = prev_gci + 1;
    let end = goi_between.saturating_sub(1);
    if end > start {
        Some((start, end))
    } else {
        None
    }
}

fn frame_slice(signal: &[f64], ctx: &AnalysisContext) -> Result<Vec<f64>> {
    let g = ctx.center_gci();
    let t0 = ctx.t0();
    if g < t0 || g + t0 > signal.len() {
        return Err(Error::TooShort {
            context: "analysis frame",
            needed: 2 * t0,
            got: signal.len(),
        });
    }
    Ok(signal[g - t0..g + t0].to_vec())
}

/// Iterative adaptive inverse filtering.
///
/// Two-pass pipeline: a coarse one-pole glottal tilt model refines an
/// order-`order_vt` vocal tract estimate, then an order-`order_glottis`
/// glottal model refines the tract once more before the final inverse
/// filtering. Internal integrations are leaky to control drift.
pub fn iaif(
    signal: &[f64],
    ctx: &AnalysisContext,
    order_vt: usize,
    order_glottis: usize,
    leak: f64,
) -> Result<GlottalEstimate> {
    if signal.len() < 3 * ctx.t0() {
        return Err(Error::TooShort {
            context: "iaif needs 3 pitch periods",
            needed: 3 * ctx.t0(),
            got: signal.len(),
        });
    }
    let run = || -> Result<Vec<f64>> {
        let s = highpass_70hz(signal, ctx.fs());
        const IAIF_LEAK: f64 = 0.99;
        // Pass 1: remove coarse glottal tilt, estimate the tract.
        let g1 = dsp::lpc(&s, 1)?;
        let y1 = inverse_filter(&s, &g1);
        let vt1 = dsp::lpc(&y1, order_vt)?;
        let v1 = dsp::integrate(&inverse_filter(&s, &vt1), IAIF_LEAK)?;
        // Pass 2: refine the glottal model, re-estimate the tract.
        let g2 = dsp::lpc(&v1, order_glottis)?;
        let y2 = dsp::integrate(&inverse_filter(&s, &g2), IAIF_LEAK)?;
        let vt2 = dsp::lpc(&y2, order_vt)?;
        Ok(inverse_filter(&s, &vt2))
    };
    match run() {
        Ok(dflow_full) => {
            let frame = frame_slice(&dflow_full, ctx)?;
            Ok(GlottalEstimate::from_dflow(frame, Method::Iaif, leak))
        }
        Err(Error::DegenerateSignal(why)) => Ok(GlottalEstimate::invalid(
            Method::Iaif,
            format!("linear prediction degenerated: {why}"),
        )),
        Err(other) => Err(other),
    }
}

/// Zero-phase second-order Butterworth high-pass at 70 Hz (forward-backward
/// application).
fn highpass_70hz(signal: &[f64], fs: f64) -> Vec<f64> {
    let k = (std::f64::consts::PI * 70.0 / fs).tan();
    let norm = 1.0 / (1.0 + std::f64::consts::SQRT_2 * k + k * k);
    let b0 = norm;
    let b1 = -2.0 * norm;
    let b2 = norm;
    let a1 = 2.0 * (k * k - 1.0) * norm;
    let a2 = (1.0 - std::f64::consts::SQRT_2 * k + k * k) * norm;
    let biquad = |x: &[f64]| -> Vec<f64> {
        let mut y = vec![0.0; x.len()];
        let (mut x1, mut x2, mut y1, mut y2) = (0.0, 0.0, 0.0, 0.0);
        for (n, &xn) in x.iter().enumerate() {
            let yn = b0 * xn + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
            x2 = x1;
            x1 = xn;
            y2 = y1;
            y1 = yn;
            y[n] = yn;
        }
        y
    };
    let mut y = biquad(signal);
    y.reverse();
    let mut y = biquad(&y);
    y.reverse();
    y
}

/// Complex cepstrum decomposition of a windowed frame.
///
/// The maximum-phase (anticausal) component is the glottal open-phase
/// derivative estimate, anchored so the pulse ends at the frame center.
pub fn ccd(frame: &Frame, leak: f64) -> Result<GlottalEstimate> {
    let nfft = next_pow2(std::cmp::max(4096, 4 * frame.samples().len()));
    let cc = match dsp::complex_cepstrum(frame, nfft) {
        Ok(c) => c,
        Err(e @ Error::SpectralZero { .. }) => {
            return Ok(GlottalEstimate::invalid(
                Method::Ccd,
                format!("cepstrum failed: {e}"),
            ))
        }
        Err(other) => return Err(other),
    };
    let buf = dsp::max_phase_component(&cc);
    let t0 = frame.t0();
    let mut est = vec![0.0; 2 * t0];
    for (i, v) in est.iter_mut().enumerate().take(t0 + 1) {
        *v = buf[(i + nfft - t0) % nfft];
    }
    Ok(GlottalEstimate::from_dflow(est, Method::Ccd, leak))
}

/// Root-domain mixed-phase decomposition (oracle counterpart of [`ccd`]).
pub fn zzt(frame: &Frame, leak: f64) -> Result<GlottalEstimate> {
    let set = match dsp::zzt_roots(frame) {
        Ok(s) => s,
        Err(e) => {
            return Ok(GlottalEstimate::invalid(
                Method::Zzt,
                format!("root factoring failed: {e}"),
            ))
        }
    };
    let (pulse, _gain) = dsp::zzt::max_phase_signal(&set);
    let t0 = frame.t0();
    let mut est = vec![0.0; 2 * t0];
    // pulse ends at its last sample; anchor that on the frame center.
    let m_o = pulse.len() - 1;
    for m in 0..=m_o.min(t0) {
        est[t0 - m] = pulse[m_o - m];
    }
    let estimate = GlottalEstimate::from_dflow(est, Method::Zzt, leak);
    if set.boundary_count() > 0 {
        Ok(estimate.with_note(&format!(
            "{} root(s) within 1e-8 of the unit circle assigned inside",
            set.boundary_count()
        )))
    } else {
        Ok(estimate)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features;
    use crate::lf_model::{synth_lf_cycle, synth_lf_train, LFParams};
    use crate::vocal_tract::{add_noise, ar_from_formants, filter, vowel_preset, vowel_presets, ARModel};

    struct Setup {
        speech: Vec<f64>,
        source: Vec<f64>,
        ctx: AnalysisContext,
        truth_naq: f64,
    }

    fn synth_case(f0: f64, oq: f64, am: f64, vowel: &str, snr_db: Option<f64>, seed: u64) -> Setup {
        let fs = 16000.0;
        let params = LFParams::with_defaults(f0, oq, am).unwrap();
        let train = synth_lf_train(&vec![params; 8], fs).unwrap();
        let preset = vowel_preset(vowel).unwrap();
        let ar = ar_from_formants(&preset, fs, DEFAULT_VT_ORDER).unwrap();
        let clean = filter(&train.signal, &ar);
        let speech = match snr_db {
            Some(snr) => add_noise(&clean, snr, seed).unwrap(),
            None => clean,
        };
        let cycle = synth_lf_cycle(&params, fs).unwrap();
        let ctx = AnalysisContext::new(train.gci.clone(), train.goi.clone(), cycle.len(), fs, 4)
            .unwrap();
        Setup {
            speech,
            source: train.signal,
            ctx,
            truth_naq: cycle.naq(),
        }
    }

    fn estimate_naq(est: &GlottalEstimate, t0: usize) -> f64 {
        let hi = (t0 + t0 / 4).min(est.flow.len() - 1);
        features::naq(&est.flow[..=hi], &est.dflow[..=hi], t0).unwrap()
    }

    #[test]
    fn cpif_recovers_naq_on_clean_vowel() {
        let s = synth_case(100.0, 0.6, 0.7, "a", None, 0);
        let est = cpif(&s.speech, &s.ctx, DEFAULT_VT_ORDER, 1.0).unwrap();
        assert!(est.valid, "{}", est.diagnostic);
        let naq = estimate_naq(&est, s.ctx.t0());
        let rel = (naq - s.truth_naq).abs() / s.truth_naq;
        assert!(rel < 0.2, "naq {naq} truth {} rel {rel}", s.truth_naq);
    }

    #[test]
    fn cpif_identity_tract_does_no_harm() {
        // On an identity vocal tract the inverse-filtered estimate must stay
        // close to the do-nothing baseline, and on a real tract it must beat
        // doing nothing.
        let fs = 16000.0;
        let params = LFParams::with_defaults(100.0, 0.6, 0.7).unwrap();
        let train = synth_lf_train(&vec![params; 8], fs).unwrap();
        let cycle_len = synth_lf_cycle(&params, fs).unwrap().len();
        let speech = add_noise(&train.signal, 80.0, 5).unwrap();
        let ctx =
            AnalysisContext::new(train.gci.clone(), train.goi.clone(), cycle_len, fs, 4).unwrap();

        let t0 = ctx.t0();
        let g = ctx.center_gci();
        let w = dsp::blackman(2 * t0).unwrap();
        let windowed = |x: &[f64]| -> Vec<f64> {
            features::peak_normalized(
                &x[g - t0..g + t0]
                    .iter()
                    .zip(w.iter())
                    .map(|(v, w)| v * w)
                    .collect::<Vec<f64>>(),
            )
            .unwrap()
        };
        let reference = windowed(&train.signal);

        let est = cpif(&speech, &ctx, DEFAULT_VT_ORDER, 1.0).unwrap();
        assert!(est.valid);
        let est_w = features::peak_normalized(
            &est.dflow
                .iter()
                .zip(w.iter())
                .map(|(v, w)| v * w)
                .collect::<Vec<f64>>(),
        )
        .unwrap();
        let sd_est = features::spectral_distortion(&est_w, &reference, fs).unwrap();
        let sd_baseline = features::spectral_distortion(&windowed(&speech), &reference, fs).unwrap();
        assert!(
            sd_est <= sd_baseline + 1.0,
            "identity tract: estimate {sd_est} dB vs baseline {sd_baseline} dB"
        );

        // Real tract: inverse filtering must beat the raw signal clearly.
        let s = synth_case(100.0, 0.6, 0.7, "a", Some(80.0), 6);
        let reference = {
            let x = &s.source[g - t0..g + t0];
            features::peak_normalized(
                &x.iter().zip(w.iter()).map(|(v, w)| v * w).collect::<Vec<f64>>(),
            )
            .unwrap()
        };
        let est = cpif(&s.speech, &s.ctx, DEFAULT_VT_ORDER, 1.0).unwrap();
        let est_w = features::peak_normalized(
            &est.dflow
                .iter()
                .zip(w.iter())
                .map(|(v, w)| v * w)
                .collect::<Vec<f64>>(),
        )
        .unwrap();
        let sd_est = features::spectral_distortion(&est_w, &reference, fs).unwrap();
        let raw_w = features::peak_normalized(
            &s.speech[g - t0..g + t0]
                .iter()
                .zip(w.iter())
                .map(|(v, w)| v * w)
                .collect::<Vec<f64>>(),
        )
        .unwrap();
        let sd_raw = features::spectral_distortion(&raw_w, &reference, fs).unwrap();
        assert!(
            sd_est < sd_raw,
            "real tract: estimate {sd_est} dB vs raw speech {sd_raw} dB"
        );
    }

    #[test]
    fn cpif_pools_closed_phases_at_high_pitch() {
        let s = synth_case(240.0, 0.8, 0.7, "e", None, 0);
        let est = cpif(&s.speech, &s.ctx, DEFAULT_VT_ORDER, 1.0).unwrap();
        assert!(est.valid, "{}", est.diagnostic);
        assert!(
            est.diagnostic.contains("pooled"),
            "expected the pooling path, got '{}'",
            est.diagnostic
        );
    }

    #[test]
    fn cpif_without_following_goi_is_an_error() {
        let s = synth_case(100.0, 0.6, 0.7, "a", None, 0);
        let last = s.ctx.gci().len() - 1;
        let ctx = s.ctx.with_center(last).unwrap();
        assert!(matches!(
            cpif(&s.speech, &ctx, DEFAULT_VT_ORDER, 1.0),
            Err(Error::NoClosedPhase(_))
        ));
    }

    #[test]
    fn iaif_sane_on_clean_mid_grid() {
        let mut ok = 0;
        let mut total = 0;
        for vowel in ["a", "e", "o", "u"] {
            for oq in [0.5, 0.6, 0.7] {
                let s = synth_case(110.0, oq, 0.7, vowel, None, 0);
                let est = iaif(
                    &s.speech,
                    &s.ctx,
                    DEFAULT_VT_ORDER,
                    DEFAULT_GLOTTIS_ORDER,
                    1.0,
                )
                .unwrap();
                assert!(est.valid, "{}", est.diagnostic);
                let naq = estimate_naq(&est, s.ctx.t0());
                total += 1;
                if (naq - s.truth_naq).abs() / s.truth_naq < 0.4 {
                    ok += 1;
                }
            }
        }
        assert!(ok * 2 >= total, "only {ok}/{total} frames within 40%");
    }

    #[test]
    fn iaif_flat_signal_is_invalid() {
        let fs = 16000.0;
        let gci = vec![96, 256, 416, 576, 736];
        let goi = vec![0, 160, 320, 480, 640];
        let ctx = AnalysisContext::new(gci, goi, 160, fs, 2).unwrap();
        let est = iaif(&vec![0.0; 900], &ctx, 18, 4, 1.0).unwrap();
        assert!(!est.valid);
    }

    #[test]
    fn ccd_on_minimum_phase_frame_extracts_almost_nothing() {
        // A decaying resonance has no anticausal content; the max-phase
        // component degenerates to an impulse-like residual.
        let fs = 16000.0;
        let t0 = 64usize;
        let model = ARModel::new(vec![-1.94, 0.9409], 1.0).unwrap(); // radius 0.97
        let mut impulse = vec![0.0; 2 * t0];
        impulse[0] = 1.0;
        let h = filter(&impulse, &model);
        let energy_in: f64 = h.iter().map(|v| v * v).sum();
        let frame = Frame::new(h, fs, t0).unwrap();
        let nfft = next_pow2(4 * frame.samples().len()).max(4096);
        let cc = dsp::complex_cepstrum(&frame, nfft).unwrap();
        let maxphase = dsp::max_phase_component(&cc);
        let energy_out: f64 = maxphase.iter().map(|v| v * v).sum();
        assert!(
            energy_out < 0.01 * energy_in,
            "max-phase energy {energy_out} vs input {energy_in}"
        );
        assert!(ccd(&frame, 1.0).unwrap().valid);
    }

    #[test]
    fn ccd_recovers_naq_through_a_vocal_tract() {
        let s = synth_case(100.0, 0.6, 0.675, "e", None, 0);
        let frame = windowed_frame(&s.speech, &s.ctx).unwrap();
        let est = ccd(&frame, 1.0).unwrap();
        assert!(est.valid, "{}", est.diagnostic);
        let naq = estimate_naq(&est, s.ctx.t0());
        let rel = (naq - s.truth_naq).abs() / s.truth_naq;
        assert!(rel < 0.2, "naq {naq} truth {} rel {rel}", s.truth_naq);
    }

    #[test]
    fn ccd_and_zzt_agree_on_the_same_frame() {
        let s = synth_case(140.0, 0.6, 0.7, "o", None, 0);
        let frame = windowed_frame(&s.speech, &s.ctx).unwrap();
        let a = ccd(&frame, 1.0).unwrap();
        let b = zzt(&frame, 1.0).unwrap();
        assert!(a.valid && b.valid);
        let sd = features::spectral_distortion(
            &features::peak_normalized(&a.dflow).unwrap(),
            &features::peak_normalized(&b.dflow).unwrap(),
            16000.0,
        )
        .unwrap();
        assert!(sd < 1.0, "SD between CCD and ZZT estimates: {sd} dB");
    }

    #[test]
    fn speech_frames_have_anticausal_roots_and_filters_do_not() {
        // Windowed voiced frame: at least one root outside the unit circle.
        let s = synth_case(120.0, 0.6, 0.7, "a", None, 0);
        let frame = windowed_frame(&s.speech, &s.ctx).unwrap();
        let set = dsp::zzt_roots(&frame).unwrap();
        assert!(!set.max_phase_roots().is_empty());

        // Bare decaying filter response: none.
        let model = ARModel::new(vec![-1.6, 0.8], 1.0).unwrap();
        let mut impulse = vec![0.0; 128];
        impulse[0] = 1.0;
        let h = filter(&impulse, &model);
        let set = dsp::zzt::roots_of_sequence(&h).unwrap();
        assert!(set.max_phase_roots().is_empty());
    }

    #[test]
    fn estimators_are_deterministic() {
        let s = synth_case(130.0, 0.55, 0.7, "schwa", Some(40.0), 9);
        let frame = windowed_frame(&s.speech, &s.ctx).unwrap();
        let a1 = cpif(&s.speech, &s.ctx, 18, 1.0).unwrap();
        let a2 = cpif(&s.speech, &s.ctx, 18, 1.0).unwrap();
        assert_eq!(a1, a2);
        let b1 = iaif(&s.speech, &s.ctx, 18, 4, 1.0).unwrap();
        let b2 = iaif(&s.speech, &s.ctx, 18, 4, 1.0).unwrap();
        assert_eq!(b1, b2);
        let c1 = ccd(&frame, 1.0).unwrap();
        let c2 = ccd(&frame, 1.0).unwrap();
        assert_eq!(c1, c2);
        let z1 = zzt(&frame, 1.0).unwrap();
        let z2 = zzt(&frame, 1.0).unwrap();
        assert_eq!(z1, z2);
    }

    #[test]
    fn amplitude_invariance_of_normalized_outputs() {
        let s = synth_case(120.0, 0.6, 0.7, "e", None, 0);
        let scaled: Vec<f64> = s.speech.iter().map(|v| v * 37.5).collect();
        for (a, b) in [
            (
                cpif(&s.speech, &s.ctx, 18, 1.0).unwrap(),
                cpif(&scaled, &s.ctx, 18, 1.0).unwrap(),
            ),
            (
                iaif(&s.speech, &s.ctx, 18, 4, 1.0).unwrap(),
                iaif(&scaled, &s.ctx, 18, 4, 1.0).unwrap(),
            ),
            (
                ccd(&windowed_frame(&s.speech, &s.ctx).unwrap(), 1.0).unwrap(),
                ccd(&windowed_frame(&scaled, &s.ctx).unwrap(), 1.0).unwrap(),
            ),
        ] {
            assert!(a.valid && b.valid);
            for (x, y) in a.flow.iter().zip(b.flow.iter()) {
                assert!((x - y).abs() < 1e-9, "{} flow changed under scaling", a.method);
            }
        }
    }

    #[test]
    fn context_validation() {
        // Non-alternating markers.
        assert!(AnalysisContext::new(vec![96, 256], vec![0, 40, 120], 160, 16000.0, 0).is_err());
        // Inconsistent t0.
        assert!(AnalysisContext::new(vec![96, 256, 416], vec![0, 160, 320], 100, 16000.0, 1).is_err());
        // Valid.
        assert!(AnalysisContext::new(vec![96, 256, 416], vec![0, 160, 320], 160, 16000.0, 1).is_ok());
    }

    #[test]
    fn iaif_vowels_all_presets_do_not_crash() {
        for p in vowel_presets() {
            let s = synth_case(150.0, 0.6, 0.7, &p.label, Some(40.0), 3);
            let est = iaif(&s.speech, &s.ctx, 18, 4, 1.0).unwrap();
            assert!(est.valid, "vowel {}: {}", p.label, est.diagnostic);
        }
    }
}
