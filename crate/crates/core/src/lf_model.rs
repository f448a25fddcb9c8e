//! Liljencrants-Fant glottal source synthesis.
//!
//! One cycle of the flow derivative is a growing exponential sinusoid over
//! the open phase followed by an exponential return phase; the return-phase
//! time constant and the open-phase growth rate are fixed by continuity at
//! the closure instant and by zero net flow over the cycle. Both implicit
//! equations are solved by bisection. The zero-net-flow condition is imposed
//! on the sampled cycle, so the discrete flow returns to baseline exactly at
//! any sampling rate.

use crate::{Error, Result};

/// Parameters of one glottal cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LFParams {
    /// Fundamental frequency in Hz.
    pub f0: f64,
    /// Open quotient: fraction of the period the glottis is open.
    pub oq: f64,
    /// Asymmetry coefficient: position of the flow maximum within the open
    /// phase. The growing-sinusoid formulation requires values above 0.5 to
    /// synthesize; values in (0, 0.5] are structurally valid parameters that
    /// fail at synthesis time.
    pub alpha_m: f64,
    /// Return-phase quotient: fraction of the closed phase occupied by the
    /// exponential return.
    pub qa: f64,
    /// Excitation amplitude at the closure instant.
    pub ee: f64,
}

impl LFParams {
    pub fn new(f0: f64, oq: f64, alpha_m: f64, qa: f64, ee: f64) -> Result<Self> {
        let check = |ok: bool, name: &'static str, reason: String| {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParam { name, reason })
            }
        };
        check(f0.is_finite() && f0 > 0.0, "f0", format!("must be positive, got {f0}"))?;
        check(oq > 0.0 && oq < 1.0, "oq", format!("must be in (0, 1), got {oq}"))?;
        check(
            alpha_m > 0.0 && alpha_m < 1.0,
            "alpha_m",
            format!("must be in (0, 1), got {alpha_m}"),
        )?;
        check(
            (0.0..1.0).contains(&qa),
            "qa",
            format!("must be in [0, 1), got {qa}"),
        )?;
        check(ee.is_finite() && ee > 0.0, "ee", format!("must be positive, got {ee}"))?;
        Ok(Self { f0, oq, alpha_m, qa, ee })
    }

    /// Grid-style constructor: `qa = 0.1`, `ee = 1.0`.
    pub fn with_defaults(f0: f64, oq: f64, alpha_m: f64) -> Result<Self> {
        Self::new(f0, oq, alpha_m, 0.1, 1.0)
    }
}

/// One synthesized period of glottal flow and flow derivative.
#[derive(Debug, Clone)]
pub struct GlottalCycle {
    /// Flow in physical units: cumulative sum of `dflow` times the sample
    /// period.
    pub flow: Vec<f64>,
    /// Flow derivative sampled on the output grid.
    pub dflow: Vec<f64>,
    pub fs: f64,
    /// Sample index of the glottal closure instant (the derivative minimum).
    pub gci_index: usize,
}

impl GlottalCycle {
    pub fn len(&self) -> usize {
        self.dflow.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dflow.is_empty()
    }

    /// Realized fundamental frequency after period rounding.
    pub fn realized_f0(&self) -> f64 {
        self.fs / self.len() as f64
    }

    /// Normalized amplitude quotient of this cycle:
    /// `max(flow) / (|min(dflow)| * T0)` with `T0` in seconds.
    pub fn naq(&self) -> f64 {
        let max_flow = self.flow.iter().cloned().fold(f64::MIN, f64::max);
        let min_d = self.dflow.iter().cloned().fold(f64::MAX, f64::min);
        let t0 = self.len() as f64 / self.fs;
        max_flow / (min_d.abs() * t0)
    }

    /// Quasi-open quotient of this cycle.
    pub fn qoq(&self) -> Result<f64> {
        crate::features::qoq(&self.flow, self.len())
    }
}

/// Bisection to a relative interval tolerance, assuming `f(lo)` and `f(hi)`
/// have opposite signs.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, rel_tol: f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let f_mid = f(mid);
        if (f_mid >= 0.0) == (f_lo >= 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if (hi - lo).abs() <= rel_tol * lo.abs().max(hi.abs()).max(1e-300) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Shape of one cycle on the sample grid: everything needed to evaluate the
/// derivative at integer sample times.
struct CycleShape {
    te: f64,
    omega: f64,
    alpha: f64,
    e0: f64,
    /// Return phase constants; `None` for abrupt closure (qa = 0).
    ret: Option<ReturnPhase>,
    ee: f64,
}

struct ReturnPhase {
    epsilon: f64,
    k_end: f64,
    scale: f64,
}

impl CycleShape {
    fn derivative(&self, k: f64) -> f64 {
        if k <= self.te {
            self.e0 * (self.alpha * k).exp() * (self.omega * k).sin()
        } else if let Some(ret) = &self.ret {
            -(self.ee * ret.scale) * ((-ret.epsilon * (k - self.te)).exp() - ret.k_end)
        } else {
            0.0
        }
    }
}

fn solve_shape(params: &LFParams, n: usize) -> Result<CycleShape> {
    let nf = n as f64;
    let te = params.oq * nf;
    let tp = params.alpha_m * te;
    let td = nf - te;
    let omega = std::f64::consts::PI / tp;
    let sin_te = (omega * te).sin();
    if sin_te >= 0.0 {
        return Err(Error::InvalidParam {
            name: "alpha_m",
            reason: format!(
                "open-phase sinusoid cannot reach the closure amplitude (alpha_m = {} <= 0.5)",
                params.alpha_m
            ),
        });
    }

    // Return phase: epsilon * ta = 1 - exp(-epsilon * td), positive root.
    let ret = if params.qa > 0.0 {
        let ta = params.qa * td;
        let f = |eps: f64| eps * ta - 1.0 + (-eps * td).exp();
        let lo = 1e-12 / td;
        let hi = 1.0 / ta;
        debug_assert!(f(lo) < 0.0 && f(hi) > 0.0);
        let epsilon = bisect(f, lo, hi, 1e-10);
        let k_end = (-epsilon * td).exp();
        Some(ReturnPhase {
            epsilon,
            k_end,
            scale: 1.0 / (epsilon * ta),
        })
    } else {
        None
    };

    // Growth rate: zero net flow over the sampled cycle. The discrete return
    // sum is independent of alpha, so bracket the open-phase balance and
    // bisect.
    let ee = params.ee;
    let shape_with = |alpha: f64| CycleShape {
        te,
        omega,
        alpha,
        e0: -ee / ((alpha * te).exp() * sin_te),
        ret: ret.as_ref().map(|r| ReturnPhase {
            epsilon: r.epsilon,
            k_end: r.k_end,
            scale: r.scale,
        }),
        ee,
    };
    let net = |alpha: f64| -> f64 {
        let s = shape_with(alpha);
        (0..n).map(|k| s.derivative(k as f64)).sum()
    };

    let step = omega.max(1.0 / nf);
    let (mut lo, mut hi);
    if net(0.0) > 0.0 {
        lo = 0.0;
        hi = step;
        let mut tries = 0;
        while net(hi) > 0.0 {
            hi *= 2.0;
            tries += 1;
            if tries > 100 {
                return Err(Error::DegenerateSignal("no flow balance solution"));
            }
        }
    } else {
        hi = 0.0;
        lo = -step;
        let mut tries = 0;
        while net(lo) < 0.0 {
            lo *= 2.0;
            tries += 1;
            if tries > 100 {
                return Err(Error::DegenerateSignal("no flow balance solution"));
            }
        }
    }
    // net decreases in alpha: net(lo) > 0 > net(hi).
    let alpha = bisect(|a| -net(a), lo, hi, 1e-14);
    Ok(shape_with(alpha))
}

/// Synthesize one period of the LF flow derivative and its integral.
pub fn synth_lf_cycle(params: &LFParams, fs: f64) -> Result<GlottalCycle> {
    // Re-validate so raw struct literals are caught too.
    let params = LFParams::new(params.f0, params.oq, params.alpha_m, params.qa, params.ee)?;
    if !(fs >= 8000.0) {
        return Err(Error::InvalidParam {
            name: "fs",
            reason: format!("sampling rate must be at least 8000 Hz, got {fs}"),
        });
    }
    let n = (fs / params.f0).round() as usize;
    if n < 32 {
        return Err(Error::Resolution { samples: n, min: 32 });
    }
    let shape = solve_shape(&params, n)?;
    let dflow: Vec<f64> = (0..n).map(|k| shape.derivative(k as f64)).collect();
    let dt = 1.0 / fs;
    let mut flow = Vec::with_capacity(n);
    let mut acc = 0.0;
    for &d in &dflow {
        acc += d * dt;
        flow.push(acc);
    }
    let gci_index = dflow
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    Ok(GlottalCycle {
        flow,
        dflow,
        fs,
        gci_index,
    })
}

/// A concatenated derivative train with exact event markers.
#[derive(Debug, Clone)]
pub struct LfTrain {
    /// Glottal flow derivative of the whole utterance.
    pub signal: Vec<f64>,
    /// Glottal closure instants, one per cycle.
    pub gci: Vec<usize>,
    /// Glottal opening instants (cycle starts), one per cycle.
    pub goi: Vec<usize>,
}

/// Concatenate cycles anchored at their closure instants.
///
/// Cycle `k+1`'s GCI is placed exactly one period of cycle `k` after cycle
/// `k`'s GCI, so the inter-GCI gaps equal the local periods; waveforms are
/// overlap-added where rounding makes neighboring cycles touch.
pub fn synth_lf_train(params_per_cycle: &[LFParams], fs: f64) -> Result<LfTrain> {
    if params_per_cycle.is_empty() {
        return Err(Error::EmptyInput("synth_lf_train needs at least one cycle"));
    }
    let cycles: Vec<GlottalCycle> = params_per_cycle
        .iter()
        .map(|p| synth_lf_cycle(p, fs))
        .collect::<Result<_>>()?;

    let mut gci = Vec::with_capacity(cycles.len());
    let mut goi = Vec::with_capacity(cycles.len());
    let mut total = 0usize;
    let mut g = cycles[0].gci_index as isize;
    for cycle in &cycles {
        let start = g - cycle.gci_index as isize;
        if start < 0 {
            return Err(Error::InvalidParam {
                name: "params_per_cycle",
                reason: "cycle sequence too irregular: opening instant precedes train start".into(),
            });
        }
        goi.push(start as usize);
        gci.push(g as usize);
        total = total.max(start as usize + cycle.len());
        g += cycle.len() as isize;
    }

    let mut signal = vec![0.0; total];
    for (cycle, &start) in cycles.iter().zip(goi.iter()) {
        for (i, &d) in cycle.dflow.iter().enumerate() {
            signal[start + i] += d;
        }
    }
    Ok(LfTrain { signal, gci, goi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::fft::magnitude_spectrum;

    fn mid() -> LFParams {
        LFParams::with_defaults(100.0, 0.6, 0.7).unwrap()
    }

    #[test]
    fn cycle_length_and_gci_position() {
        let c = synth_lf_cycle(&mid(), 16000.0).unwrap();
        assert_eq!(c.len(), 160);
        assert_eq!(c.gci_index, 96); // oq * N terminates the open phase
        assert!((c.dflow[96] + 1.0).abs() < 1e-12, "minimum is -ee exactly on-grid");
    }

    #[test]
    fn complete_closure_boundaries() {
        let p = LFParams::with_defaults(180.0, 0.55, 0.65).unwrap();
        let c = synth_lf_cycle(&p, 16000.0).unwrap();
        let peak = c.flow.iter().cloned().fold(0.0, f64::max);
        assert!(peak > 0.0);
        assert!(c.flow[0].abs() <= 1e-12 * peak);
        assert!(c.flow.last().unwrap().abs() <= 1e-9 * peak);
    }

    #[test]
    fn flow_is_nonnegative_and_cumulative() {
        for (f0, oq, am, qa) in [
            (100.0, 0.6, 0.7, 0.1),
            (240.0, 0.9, 0.8, 0.1),
            (240.0, 0.3, 0.55, 0.1),
            (120.0, 0.45, 0.75, 0.0),
        ] {
            let p = LFParams::new(f0, oq, am, qa, 1.0).unwrap();
            let c = synth_lf_cycle(&p, 16000.0).unwrap();
            let peak = c.flow.iter().cloned().fold(0.0, f64::max);
            for &f in &c.flow {
                assert!(f >= -1e-9 * peak, "flow dipped to {f}");
            }
            // flow literally is the cumulative sum of dflow / fs
            let mut acc = 0.0;
            for (f, d) in c.flow.iter().zip(c.dflow.iter()) {
                acc += d / 16000.0;
                assert!((f - acc).abs() <= 1e-9 * peak.max(1e-300));
            }
        }
    }

    #[test]
    fn cycle_integral_vanishes() {
        for oq in [0.3, 0.5, 0.7, 0.9] {
            let p = LFParams::with_defaults(150.0, oq, 0.7).unwrap();
            let c = synth_lf_cycle(&p, 16000.0).unwrap();
            let integral: f64 = c.dflow.iter().sum::<f64>() / 16000.0;
            let peak = c.flow.iter().cloned().fold(0.0, f64::max);
            assert!(integral.abs() < 1e-6 * peak, "residual {integral} vs peak {peak}");
        }
    }

    #[test]
    fn amplitude_scaling_is_exact() {
        let a = synth_lf_cycle(&mid(), 16000.0).unwrap();
        let scaled = LFParams { ee: 7.0, ..mid() };
        let b = synth_lf_cycle(&scaled, 16000.0).unwrap();
        for (x, y) in a.dflow.iter().zip(b.dflow.iter()) {
            assert!((y - 7.0 * x).abs() <= 1e-12 * 7.0 * x.abs().max(1.0));
        }
        assert!((a.naq() - b.naq()).abs() < 1e-12);
        assert!((a.qoq().unwrap() - b.qoq().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn naq_matches_dense_grid_oracle() {
        let p = LFParams::new(100.0, 0.6, 0.7, 0.05, 1.0).unwrap();
        let coarse = synth_lf_cycle(&p, 16000.0).unwrap();
        let dense = synth_lf_cycle(&p, 192_000.0).unwrap();
        let rel = (coarse.naq() - dense.naq()).abs() / dense.naq();
        assert!(rel < 0.01, "NAQ {} vs oracle {}", coarse.naq(), dense.naq());
    }

    #[test]
    fn glottal_formant_rises_as_oq_falls() {
        let mut last_peak_bin = 0usize;
        for oq in [0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3] {
            let p = LFParams::with_defaults(150.0, oq, 0.7).unwrap();
            let c = synth_lf_cycle(&p, 16000.0).unwrap();
            let spec = magnitude_spectrum(&c.dflow, 8192);
            let bin = spec[1..4096]
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .unwrap()
                .0
                + 1;
            assert!(bin >= last_peak_bin, "oq {oq}: bin {bin} < {last_peak_bin}");
            last_peak_bin = bin;
        }
    }

    #[test]
    fn table_ranges_are_accepted() {
        for f0 in [100.0, 170.0, 240.0] {
            for oq in [0.3, 0.6, 0.9] {
                for am in [0.55, 0.7, 0.8] {
                    let p = LFParams::with_defaults(f0, oq, am).unwrap();
                    synth_lf_cycle(&p, 16000.0).unwrap();
                }
            }
        }
    }

    #[test]
    fn degenerate_parameters_are_reported() {
        assert!(LFParams::with_defaults(100.0, 1.2, 0.7).is_err());
        assert!(LFParams::with_defaults(0.0, 0.6, 0.7).is_err());
        assert!(LFParams::new(100.0, 0.6, 0.7, 1.0, 1.0).is_err());
        // alpha_m below 0.5 passes construction and fails at synthesis.
        let p = LFParams::with_defaults(100.0, 0.6, 0.45).unwrap();
        assert!(synth_lf_cycle(&p, 16000.0).is_err());
        // resolution limit
        let p = LFParams::with_defaults(300.0, 0.6, 0.7).unwrap();
        assert!(matches!(
            synth_lf_cycle(&p, 8000.0),
            Err(Error::Resolution { .. })
        ));
        assert!(synth_lf_cycle(&mid(), 4000.0).is_err());
    }

    #[test]
    fn train_of_identical_cycles() {
        let t = synth_lf_train(&[mid(), mid(), mid()], 16000.0).unwrap();
        assert_eq!(t.signal.len(), 480);
        assert_eq!(t.gci, vec![96, 256, 416]);
        assert_eq!(t.goi, vec![0, 160, 320]);
    }

    #[test]
    fn empty_train_rejected() {
        assert!(synth_lf_train(&[], 16000.0).is_err());
    }

    #[test]
    fn alternating_pitch_gaps_follow_local_periods() {
        let hi = LFParams::with_defaults(200.0, 0.6, 0.7).unwrap();
        let t = synth_lf_train(&[mid(), hi, mid()], 16000.0).unwrap();
        let gaps: Vec<usize> = t.gci.windows(2).map(|w| w[1] - w[0]).collect();
        assert_eq!(gaps, vec![160, 80]);
    }
}
