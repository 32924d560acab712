//! Channel integration: delay-and-sum, filter-and-sum and mask-based MVDR.
//!
//! Two weight conventions coexist. Filter-and-sum multiplies without
//! conjugation, `y = Σ_i w_i x_i`, while the MVDR output is `y = wᴴ x`.
//! Time-invariant weights `w` used with [`apply_beamformer`] give the same
//! output as [`filter_and_sum`] with `conj(w)` broadcast over frames.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Cholesky};
use crate::spatial::SteeringVector;
use crate::types::{BeamformerWeights, ComplexSpectrogram, TimeFrequencyMask};

pub const DEFAULT_DIAGONAL_LOADING: f64 = 1e-6;
const MASK_ENERGY_FLOOR: f64 = 1e-20;
const TRACE_FLOOR: f64 = 1e-12;

/// Per-bin spatial covariance of the target and of everything else.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdSet {
    pub target: Vec<CMatrix>,
    pub interference: Vec<CMatrix>,
}

impl PsdSet {
    pub fn new(target: Vec<CMatrix>, interference: Vec<CMatrix>) -> Result<Self> {
        if target.len() != interference.len() {
            return Err(Error::DimensionMismatch {
                what: "PSD bin count",
                expected: target.len(),
                actual: interference.len(),
            });
        }
        let n = target.first().map(CMatrix::dim).unwrap_or(0);
        if let Some(bad) = target.iter().chain(&interference).find(|m| m.dim() != n) {
            return Err(Error::DimensionMismatch {
                what: "PSD matrix size",
                expected: n,
                actual: bad.dim(),
            });
        }
        Ok(Self {
            target,
            interference,
        })
    }

    pub fn n_bins(&self) -> usize {
        self.target.len()
    }

    pub fn n_channels(&self) -> usize {
        self.target.first().map(CMatrix::dim).unwrap_or(0)
    }
}

fn mismatch(what: &'static str, expected: usize, actual: usize) -> Error {
    Error::DimensionMismatch {
        what,
        expected,
        actual,
    }
}

/// `y_tf = (1/I) Σ_i conj(a_i,f) x_i,tf`.
pub fn delay_and_sum(
    spec: &ComplexSpectrogram,
    steering: &SteeringVector,
) -> Result<ComplexSpectrogram> {
    let (n_ch, n_frames, n_bins) = spec.dims();
    if steering.dims.0 != n_ch {
        return Err(mismatch("steering channels", n_ch, steering.dims.0));
    }
    if steering.dims.1 != n_bins {
        return Err(mismatch("steering bins", n_bins, steering.dims.1));
    }
    let norm = 1.0 / n_ch as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); n_frames * n_bins];
    for i in 0..n_ch {
        let x = spec.channel(i);
        for (k, y) in out.iter_mut().enumerate() {
            *y += steering.get(i, k % n_bins).conj() * x[k];
        }
    }
    for y in &mut out {
        *y *= norm;
    }
    Ok(ComplexSpectrogram::from_parts(out, (1, n_frames, n_bins)))
}

/// `y_tf = Σ_i w_i,tf x_i,tf` with no conjugation.
pub fn filter_and_sum(
    spec: &ComplexSpectrogram,
    weights: &BeamformerWeights,
) -> Result<ComplexSpectrogram> {
    let BeamformerWeights::TimeVarying { data, dims } = weights else {
        return Err(Error::InvalidConfig(
            "filter-and-sum takes time-varying weights; broadcast time-invariant ones first".into(),
        ));
    };
    if *dims != spec.dims() {
        let (a, b) = (dims.0 * dims.1 * dims.2, spec.as_flat().len());
        return Err(mismatch("filter-and-sum weights (I,T,F)", b, a));
    }
    let (n_ch, n_frames, n_bins) = spec.dims();
    let per = n_frames * n_bins;
    let mut out = vec![Complex64::new(0.0, 0.0); per];
    for i in 0..n_ch {
        let x = spec.channel(i);
        let w = &data[i * per..(i + 1) * per];
        for ((y, wi), xi) in out.iter_mut().zip(w).zip(x) {
            *y += wi * xi;
        }
    }
    Ok(ComplexSpectrogram::from_parts(out, (1, n_frames, n_bins)))
}

/// Mask-weighted spatial covariance per frequency bin:
/// `Φ_f = Σ_t (m x)(m x)ᴴ / Σ_t |m|²`.
pub fn estimate_psd(spec: &ComplexSpectrogram, mask: &TimeFrequencyMask) -> Result<Vec<CMatrix>> {
    let (n_ch, n_frames, n_bins) = spec.dims();
    if mask.dims() != (n_frames, n_bins) {
        return Err(mismatch(
            "mask frames x bins",
            n_frames * n_bins,
            mask.dims().0 * mask.dims().1,
        ));
    }
    (0..n_bins)
        .into_par_iter()
        .map(|f| {
            let mut phi = CMatrix::zeros(n_ch);
            let mut energy = 0.0;
            let mut v = vec![Complex64::new(0.0, 0.0); n_ch];
            for t in 0..n_frames {
                let m = mask.get(t, f);
                energy += m.norm_sqr();
                for (i, vi) in v.iter_mut().enumerate() {
                    *vi = m * spec.get(i, t, f);
                }
                phi.add_outer(&v, 1.0);
            }
            // negated so a NaN energy also fails
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !(energy >= MASK_ENERGY_FLOOR) {
                return Err(Error::DegenerateMask { bin: f });
            }
            Ok(phi.scaled(1.0 / energy))
        })
        .collect()
}

/// Target and interference PSDs from a pair of masks.
pub fn estimate_psd_set(
    spec: &ComplexSpectrogram,
    mask_s: &TimeFrequencyMask,
    mask_n: &TimeFrequencyMask,
) -> Result<PsdSet> {
    PsdSet::new(estimate_psd(spec, mask_s)?, estimate_psd(spec, mask_n)?)
}

/// `Φ + δ (tr Φ / I) I`, or `None` when the trace is not positive.
pub fn load_diagonal(phi: &CMatrix, delta: f64) -> Option<CMatrix> {
    let n = phi.dim();
    let tr = phi.trace().re;
    if !(tr.is_finite() && tr > 0.0) {
        return None;
    }
    Some(phi.with_diagonal(delta * tr / n as f64))
}

/// MVDR weights `w_f = (Φn⁻¹ Φs / tr(Φn⁻¹ Φs)) u` with the default loading.
pub fn mvdr_weights(psd: &PsdSet, reference_channel: usize) -> Result<BeamformerWeights> {
    mvdr_weights_with_loading(psd, reference_channel, DEFAULT_DIAGONAL_LOADING)
}

/// MVDR weights with an explicit relative diagonal loading `δ` on `Φn`.
///
/// `u` selects `reference_channel`. The interference PSD is loaded by
/// `δ · tr(Φn)/I` and factorised with Cholesky; `Φn⁻¹ Φs` is formed by
/// solving rather than inverting.
pub fn mvdr_weights_with_loading(
    psd: &PsdSet,
    reference_channel: usize,
    delta: f64,
) -> Result<BeamformerWeights> {
    let n_ch = psd.n_channels();
    let n_bins = psd.n_bins();
    if reference_channel >= n_ch {
        return Err(mismatch("reference channel", n_ch, reference_channel + 1));
    }
    let columns: Vec<Vec<Complex64>> = (0..n_bins)
        .into_par_iter()
        .map(|f| {
            let loaded =
                load_diagonal(&psd.interference[f], delta).ok_or(Error::SingularPsd { bin: f })?;
            let chol = Cholesky::new(&loaded).ok_or(Error::SingularPsd { bin: f })?;
            let numerator = chol.solve_matrix(&psd.target[f]);
            let tr = numerator.trace();
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !(tr.norm() >= TRACE_FLOOR) {
                return Err(Error::DegenerateTrace { bin: f });
            }
            Ok(numerator
                .column(reference_channel)
                .into_iter()
                .map(|v| v / tr)
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut data = vec![Complex64::new(0.0, 0.0); n_ch * n_bins];
    for (f, col) in columns.iter().enumerate() {
        for (i, w) in col.iter().enumerate() {
            data[i * n_bins + f] = *w;
        }
    }
    BeamformerWeights::time_invariant(data, (n_ch, n_bins))
}

/// `y_tf = w_fᴴ x_tf`.
pub fn apply_beamformer(
    weights: &BeamformerWeights,
    spec: &ComplexSpectrogram,
) -> Result<ComplexSpectrogram> {
    let BeamformerWeights::TimeInvariant { data, dims } = weights else {
        return Err(Error::InvalidConfig(
            "apply_beamformer takes time-invariant weights".into(),
        ));
    };
    let (n_ch, n_frames, n_bins) = spec.dims();
    if dims.0 != n_ch {
        return Err(mismatch("weight channels", n_ch, dims.0));
    }
    if dims.1 != n_bins {
        return Err(mismatch("weight bins", n_bins, dims.1));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); n_frames * n_bins];
    for i in 0..n_ch {
        let x = spec.channel(i);
        let w = &data[i * n_bins..(i + 1) * n_bins];
        for (k, y) in out.iter_mut().enumerate() {
            *y += w[k % n_bins].conj() * x[k];
        }
    }
    Ok(ComplexSpectrogram::from_parts(out, (1, n_frames, n_bins)))
}

/// PSD estimation, MVDR solution and beamforming in one call.
pub fn mvdr_pipeline(
    spec: &ComplexSpectrogram,
    mask_s: &TimeFrequencyMask,
    mask_n: &TimeFrequencyMask,
    reference_channel: usize,
) -> Result<ComplexSpectrogram> {
    let psd = estimate_psd_set(spec, mask_s, mask_n)?;
    let w = mvdr_weights(&psd, reference_channel)?;
    apply_beamformer(&w, spec)
}

/// Least-squares time-invariant filter-and-sum weights given the target at
/// the reference channel: per bin, `w = conj(R⁻¹ r)` with
/// `R = Σ_t x xᴴ` and `r = Σ_t x conj(s)`, so that `Σ_i w_i x_i`
/// best matches `s`. Returned in the unconjugated filter-and-sum
/// convention, dims `(I, F)`.
pub fn oracle_filter_weights(
    spec: &ComplexSpectrogram,
    target_ref: &ComplexSpectrogram,
    delta: f64,
) -> Result<BeamformerWeights> {
    let (n_ch, n_frames, n_bins) = spec.dims();
    if target_ref.dims() != (1, n_frames, n_bins) {
        return Err(mismatch(
            "target reference (1,T,F)",
            n_frames * n_bins,
            target_ref.as_flat().len(),
        ));
    }
    let columns: Vec<Vec<Complex64>> = (0..n_bins)
        .into_par_iter()
        .map(|f| {
            let mut r_xx = CMatrix::zeros(n_ch);
            let mut r_xs = vec![Complex64::new(0.0, 0.0); n_ch];
            for t in 0..n_frames {
                let x = spec.channel_vector(t, f);
                let s = target_ref.get(0, t, f);
                r_xx.add_outer(&x, 1.0);
                for (acc, xi) in r_xs.iter_mut().zip(&x) {
                    *acc += xi * s.conj();
                }
            }
            let Some(loaded) = load_diagonal(&r_xx, delta) else {
                return Ok(vec![Complex64::new(0.0, 0.0); n_ch]);
            };
            let chol = Cholesky::new(&loaded).ok_or(Error::SingularPsd { bin: f })?;
            Ok(chol.solve(&r_xs).into_iter().map(|v| v.conj()).collect())
        })
        .collect::<Result<_>>()?;
    let mut data = vec![Complex64::new(0.0, 0.0); n_ch * n_bins];
    for (f, col) in columns.iter().enumerate() {
        for (i, w) in col.iter().enumerate() {
            data[i * n_bins + f] = *w;
        }
    }
    BeamformerWeights::time_invariant(data, (n_ch, n_bins))
}

/// One-hot time-invariant weights selecting `channel`.
pub fn one_hot_weights(n_channels: usize, n_bins: usize, channel: usize) -> BeamformerWeights {
    let mut data = vec![Complex64::new(0.0, 0.0); n_channels * n_bins];
    for w in &mut data[channel * n_bins..(channel + 1) * n_bins] {
        *w = Complex64::new(1.0, 0.0);
    }
    BeamformerWeights::TimeInvariant {
        data,
        dims: (n_channels, n_bins),
    }
}
