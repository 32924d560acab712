//! Oracle TF masks and complex-mask application on the reference channel.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::types::{ComplexSpectrogram, TimeFrequencyMask};

pub const DEFAULT_MASK_CLIP: f64 = 10.0;
const MAG_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskKind {
    ComplexIdeal,
    RatioIdeal,
    External,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskSpec {
    pub kind: MaskKind,
    pub clip: f64,
}

impl MaskSpec {
    pub fn new(kind: MaskKind, clip: f64) -> Result<Self> {
        if !(clip.is_finite() && clip > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "mask clip must be > 0, got {clip}"
            )));
        }
        Ok(Self { kind, clip })
    }
}

impl Default for MaskSpec {
    fn default() -> Self {
        Self {
            kind: MaskKind::ComplexIdeal,
            clip: DEFAULT_MASK_CLIP,
        }
    }
}

fn check_mono_pair(a: &ComplexSpectrogram, b: &ComplexSpectrogram) -> Result<()> {
    for s in [a, b] {
        if s.n_channels() != 1 {
            return Err(Error::DimensionMismatch {
                what: "mask input channels",
                expected: 1,
                actual: s.n_channels(),
            });
        }
    }
    if a.n_frames() != b.n_frames() {
        return Err(Error::DimensionMismatch {
            what: "frames",
            expected: a.n_frames(),
            actual: b.n_frames(),
        });
    }
    if a.n_bins() != b.n_bins() {
        return Err(Error::DimensionMismatch {
            what: "frequency bins",
            expected: a.n_bins(),
            actual: b.n_bins(),
        });
    }
    Ok(())
}

/// `m = s / x` with `|m|` clipped to `clip`, phase kept; zero where
/// `|x| < 1e-12`.
pub fn ideal_complex_mask(
    target_ref: &ComplexSpectrogram,
    mix_ref: &ComplexSpectrogram,
    clip: f64,
) -> Result<TimeFrequencyMask> {
    check_mono_pair(target_ref, mix_ref)?;
    MaskSpec::new(MaskKind::ComplexIdeal, clip)?;
    let data = target_ref
        .as_flat()
        .iter()
        .zip(mix_ref.as_flat())
        .map(|(s, x)| {
            if x.norm() < MAG_FLOOR {
                return Complex64::new(0.0, 0.0);
            }
            let m = s / x;
            let mag = m.norm();
            if mag > clip {
                m * (clip / mag)
            } else {
                m
            }
        })
        .collect();
    Ok(TimeFrequencyMask::from_parts(
        data,
        (mix_ref.n_frames(), mix_ref.n_bins()),
    ))
}

/// `m = |s| / (|s| + |n|)` as a real mask stored with zero imaginary part;
/// `0/0` gives 0.
pub fn ideal_ratio_mask(
    target_ref: &ComplexSpectrogram,
    interferer_ref: &ComplexSpectrogram,
) -> Result<TimeFrequencyMask> {
    check_mono_pair(target_ref, interferer_ref)?;
    let data = target_ref
        .as_flat()
        .iter()
        .zip(interferer_ref.as_flat())
        .map(|(s, n)| {
            let (a, b) = (s.norm(), n.norm());
            let d = a + b;
            Complex64::new(if d > 0.0 { a / d } else { 0.0 }, 0.0)
        })
        .collect();
    Ok(TimeFrequencyMask::from_parts(
        data,
        (target_ref.n_frames(), target_ref.n_bins()),
    ))
}

/// `y_tf = m_tf · x_R,tf`.
pub fn apply_mask(
    mask: &TimeFrequencyMask,
    mix_ref: &ComplexSpectrogram,
) -> Result<ComplexSpectrogram> {
    if mix_ref.n_channels() != 1 {
        return Err(Error::DimensionMismatch {
            what: "mask input channels",
            expected: 1,
            actual: mix_ref.n_channels(),
        });
    }
    let (t, f) = mask.dims();
    if (t, f) != (mix_ref.n_frames(), mix_ref.n_bins()) {
        return Err(Error::DimensionMismatch {
            what: "mask frames x bins",
            expected: t * f,
            actual: mix_ref.n_frames() * mix_ref.n_bins(),
        });
    }
    let data = mask
        .as_flat()
        .iter()
        .zip(mix_ref.as_flat())
        .map(|(m, x)| m * x)
        .collect();
    Ok(ComplexSpectrogram::from_parts(data, mix_ref.dims()))
}
