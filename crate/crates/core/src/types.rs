//! Shared domain types.
//!
//! Index convention everywhere in the crate is channel-major, then frame,
//! then frequency bin. Flat storage for an `(I, T, F)` grid puts element
//! `(i, t, f)` at `(i * T + t) * F + f`; see [`flat_index`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;

/// Flat offset of `(i, t, f)` in an `(I, T, F)` grid stored channel-major.
#[inline]
pub fn flat_index(dims: (usize, usize, usize), i: usize, t: usize, f: usize) -> usize {
    let (_, n_frames, n_bins) = dims;
    (i * n_frames + t) * n_bins + f
}

/// Inverse of [`flat_index`].
#[inline]
pub fn unflat_index(dims: (usize, usize, usize), k: usize) -> (usize, usize, usize) {
    let (_, n_frames, n_bins) = dims;
    let f = k % n_bins;
    let rest = k / n_bins;
    (rest / n_frames, rest % n_frames, f)
}

fn all_finite_real(xs: &[f64]) -> bool {
    xs.iter().all(|x| x.is_finite())
}

fn all_finite_complex(xs: &[Complex64]) -> bool {
    xs.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Framing and physical constants shared by the STFT and spatial modules.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SignalConfig {
    pub sample_rate_hz: u32,
    pub window_len_samples: usize,
    pub hop_len_samples: usize,
    pub sound_speed_m_per_s: f64,
}

impl Default for SignalConfig {
    /// 16 kHz, 32 ms window, 16 ms hop, 343 m/s.
    fn default() -> Self {
        Self {
            sample_rate_hz: 16_000,
            window_len_samples: 512,
            hop_len_samples: 256,
            sound_speed_m_per_s: 343.0,
        }
    }
}

impl SignalConfig {
    pub fn with_sample_rate(sample_rate_hz: u32) -> Self {
        Self {
            sample_rate_hz,
            ..Self::default()
        }
    }

    /// One-sided bin count `F = N/2 + 1`.
    pub fn n_freq_bins(&self) -> usize {
        self.window_len_samples / 2 + 1
    }

    /// Centre frequency in Hz of bin `f`.
    pub fn bin_hz(&self, f: usize) -> f64 {
        f as f64 * self.sample_rate_hz as f64 / self.window_len_samples as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_rate_hz == 0 {
            return Err(Error::InvalidConfig("sample rate must be positive".into()));
        }
        if self.window_len_samples == 0 || !self.window_len_samples.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "window length must be positive and even, got {}",
                self.window_len_samples
            )));
        }
        if self.hop_len_samples == 0 || self.hop_len_samples > self.window_len_samples {
            return Err(Error::InvalidConfig(format!(
                "hop length {} must be in [1, {}]",
                self.hop_len_samples, self.window_len_samples
            )));
        }
        if !(self.sound_speed_m_per_s.is_finite() && self.sound_speed_m_per_s > 0.0) {
            return Err(Error::InvalidConfig("sound speed must be positive".into()));
        }
        Ok(())
    }
}

/// Mono time-domain signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    samples: Vec<f64>,
    sample_rate_hz: u32,
}

impl Waveform {
    pub fn new(samples: Vec<f64>, sample_rate_hz: u32) -> Result<Self> {
        if !all_finite_real(&samples) {
            return Err(Error::NonFinite("waveform"));
        }
        if sample_rate_hz == 0 {
            return Err(Error::InvalidConfig("sample rate must be positive".into()));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// `I` equally long channels at a common sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiChannelWaveform {
    channels: Vec<Vec<f64>>,
    sample_rate_hz: u32,
}

impl MultiChannelWaveform {
    pub fn new(channels: Vec<Vec<f64>>, sample_rate_hz: u32) -> Result<Self> {
        let Some(first) = channels.first() else {
            return Err(Error::InvalidConfig("at least one channel required".into()));
        };
        let len = first.len();
        if let Some(bad) = channels.iter().find(|c| c.len() != len) {
            return Err(Error::LengthMismatch(len, bad.len()));
        }
        if !channels.iter().all(|c| all_finite_real(c)) {
            return Err(Error::NonFinite("multi-channel waveform"));
        }
        if sample_rate_hz == 0 {
            return Err(Error::InvalidConfig("sample rate must be positive".into()));
        }
        Ok(Self {
            channels,
            sample_rate_hz,
        })
    }

    pub fn from_mono(wave: Waveform) -> Self {
        let sample_rate_hz = wave.sample_rate_hz;
        Self {
            channels: vec![wave.samples],
            sample_rate_hz,
        }
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn channel(&self, i: usize) -> &[f64] {
        &self.channels[i]
    }

    pub fn channels(&self) -> &[Vec<f64>] {
        &self.channels
    }

    pub fn into_channels(self) -> Vec<Vec<f64>> {
        self.channels
    }

    /// Copy of channel `i` as a mono waveform.
    pub fn to_mono(&self, i: usize) -> Waveform {
        Waveform {
            samples: self.channels[i].clone(),
            sample_rate_hz: self.sample_rate_hz,
        }
    }
}

/// Complex STFT grid with dims `(I, T, F)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrogram {
    data: Vec<Complex64>,
    dims: (usize, usize, usize),
}

impl ComplexSpectrogram {
    pub fn from_flat(data: Vec<Complex64>, dims: (usize, usize, usize)) -> Result<Self> {
        let (i, t, f) = dims;
        if i == 0 || t == 0 || f == 0 {
            return Err(Error::InvalidConfig(format!(
                "spectrogram dims must be positive, got {dims:?}"
            )));
        }
        if data.len() != i * t * f {
            return Err(Error::DimensionMismatch {
                what: "spectrogram storage",
                expected: i * t * f,
                actual: data.len(),
            });
        }
        if !all_finite_complex(&data) {
            return Err(Error::NonFinite("spectrogram"));
        }
        Ok(Self { data, dims })
    }

    pub fn zeros(dims: (usize, usize, usize)) -> Self {
        Self {
            data: vec![Complex64::new(0.0, 0.0); dims.0 * dims.1 * dims.2],
            dims,
        }
    }

    /// Internal constructor for outputs of finite arithmetic on validated inputs.
    pub(crate) fn from_parts(data: Vec<Complex64>, dims: (usize, usize, usize)) -> Self {
        debug_assert_eq!(data.len(), dims.0 * dims.1 * dims.2);
        Self { data, dims }
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn n_channels(&self) -> usize {
        self.dims.0
    }

    pub fn n_frames(&self) -> usize {
        self.dims.1
    }

    pub fn n_bins(&self) -> usize {
        self.dims.2
    }

    pub fn get(&self, i: usize, t: usize, f: usize) -> Complex64 {
        self.data[flat_index(self.dims, i, t, f)]
    }

    pub fn as_flat(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_flat(self) -> Vec<Complex64> {
        self.data
    }

    /// All `T * F` bins of channel `i`, frame-major.
    pub fn channel(&self, i: usize) -> &[Complex64] {
        let n = self.dims.1 * self.dims.2;
        &self.data[i * n..(i + 1) * n]
    }

    pub fn frame(&self, i: usize, t: usize) -> &[Complex64] {
        let start = flat_index(self.dims, i, t, 0);
        &self.data[start..start + self.dims.2]
    }

    /// Single-channel spectrogram holding a copy of channel `i`.
    pub fn select_channel(&self, i: usize) -> Self {
        Self {
            data: self.channel(i).to_vec(),
            dims: (1, self.dims.1, self.dims.2),
        }
    }

    /// Keeps the listed channels, in the given order.
    pub fn select_channels(&self, channels: &[usize]) -> Result<Self> {
        if channels.is_empty() {
            return Err(Error::InvalidConfig("empty channel selection".into()));
        }
        let mut data = Vec::with_capacity(channels.len() * self.dims.1 * self.dims.2);
        for &c in channels {
            if c >= self.dims.0 {
                return Err(Error::DimensionMismatch {
                    what: "channel selection",
                    expected: self.dims.0,
                    actual: c + 1,
                });
            }
            data.extend_from_slice(self.channel(c));
        }
        Ok(Self {
            data,
            dims: (channels.len(), self.dims.1, self.dims.2),
        })
    }

    /// Channel vector `x_tf` across the array.
    pub fn channel_vector(&self, t: usize, f: usize) -> Vec<Complex64> {
        (0..self.dims.0).map(|i| self.get(i, t, f)).collect()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            data: self.data.iter().map(|z| z * c).collect(),
            dims: self.dims,
        }
    }
}

/// Per-bin complex mask with dims `(T, F)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeFrequencyMask {
    data: Vec<Complex64>,
    dims: (usize, usize),
}

impl TimeFrequencyMask {
    pub fn from_flat(data: Vec<Complex64>, dims: (usize, usize)) -> Result<Self> {
        if dims.0 == 0 || dims.1 == 0 {
            return Err(Error::InvalidConfig(format!(
                "mask dims must be positive, got {dims:?}"
            )));
        }
        if data.len() != dims.0 * dims.1 {
            return Err(Error::DimensionMismatch {
                what: "mask storage",
                expected: dims.0 * dims.1,
                actual: data.len(),
            });
        }
        if !all_finite_complex(&data) {
            return Err(Error::NonFinite("mask"));
        }
        Ok(Self { data, dims })
    }

    pub fn constant(value: Complex64, dims: (usize, usize)) -> Self {
        Self {
            data: vec![value; dims.0 * dims.1],
            dims,
        }
    }

    pub(crate) fn from_parts(data: Vec<Complex64>, dims: (usize, usize)) -> Self {
        debug_assert_eq!(data.len(), dims.0 * dims.1);
        Self { data, dims }
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn get(&self, t: usize, f: usize) -> Complex64 {
        self.data[t * self.dims.1 + f]
    }

    pub fn as_flat(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_flat(self) -> Vec<Complex64> {
        self.data
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            data: self.data.iter().map(|z| z * c).collect(),
            dims: self.dims,
        }
    }

    /// `1 - m` elementwise.
    pub fn complement(&self) -> Self {
        Self {
            data: self
                .data
                .iter()
                .map(|z| Complex64::new(1.0, 0.0) - z)
                .collect(),
            dims: self.dims,
        }
    }
}

/// Channel-combination weights.
///
/// `TimeInvariant` holds one `I`-vector per bin (dims `(I, F)`), as produced
/// by the MVDR solution. `TimeVarying` holds one filter per channel and TF bin
/// (dims `(I, T, F)`).
#[derive(Debug, Clone, PartialEq)]
pub enum BeamformerWeights {
    TimeInvariant {
        data: Vec<Complex64>,
        dims: (usize, usize),
    },
    TimeVarying {
        data: Vec<Complex64>,
        dims: (usize, usize, usize),
    },
}

impl BeamformerWeights {
    pub fn time_invariant(data: Vec<Complex64>, dims: (usize, usize)) -> Result<Self> {
        if data.len() != dims.0 * dims.1 || dims.0 == 0 || dims.1 == 0 {
            return Err(Error::DimensionMismatch {
                what: "time-invariant weights",
                expected: dims.0 * dims.1,
                actual: data.len(),
            });
        }
        if !all_finite_complex(&data) {
            return Err(Error::NonFinite("beamformer weights"));
        }
        Ok(Self::TimeInvariant { data, dims })
    }

    pub fn time_varying(data: Vec<Complex64>, dims: (usize, usize, usize)) -> Result<Self> {
        let n = dims.0 * dims.1 * dims.2;
        if data.len() != n || n == 0 {
            return Err(Error::DimensionMismatch {
                what: "time-varying weights",
                expected: n,
                actual: data.len(),
            });
        }
        if !all_finite_complex(&data) {
            return Err(Error::NonFinite("beamformer weights"));
        }
        Ok(Self::TimeVarying { data, dims })
    }

    pub fn n_channels(&self) -> usize {
        match self {
            Self::TimeInvariant { dims, .. } => dims.0,
            Self::TimeVarying { dims, .. } => dims.0,
        }
    }

    pub fn as_flat(&self) -> &[Complex64] {
        match self {
            Self::TimeInvariant { data, .. } | Self::TimeVarying { data, .. } => data,
        }
    }

    /// Repeats time-invariant weights over `n_frames`, optionally conjugating.
    ///
    /// With `conjugate = true` this maps the `y = w^H x` convention onto the
    /// unconjugated multiply-accumulate of filter-and-sum.
    pub fn broadcast(&self, n_frames: usize, conjugate: bool) -> Result<Self> {
        let Self::TimeInvariant { data, dims } = self else {
            return Err(Error::InvalidConfig(
                "only time-invariant weights can be broadcast".into(),
            ));
        };
        let (n_ch, n_bins) = *dims;
        let mut out = Vec::with_capacity(n_ch * n_frames * n_bins);
        for i in 0..n_ch {
            let row = &data[i * n_bins..(i + 1) * n_bins];
            for _ in 0..n_frames {
                out.extend(row.iter().map(|w| if conjugate { w.conj() } else { *w }));
            }
        }
        Ok(Self::TimeVarying {
            data: out,
            dims: (n_ch, n_frames, n_bins),
        })
    }
}

/// Checks that a spectrogram has one channel per microphone.
pub fn validate_dims(spec: &ComplexSpectrogram, geometry: &ArrayGeometry) -> Result<()> {
    if spec.n_channels() != geometry.n_mics() {
        return Err(Error::DimensionMismatch {
            what: "spectrogram channels vs microphones",
            expected: geometry.n_mics(),
            actual: spec.n_channels(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec_with_channels(n: usize) -> ComplexSpectrogram {
        ComplexSpectrogram::zeros((n, 3, 5))
    }

    #[test]
    fn validate_dims_matches_mic_count() {
        let g15 = ArrayGeometry::default_ula();
        let g2 = ArrayGeometry::uniform_linear(2, 0.04).unwrap();
        let g1 = ArrayGeometry::uniform_linear(1, 0.04).unwrap();
        assert!(validate_dims(&spec_with_channels(15), &g15).is_ok());
        assert!(matches!(
            validate_dims(&spec_with_channels(15), &g2),
            Err(Error::DimensionMismatch {
                expected: 2,
                actual: 15,
                ..
            })
        ));
        assert!(validate_dims(&spec_with_channels(1), &g1).is_ok());
    }

    #[test]
    fn default_config_is_32ms_16ms() {
        let c = SignalConfig::default();
        assert_eq!(c.n_freq_bins(), 257);
        assert_eq!(c.window_len_samples * 1000 / c.sample_rate_hz as usize, 32);
        assert_eq!(c.hop_len_samples * 1000 / c.sample_rate_hz as usize, 16);
        c.validate().unwrap();
    }

    #[test]
    fn config_rejects_bad_framing() {
        let mut c = SignalConfig::default();
        c.hop_len_samples = 513;
        assert!(c.validate().is_err());
        c.hop_len_samples = 256;
        c.window_len_samples = 511;
        assert!(c.validate().is_err());
    }

    #[test]
    fn constructors_reject_non_finite() {
        assert!(Waveform::new(vec![0.0, f64::NAN], 16000).is_err());
        assert!(MultiChannelWaveform::new(vec![vec![f64::INFINITY]], 16000).is_err());
        assert!(MultiChannelWaveform::new(vec![vec![0.0], vec![0.0, 1.0]], 16000).is_err());
        let bad = vec![Complex64::new(f64::NAN, 0.0)];
        assert!(ComplexSpectrogram::from_flat(bad.clone(), (1, 1, 1)).is_err());
        assert!(TimeFrequencyMask::from_flat(bad.clone(), (1, 1)).is_err());
        assert!(BeamformerWeights::time_invariant(bad, (1, 1)).is_err());
    }

    #[test]
    fn amplitude_is_not_clamped() {
        let w = Waveform::new(vec![3.5, -7.0], 8000).unwrap();
        assert_eq!(w.samples(), &[3.5, -7.0]);
    }

    #[test]
    fn broadcast_repeats_and_conjugates() {
        let w = BeamformerWeights::time_invariant(
            vec![Complex64::new(1.0, 2.0), Complex64::new(0.0, -1.0)],
            (2, 1),
        )
        .unwrap();
        let b = w.broadcast(3, true).unwrap();
        let BeamformerWeights::TimeVarying { data, dims } = b else {
            panic!("expected time-varying");
        };
        assert_eq!(dims, (2, 3, 1));
        assert_eq!(data[0], Complex64::new(1.0, -2.0));
        assert_eq!(data[2], Complex64::new(1.0, -2.0));
        assert_eq!(data[3], Complex64::new(0.0, 1.0));
    }

    proptest! {
        #[test]
        fn flat_index_round_trips(i in 1usize..6, t in 1usize..9, f in 1usize..17, seed in 0usize..10_000) {
            let dims = (i, t, f);
            let k = seed % (i * t * f);
            let (a, b, c) = unflat_index(dims, k);
            prop_assert_eq!(flat_index(dims, a, b, c), k);
        }
    }
}
