//! Short-time Fourier transform with fixed framing.
//!
//! Frames start at sample 0 with no centre padding; a trailing partial frame
//! is dropped, so `T = 1 + (L - N) / H` for input length `L`, window `N`
//! and hop `H`. Bins are the one-sided `F = N/2 + 1` outputs of an
//! unnormalised DFT. Synthesis is weighted overlap-add normalised by the sum
//! of squared windows. Near the ends, where fewer frames overlap, that sum
//! is floored at its steady-state minimum: a single frame's window tail
//! would otherwise divide modified spectra by a vanishing weight and blow
//! up the edges.

use std::ops::Range;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::types::{ComplexSpectrogram, MultiChannelWaveform, SignalConfig};

/// Periodic Hann window of length `n`.
pub fn periodic_hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * k as f64 / n as f64).cos())
        .collect()
}

/// Window + FFT plans for one [`SignalConfig`].
#[derive(Clone)]
pub struct StftPlan {
    config: SignalConfig,
    window: Vec<f64>,
    norm_floor: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for StftPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StftPlan")
            .field("config", &self.config)
            .finish_non_exhaustive()
    }
}

impl StftPlan {
    /// Plan with a periodic Hann window.
    pub fn new(config: SignalConfig) -> Result<Self> {
        let window = periodic_hann(config.window_len_samples);
        Self::with_window(config, window)
    }

    pub fn with_window(config: SignalConfig, window: Vec<f64>) -> Result<Self> {
        config.validate()?;
        if window.len() != config.window_len_samples {
            return Err(Error::DimensionMismatch {
                what: "window length",
                expected: config.window_len_samples,
                actual: window.len(),
            });
        }
        if window.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite("window"));
        }
        let mut planner = FftPlanner::new();
        let n = config.window_len_samples;
        let plan = Self {
            config,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            window,
            norm_floor: 0.0,
        };
        let (lo, _) = plan.overlap_sum_range(|w| w * w);
        if lo <= 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "window/hop pair {}/{} leaves samples with no squared-window support",
                n, config.hop_len_samples
            )));
        }
        Ok(Self {
            norm_floor: lo,
            ..plan
        })
    }

    pub fn config(&self) -> &SignalConfig {
        &self.config
    }

    pub fn window(&self) -> &[f64] {
        &self.window
    }

    pub fn n_bins(&self) -> usize {
        self.config.n_freq_bins()
    }

    /// Min and max over one hop period of `Σ_t g(w[n - tH])`.
    fn overlap_sum_range(&self, g: impl Fn(f64) -> f64) -> (f64, f64) {
        let n = self.config.window_len_samples;
        let hop = self.config.hop_len_samples;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for phase in 0..hop {
            let s: f64 = (phase..n).step_by(hop).map(|k| g(self.window[k])).sum();
            lo = lo.min(s);
            hi = hi.max(s);
        }
        (lo, hi)
    }

    /// Relative spread `(max - min) / max` of the shifted window sum; zero
    /// for a window that is constant-overlap-add at this hop.
    pub fn cola_deviation(&self) -> f64 {
        let (lo, hi) = self.overlap_sum_range(|w| w);
        (hi - lo) / hi
    }

    pub fn n_frames(&self, len: usize) -> usize {
        let n = self.config.window_len_samples;
        if len < n {
            0
        } else {
            1 + (len - n) / self.config.hop_len_samples
        }
    }

    /// Number of samples spanned by `n_frames` frames.
    pub fn covered_len(&self, n_frames: usize) -> usize {
        if n_frames == 0 {
            0
        } else {
            (n_frames - 1) * self.config.hop_len_samples + self.config.window_len_samples
        }
    }

    /// Samples that receive the steady-state number of overlapping frames.
    /// Round-trip guarantees are stated over this range.
    pub fn interior(&self, n_frames: usize) -> Range<usize> {
        let n = self.config.window_len_samples;
        let hop = self.config.hop_len_samples;
        let start = n - hop;
        let end = (n_frames * hop).max(start);
        start..end
    }

    fn frame_spectrum(&self, samples: &[f64], buf: &mut [Complex64], scratch: &mut [Complex64]) {
        for ((b, x), w) in buf.iter_mut().zip(samples).zip(&self.window) {
            *b = Complex64::new(x * w, 0.0);
        }
        self.forward.process_with_scratch(buf, scratch);
    }

    fn stft_channel(&self, x: &[f64], n_frames: usize) -> Vec<Complex64> {
        let n = self.config.window_len_samples;
        let hop = self.config.hop_len_samples;
        let n_bins = self.n_bins();
        let mut out = Vec::with_capacity(n_frames * n_bins);
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.forward.get_inplace_scratch_len()];
        for t in 0..n_frames {
            self.frame_spectrum(&x[t * hop..t * hop + n], &mut buf, &mut scratch);
            out.extend_from_slice(&buf[..n_bins]);
        }
        out
    }

    fn istft_channel(&self, spec: &[Complex64], n_frames: usize, out_len: usize) -> Vec<f64> {
        let n = self.config.window_len_samples;
        let hop = self.config.hop_len_samples;
        let n_bins = self.n_bins();
        let span = self.covered_len(n_frames);
        let mut acc = vec![0.0; span];
        let mut norm = vec![0.0; span];
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.inverse.get_inplace_scratch_len()];
        let scale = 1.0 / n as f64;
        for t in 0..n_frames {
            let frame = &spec[t * n_bins..(t + 1) * n_bins];
            buf[..n_bins].copy_from_slice(frame);
            for k in n_bins..n {
                buf[k] = frame[n - k].conj();
            }
            self.inverse.process_with_scratch(&mut buf, &mut scratch);
            let start = t * hop;
            for k in 0..n {
                let w = self.window[k];
                acc[start + k] += w * buf[k].re * scale;
                norm[start + k] += w * w;
            }
        }
        let mut out = vec![0.0; out_len];
        for (o, (a, d)) in out.iter_mut().zip(acc.iter().zip(&norm)) {
            *o = a / d.max(self.norm_floor);
        }
        out
    }
}

/// Forward STFT of every channel.
pub fn stft(wave: &MultiChannelWaveform, plan: &StftPlan) -> Result<ComplexSpectrogram> {
    let len = wave.len();
    let n = plan.config.window_len_samples;
    if len < n {
        return Err(Error::InputTooShort { len, needed: n });
    }
    let n_frames = plan.n_frames(len);
    let per_channel: Vec<Vec<Complex64>> = wave
        .channels()
        .par_iter()
        .map(|x| plan.stft_channel(x, n_frames))
        .collect();
    let dims = (wave.n_channels(), n_frames, plan.n_bins());
    Ok(ComplexSpectrogram::from_parts(
        per_channel.into_iter().flatten().collect(),
        dims,
    ))
}

/// Inverse STFT by weighted overlap-add.
///
/// Output length defaults to the span covered by the frames; a longer
/// `out_len` is zero-filled, a shorter one truncates.
pub fn istft(
    spec: &ComplexSpectrogram,
    plan: &StftPlan,
    out_len: Option<usize>,
) -> Result<MultiChannelWaveform> {
    if spec.n_bins() != plan.n_bins() {
        return Err(Error::DimensionMismatch {
            what: "frequency bins",
            expected: plan.n_bins(),
            actual: spec.n_bins(),
        });
    }
    let n_frames = spec.n_frames();
    let out_len = out_len.unwrap_or_else(|| plan.covered_len(n_frames));
    let channels: Vec<Vec<f64>> = (0..spec.n_channels())
        .into_par_iter()
        .map(|i| plan.istft_channel(spec.channel(i), n_frames, out_len))
        .collect();
    MultiChannelWaveform::new(channels, plan.config.sample_rate_hz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics;
    use crate::types::Waveform;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn plan() -> StftPlan {
        StftPlan::new(SignalConfig::default()).unwrap()
    }

    fn noise(len: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    fn mono(x: Vec<f64>) -> MultiChannelWaveform {
        MultiChannelWaveform::new(vec![x], 16000).unwrap()
    }

    /// Textbook O(N^2) DFT used as an independent reference.
    fn naive_dft(x: &[f64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(m, v)| {
                        let ang = -2.0 * std::f64::consts::PI * (k * m) as f64 / n as f64;
                        Complex64::from_polar(*v, ang)
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn hann_is_cola_at_half_overlap() {
        assert!(plan().cola_deviation() < 1e-12);
    }

    #[test]
    fn frame_count_formula() {
        let spec = stft(&mono(vec![0.0; 16000]), &plan()).unwrap();
        assert_eq!(spec.dims(), (1, 61, 257));
    }

    #[test]
    fn zero_input_gives_zero_spectrogram() {
        let spec = stft(&mono(vec![0.0; 2048]), &plan()).unwrap();
        assert!(spec.as_flat().iter().all(|z| z.norm() == 0.0));
        let back = istft(&spec, &plan(), None).unwrap();
        assert!(back.channel(0).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn too_short_input_is_rejected() {
        assert!(matches!(
            stft(&mono(vec![0.0; 511]), &plan()),
            Err(Error::InputTooShort {
                len: 511,
                needed: 512
            })
        ));
    }

    #[test]
    fn matches_naive_dft_of_windowed_frame() {
        let p = plan();
        let x = noise(1024, 3);
        let spec = stft(&mono(x.clone()), &p).unwrap();
        let t = 2;
        let frame: Vec<f64> = x[t * 256..t * 256 + 512]
            .iter()
            .zip(p.window())
            .map(|(a, w)| a * w)
            .collect();
        let reference = naive_dft(&frame);
        for f in 0..257 {
            assert!((spec.get(0, t, f) - reference[f]).norm() < 1e-9);
        }
    }

    #[test]
    fn bin_centred_sinusoid_is_concentrated() {
        let p = plan();
        let k0 = 40.0;
        let x: Vec<f64> = (0..4096)
            .map(|n| (2.0 * std::f64::consts::PI * k0 * n as f64 / 512.0 + 0.3).cos())
            .collect();
        let spec = stft(&mono(x.clone()), &p).unwrap();
        for t in 0..spec.n_frames() {
            // independent oracle: naive DFT energy of the windowed frame
            let frame: Vec<f64> = x[t * 256..t * 256 + 512]
                .iter()
                .zip(p.window())
                .map(|(a, w)| a * w)
                .collect();
            let dft = naive_dft(&frame);
            let total: f64 = dft[..257].iter().map(|z| z.norm_sqr()).sum();
            let near: f64 = (39..=41).map(|f| spec.get(0, t, f).norm_sqr()).sum();
            assert!(near / total >= 0.99, "frame {t}: {}", near / total);
        }
    }

    #[test]
    fn parseval_per_frame() {
        let p = plan();
        let x = noise(2048, 11);
        let spec = stft(&mono(x.clone()), &p).unwrap();
        for t in 0..spec.n_frames() {
            let time_energy: f64 = x[t * 256..t * 256 + 512]
                .iter()
                .zip(p.window())
                .map(|(a, w)| (a * w).powi(2))
                .sum();
            let frame = spec.frame(0, t);
            let tf_energy: f64 = frame
                .iter()
                .enumerate()
                .map(|(f, z)| {
                    let weight = if f == 0 || f == 256 { 1.0 } else { 2.0 };
                    weight * z.norm_sqr()
                })
                .sum::<f64>()
                / 512.0;
            assert!((tf_energy - time_energy).abs() <= 1e-4 * time_energy);
        }
    }

    #[test]
    fn round_trip_one_second_interior() {
        let p = plan();
        let x = noise(16000, 5);
        let spec = stft(&mono(x.clone()), &p).unwrap();
        let y = istft(&spec, &p, Some(x.len())).unwrap();
        let r = p.interior(spec.n_frames());
        let est = Waveform::new(y.channel(0)[r.clone()].to_vec(), 16000).unwrap();
        let reference = Waveform::new(x[r].to_vec(), 16000).unwrap();
        assert!(metrics::si_snr(&est, &reference).unwrap() >= 60.0);
    }

    #[test]
    fn istft_rejects_wrong_bin_count() {
        let spec = ComplexSpectrogram::zeros((1, 4, 129));
        assert!(matches!(
            istft(&spec, &plan(), None),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn linear_in_input() {
        let p = plan();
        let a = noise(3000, 1);
        let b = noise(3000, 2);
        let combo: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 2.5 * x - 0.75 * y).collect();
        let sa = stft(&mono(a), &p).unwrap();
        let sb = stft(&mono(b), &p).unwrap();
        let sc = stft(&mono(combo), &p).unwrap();
        let scale: f64 = sc.as_flat().iter().map(|z| z.norm()).fold(0.0, f64::max);
        for k in 0..sc.as_flat().len() {
            let expect = sa.as_flat()[k] * 2.5 - sb.as_flat()[k] * 0.75;
            assert!((sc.as_flat()[k] - expect).norm() <= 1e-6 * scale);
        }
        let ya = istft(&sa, &p, None).unwrap();
        let ya2 = istft(&sa.scale(Complex64::new(-3.0, 0.0)), &p, None).unwrap();
        for (u, v) in ya.channel(0).iter().zip(ya2.channel(0)) {
            assert!((v + 3.0 * u).abs() <= 1e-6 * (3.0 * u.abs()).max(1e-9));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn round_trip_random_lengths(len in 1024usize..6000, seed in any::<u64>()) {
            let p = plan();
            let x = noise(len, seed);
            let spec = stft(&mono(x.clone()), &p).unwrap();
            let y = istft(&spec, &p, Some(len)).unwrap();
            for n in p.interior(spec.n_frames()) {
                prop_assert!((y.channel(0)[n] - x[n]).abs() < 1e-9);
            }
        }
    }
}
