//! Deterministic far-field scene synthesis.
//!
//! Sources are rendered as plane waves on the array (or convolved with
//! user-supplied multi-channel impulse responses), placed so that the two
//! talkers overlap by a requested fraction, mixed at a given SIR on the
//! reference channel and optionally corrupted by independent white sensor
//! noise.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;
use crate::metrics;
use crate::tensorio::{read_wav, write_wav, BitDepth};
use crate::types::{MultiChannelWaveform, SignalConfig, Waveform};

/// Relative delays within this many samples of an integer are applied as
/// exact sample shifts.
const INTEGER_DELAY_TOL: f64 = 1e-9;

pub const DEFAULT_SIR_DB: f64 = 1.5;
pub const DEFAULT_OVERLAP_RATIO: f64 = 0.8;

/// Arrival delay in samples of every channel behind the reference channel
/// for a plane wave from `theta_deg`.
pub fn relative_delays_samples(
    geometry: &ArrayGeometry,
    theta_deg: f64,
    config: &SignalConfig,
) -> Vec<f64> {
    let r = geometry.reference_channel();
    let fs = config.sample_rate_hz as f64;
    (0..geometry.n_mics())
        .map(|i| -geometry.projected_spacing(i, r, theta_deg) / config.sound_speed_m_per_s * fs)
        .collect()
}

fn shift_integer(x: &[f64], delay: i64) -> Vec<f64> {
    let n = x.len() as i64;
    (0..n)
        .map(|k| {
            let src = k - delay;
            if (0..n).contains(&src) {
                x[src as usize]
            } else {
                0.0
            }
        })
        .collect()
}

/// Delays `x` by a possibly fractional number of samples with a phase ramp
/// on the zero-padded full-length spectrum. Output keeps the input length.
pub fn fractional_delay(x: &[f64], delay: f64) -> Vec<f64> {
    let rounded = delay.round();
    if (delay - rounded).abs() < INTEGER_DELAY_TOL {
        return shift_integer(x, rounded as i64);
    }
    let pad = delay.abs().ceil() as usize + 1;
    let n_fft = (x.len() + 2 * pad).next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); n_fft];
    for (b, v) in buf[pad..].iter_mut().zip(x) {
        *b = Complex64::new(*v, 0.0);
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n_fft).process(&mut buf);
    let half = n_fft / 2;
    for (k, b) in buf.iter_mut().enumerate() {
        let freq = if k <= half {
            k as f64
        } else {
            k as f64 - n_fft as f64
        };
        let phase = -2.0 * std::f64::consts::PI * freq * delay / n_fft as f64;
        if k == half {
            *b *= phase.cos();
        } else {
            *b *= Complex64::from_polar(1.0, phase);
        }
    }
    planner.plan_fft_inverse(n_fft).process(&mut buf);
    let scale = 1.0 / n_fft as f64;
    buf[pad..pad + x.len()]
        .iter()
        .map(|z| z.re * scale)
        .collect()
}

/// Far-field rendering of `source` on every microphone. The reference
/// channel is the source itself.
pub fn render_plane_wave(
    source: &Waveform,
    geometry: &ArrayGeometry,
    theta_deg: f64,
    config: &SignalConfig,
) -> Result<MultiChannelWaveform> {
    if !(0.0..=180.0).contains(&theta_deg) {
        return Err(Error::InvalidAngle(theta_deg));
    }
    if source.is_empty() {
        return Err(Error::InputTooShort { len: 0, needed: 1 });
    }
    let delays = relative_delays_samples(geometry, theta_deg, config);
    let x = source.samples();
    let channels = delays
        .iter()
        .map(|&d| {
            if d == 0.0 {
                x.to_vec()
            } else {
                fractional_delay(x, d)
            }
        })
        .collect();
    MultiChannelWaveform::new(channels, source.sample_rate_hz())
}

/// Linear convolution of `source` with each channel of `rir`.
pub fn render_with_rir(
    source: &Waveform,
    rir: &MultiChannelWaveform,
) -> Result<MultiChannelWaveform> {
    if source.sample_rate_hz() != rir.sample_rate_hz() {
        return Err(Error::InvalidConfig(format!(
            "source at {} Hz, impulse response at {} Hz",
            source.sample_rate_hz(),
            rir.sample_rate_hz()
        )));
    }
    let out_len = source.len() + rir.len() - 1;
    let n_fft = out_len.next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n_fft);
    let inv = planner.plan_fft_inverse(n_fft);
    let to_spec = |x: &[f64]| {
        let mut b = vec![Complex64::new(0.0, 0.0); n_fft];
        for (z, v) in b.iter_mut().zip(x) {
            *z = Complex64::new(*v, 0.0);
        }
        fwd.process(&mut b);
        b
    };
    let src = to_spec(source.samples());
    let channels = rir
        .channels()
        .iter()
        .map(|h| {
            let mut b = to_spec(h);
            for (z, s) in b.iter_mut().zip(&src) {
                *z *= s;
            }
            inv.process(&mut b);
            b[..out_len].iter().map(|z| z.re / n_fft as f64).collect()
        })
        .collect();
    MultiChannelWaveform::new(channels, source.sample_rate_hz())
}

/// Result of [`mix_at_sir`].
#[derive(Debug, Clone)]
pub struct Mix {
    pub mixture: MultiChannelWaveform,
    pub target: MultiChannelWaveform,
    pub interferer: MultiChannelWaveform,
    pub interferer_gain: f64,
    pub achieved_sir_db: f64,
}

/// Scales the interferer so that the reference-channel energy ratio over
/// `region` equals `sir_db`, then sums. An empty region means the whole
/// signal.
pub fn mix_at_sir(
    target_img: &MultiChannelWaveform,
    interferer_img: &MultiChannelWaveform,
    sir_db: f64,
    reference: usize,
    region: std::ops::Range<usize>,
) -> Result<Mix> {
    if target_img.len() != interferer_img.len() {
        return Err(Error::LengthMismatch(
            target_img.len(),
            interferer_img.len(),
        ));
    }
    if target_img.n_channels() != interferer_img.n_channels() {
        return Err(Error::DimensionMismatch {
            what: "image channels",
            expected: target_img.n_channels(),
            actual: interferer_img.n_channels(),
        });
    }
    if !sir_db.is_finite() {
        return Err(Error::InvalidConfig("SIR must be finite".into()));
    }
    let region = if region.is_empty() {
        0..target_img.len()
    } else {
        region
    };
    let energy = |x: &[f64]| x[region.clone()].iter().map(|v| v * v).sum::<f64>();
    let e_t = energy(target_img.channel(reference));
    let e_i = energy(interferer_img.channel(reference));
    if e_t == 0.0 {
        return Err(Error::SilentSource("target"));
    }
    if e_i == 0.0 {
        return Err(Error::SilentSource("interferer"));
    }
    let gain = (e_t / (e_i * 10f64.powf(sir_db / 10.0))).sqrt();
    let scaled: Vec<Vec<f64>> = interferer_img
        .channels()
        .iter()
        .map(|c| c.iter().map(|v| v * gain).collect())
        .collect();
    let mixture: Vec<Vec<f64>> = target_img
        .channels()
        .iter()
        .zip(&scaled)
        .map(|(t, i)| t.iter().zip(i).map(|(a, b)| a + b).collect())
        .collect();
    let achieved_sir_db = 10.0 * (e_t / energy(&scaled[reference])).log10();
    let fs = target_img.sample_rate_hz();
    Ok(Mix {
        mixture: MultiChannelWaveform::new(mixture, fs)?,
        target: target_img.clone(),
        interferer: MultiChannelWaveform::new(scaled, fs)?,
        interferer_gain: gain,
        achieved_sir_db,
    })
}

/// Independent white Gaussian noise per channel, each channel scaled to
/// energy `|x_ref|² · 10^(-snr/10)` exactly.
pub fn sensor_noise(
    mc: &MultiChannelWaveform,
    snr_db: f64,
    seed: u64,
    reference: usize,
) -> Result<MultiChannelWaveform> {
    if !snr_db.is_finite() {
        return Err(Error::InvalidConfig("noise SNR must be finite".into()));
    }
    let ref_energy: f64 = mc.channel(reference).iter().map(|v| v * v).sum();
    let target_energy = ref_energy * 10f64.powf(-snr_db / 10.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let channels = (0..mc.n_channels())
        .map(|_| {
            let raw: Vec<f64> = (0..mc.len()).map(|_| rng.sample(StandardNormal)).collect();
            let e: f64 = raw.iter().map(|v| v * v).sum();
            let g = if e > 0.0 {
                (target_energy / e).sqrt()
            } else {
                0.0
            };
            raw.into_iter().map(|v| v * g).collect()
        })
        .collect();
    MultiChannelWaveform::new(channels, mc.sample_rate_hz())
}

/// `mc` plus [`sensor_noise`].
pub fn add_sensor_noise(
    mc: &MultiChannelWaveform,
    snr_db: f64,
    seed: u64,
    reference: usize,
) -> Result<MultiChannelWaveform> {
    let noise = sensor_noise(mc, snr_db, seed, reference)?;
    add(mc, &noise)
}

fn add(a: &MultiChannelWaveform, b: &MultiChannelWaveform) -> Result<MultiChannelWaveform> {
    let channels = a
        .channels()
        .iter()
        .zip(b.channels())
        .map(|(x, y)| x.iter().zip(y).map(|(u, v)| u + v).collect())
        .collect();
    MultiChannelWaveform::new(channels, a.sample_rate_hz())
}

fn place(mc: &MultiChannelWaveform, offset: usize, total: usize) -> Result<MultiChannelWaveform> {
    let channels = mc
        .channels()
        .iter()
        .map(|c| {
            let mut v = vec![0.0; total];
            v[offset..offset + c.len()].copy_from_slice(c);
            v
        })
        .collect();
    MultiChannelWaveform::new(channels, mc.sample_rate_hz())
}

/// Speech-like test signal: voiced syllables with gliding pitch and
/// formant-shaped harmonics, fricative noise bursts and a low noise floor
/// in pauses. Deterministic for a given seed; peak amplitude 0.5.
pub fn synthetic_talker(seed: u64, len: usize, sample_rate_hz: u32) -> Result<Waveform> {
    use std::f64::consts::PI;
    let fs = sample_rate_hz as f64;
    let nyquist = fs / 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![0.0; len];
    let mut pos = 0usize;
    while pos < len {
        let dur = (rng.random_range(0.12..0.32) * fs) as usize;
        let end = (pos + dur).min(len);
        let span = (end - pos).max(1) as f64;
        if rng.random_bool(0.8) {
            let f0_start: f64 = rng.random_range(90.0..240.0);
            let f0_end = f0_start * rng.random_range(0.8..1.25);
            let formants = [
                (rng.random_range(300.0..850.0), 90.0),
                (rng.random_range(900.0..2300.0), 120.0),
                (rng.random_range(2300.0..3400.0), 180.0),
                (rng.random_range(3500.0..5500.0), 400.0),
            ];
            let loud: f64 = rng.random_range(0.4..1.0);
            let mut phase = rng.random_range(0.0..2.0 * PI);
            let max_h = (nyquist / f0_start.min(f0_end)).floor() as usize;
            let harmonics: Vec<(usize, f64, f64)> = (1..=max_h)
                .map(|h| (h, rng.random_range(0.0..2.0 * PI), 0.0))
                .collect();
            for (k, o) in out[pos..end].iter_mut().enumerate() {
                let u = k as f64 / span;
                let f0 = f0_start + (f0_end - f0_start) * u;
                phase += 2.0 * PI * f0 / fs;
                let env = (PI * u).sin().powf(0.6) * loud;
                let mut v = 0.0;
                for &(h, ph, _) in &harmonics {
                    let fh = h as f64 * f0;
                    if fh >= nyquist {
                        break;
                    }
                    let gain: f64 = formants
                        .iter()
                        .map(|(fc, bw)| 1.0 / (1.0 + ((fh - fc) / bw).powi(2)))
                        .sum::<f64>()
                        / (h as f64).sqrt();
                    v += gain * (h as f64 * phase + ph).sin();
                }
                *o += env * v;
            }
        } else {
            let loud: f64 = rng.random_range(0.05..0.3);
            let mut prev = 0.0;
            for (k, o) in out[pos..end].iter_mut().enumerate() {
                let u = k as f64 / span;
                let w: f64 = rng.sample(StandardNormal);
                let hp = w - 0.7 * prev;
                prev = w;
                *o += loud * (PI * u).sin() * hp;
            }
        }
        pos = end;
        if pos < len && rng.random_bool(0.3) {
            pos += (rng.random_range(0.03..0.15) * fs) as usize;
        }
    }
    let peak = out.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let norm = if peak > 0.0 { 0.5 / peak } else { 1.0 };
    for v in &mut out {
        *v = *v * norm + 1e-4 * rng.sample::<f64, _>(StandardNormal);
    }
    Waveform::new(out, sample_rate_hz)
}

/// Scene description as stored in scenario files. Paths are resolved
/// relative to the scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub target_wav: PathBuf,
    pub interferer_wav: PathBuf,
    pub theta_target_deg: f64,
    pub theta_interferer_deg: f64,
    #[serde(default = "default_sir")]
    pub sir_db: f64,
    #[serde(default = "default_overlap")]
    pub overlap_ratio: f64,
    #[serde(default)]
    pub noise_snr_db: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    /// Omitted means the default 15-microphone array.
    #[serde(default)]
    pub geometry: Option<PathBuf>,
    #[serde(default = "default_rate")]
    pub sample_rate_hz: u32,
    #[serde(default)]
    pub target_rir_wav: Option<PathBuf>,
    #[serde(default)]
    pub interferer_rir_wav: Option<PathBuf>,
}

fn default_sir() -> f64 {
    DEFAULT_SIR_DB
}

fn default_overlap() -> f64 {
    DEFAULT_OVERLAP_RATIO
}

fn default_rate() -> u32 {
    16_000
}

impl Scenario {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut s: Scenario = toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut s.target_wav);
        resolve(&mut s.interferer_wav);
        for p in [
            &mut s.geometry,
            &mut s.target_rir_wav,
            &mut s.interferer_rir_wav,
        ]
        .into_iter()
        .flatten()
        {
            resolve(p);
        }
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for th in [self.theta_target_deg, self.theta_interferer_deg] {
            if !(0.0..=180.0).contains(&th) {
                return Err(Error::InvalidAngle(th));
            }
        }
        if !(0.0..=1.0).contains(&self.overlap_ratio) {
            return Err(Error::InvalidConfig(format!(
                "overlap_ratio {} not in [0, 1]",
                self.overlap_ratio
            )));
        }
        if !self.sir_db.is_finite() || self.noise_snr_db.is_some_and(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(
                "SIR and noise SNR must be finite".into(),
            ));
        }
        Ok(())
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }
}

/// Mixing parameters for in-memory scene generation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneParams {
    pub theta_target_deg: f64,
    pub theta_interferer_deg: f64,
    pub sir_db: f64,
    pub overlap_ratio: f64,
    pub noise_snr_db: Option<f64>,
    pub seed: u64,
}

impl SceneParams {
    pub fn new(theta_target_deg: f64, theta_interferer_deg: f64) -> Self {
        Self {
            theta_target_deg,
            theta_interferer_deg,
            sir_db: DEFAULT_SIR_DB,
            overlap_ratio: DEFAULT_OVERLAP_RATIO,
            noise_snr_db: None,
            seed: 0,
        }
    }
}

/// What was actually realised, echoed next to the scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneMetadata {
    pub scenario: Option<Scenario>,
    pub theta_target_deg: f64,
    pub theta_interferer_deg: f64,
    pub sample_rate_hz: u32,
    pub n_channels: usize,
    /// 1-based.
    pub reference_channel: usize,
    pub requested_sir_db: f64,
    pub achieved_sir_db: f64,
    pub interferer_gain: f64,
    pub interferer_offset_samples: usize,
    pub overlap_samples: usize,
    pub requested_overlap_ratio: f64,
    pub achieved_overlap_ratio: f64,
    pub noise_snr_db: Option<f64>,
    pub seed: u64,
    pub mixture_len: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneBundle {
    pub mixture: MultiChannelWaveform,
    pub target_image: MultiChannelWaveform,
    pub interferer_image: MultiChannelWaveform,
    pub noise: Option<MultiChannelWaveform>,
    pub metadata: SceneMetadata,
}

/// Overlap layout for two images padded to a common length `len`:
/// the interferer starts at `len - overlap`, which centres the overlapped
/// span in the mixture.
pub fn overlap_layout(len: usize, overlap_ratio: f64) -> (usize, usize) {
    let overlap = (overlap_ratio * len as f64).round() as usize;
    (len - overlap, overlap)
}

/// Mixes two already-rendered images into a scene.
pub fn compose_scene(
    target_img: &MultiChannelWaveform,
    interferer_img: &MultiChannelWaveform,
    geometry: &ArrayGeometry,
    params: &SceneParams,
) -> Result<SceneBundle> {
    let len = target_img.len().max(interferer_img.len());
    let (offset, overlap) = overlap_layout(len, params.overlap_ratio);
    let total = len + offset;
    let t = place(target_img, 0, total)?;
    let i = place(interferer_img, offset, total)?;
    let reference = geometry.reference_channel();
    let mix = mix_at_sir(&t, &i, params.sir_db, reference, offset..len)?;
    let (mixture, noise) = match params.noise_snr_db {
        Some(snr) => {
            let noise = sensor_noise(&mix.target, snr, params.seed, reference)?;
            (add(&mix.mixture, &noise)?, Some(noise))
        }
        None => (mix.mixture, None),
    };
    let metadata = SceneMetadata {
        scenario: None,
        theta_target_deg: params.theta_target_deg,
        theta_interferer_deg: params.theta_interferer_deg,
        sample_rate_hz: target_img.sample_rate_hz(),
        n_channels: target_img.n_channels(),
        reference_channel: reference + 1,
        requested_sir_db: params.sir_db,
        achieved_sir_db: mix.achieved_sir_db,
        interferer_gain: mix.interferer_gain,
        interferer_offset_samples: offset,
        overlap_samples: overlap,
        requested_overlap_ratio: params.overlap_ratio,
        achieved_overlap_ratio: overlap as f64 / len as f64,
        noise_snr_db: params.noise_snr_db,
        seed: params.seed,
        mixture_len: total,
    };
    Ok(SceneBundle {
        mixture,
        target_image: mix.target,
        interferer_image: mix.interferer,
        noise,
        metadata,
    })
}

/// Renders two sources as plane waves and mixes them.
pub fn simulate_sources(
    target: &Waveform,
    interferer: &Waveform,
    geometry: &ArrayGeometry,
    params: &SceneParams,
) -> Result<SceneBundle> {
    if target.sample_rate_hz() != interferer.sample_rate_hz() {
        return Err(Error::InvalidConfig("sources differ in sample rate".into()));
    }
    let config = SignalConfig::with_sample_rate(target.sample_rate_hz());
    let t = render_plane_wave(target, geometry, params.theta_target_deg, &config)?;
    let i = render_plane_wave(interferer, geometry, params.theta_interferer_deg, &config)?;
    compose_scene(&t, &i, geometry, params)
}

fn load_mono(path: &Path, expected_rate: u32) -> Result<Waveform> {
    let wave = read_wav(path)?;
    if wave.sample_rate_hz() != expected_rate {
        return Err(Error::InvalidConfig(format!(
            "{} is at {} Hz, scenario expects {expected_rate} Hz",
            path.display(),
            wave.sample_rate_hz()
        )));
    }
    Ok(wave.to_mono(0))
}

/// Loads the scenario's sources and geometry and renders the scene.
pub fn simulate_scenario(scenario: &Scenario) -> Result<SceneBundle> {
    scenario.validate()?;
    let geometry = match &scenario.geometry {
        Some(p) => ArrayGeometry::load(p)?,
        None => ArrayGeometry::default_ula(),
    };
    let fs = scenario.sample_rate_hz;
    let target = load_mono(&scenario.target_wav, fs)?;
    let interferer = load_mono(&scenario.interferer_wav, fs)?;
    let config = SignalConfig::with_sample_rate(fs);
    let render = |src: &Waveform, theta: f64, rir: &Option<PathBuf>| match rir {
        Some(p) => {
            let h = read_wav(p)?;
            if h.n_channels() != geometry.n_mics() {
                return Err(Error::DimensionMismatch {
                    what: "impulse response channels",
                    expected: geometry.n_mics(),
                    actual: h.n_channels(),
                });
            }
            render_with_rir(src, &h)
        }
        None => render_plane_wave(src, &geometry, theta, &config),
    };
    let t = render(&target, scenario.theta_target_deg, &scenario.target_rir_wav)?;
    let i = render(
        &interferer,
        scenario.theta_interferer_deg,
        &scenario.interferer_rir_wav,
    )?;
    let params = SceneParams {
        theta_target_deg: scenario.theta_target_deg,
        theta_interferer_deg: scenario.theta_interferer_deg,
        sir_db: scenario.sir_db,
        overlap_ratio: scenario.overlap_ratio,
        noise_snr_db: scenario.noise_snr_db,
        seed: scenario.seed,
    };
    let mut bundle = compose_scene(&t, &i, &geometry, &params)?;
    bundle.metadata.scenario = Some(scenario.clone());
    Ok(bundle)
}

pub const MIXTURE_WAV: &str = "mixture.wav";
pub const TARGET_WAV: &str = "target.wav";
pub const INTERFERER_WAV: &str = "interferer.wav";
pub const META_JSON: &str = "meta.json";

impl SceneBundle {
    /// Writes `mixture.wav`, `target.wav`, `interferer.wav` (float32) and
    /// `meta.json` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_wav(dir.join(MIXTURE_WAV), &self.mixture, BitDepth::Float32)?;
        write_wav(dir.join(TARGET_WAV), &self.target_image, BitDepth::Float32)?;
        write_wav(
            dir.join(INTERFERER_WAV),
            &self.interferer_image,
            BitDepth::Float32,
        )?;
        let meta = serde_json::to_string_pretty(&self.metadata).expect("metadata serializes");
        let path = dir.join(META_JSON);
        std::fs::write(&path, meta + "\n").map_err(|e| Error::io(&path, e))
    }

    /// Reads a bundle directory. Sensor noise is not stored separately.
    pub fn read(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let path = dir.join(META_JSON);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let metadata: SceneMetadata = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.clone(),
            message: e.to_string(),
        })?;
        Ok(Self {
            mixture: read_wav(dir.join(MIXTURE_WAV))?,
            target_image: read_wav(dir.join(TARGET_WAV))?,
            interferer_image: read_wav(dir.join(INTERFERER_WAV))?,
            noise: None,
            metadata,
        })
    }

    /// Reference channel index, 0-based.
    pub fn reference(&self) -> usize {
        self.metadata.reference_channel - 1
    }

    /// Measured SIR on the reference channel over the overlapped span.
    pub fn measured_sir_db(&self) -> f64 {
        let r = self.reference();
        let off = self.metadata.interferer_offset_samples;
        let end = off + self.metadata.overlap_samples;
        let (range_t, range_i) = if end > off {
            (
                &self.target_image.channel(r)[off..end],
                &self.interferer_image.channel(r)[off..end],
            )
        } else {
            (
                self.target_image.channel(r),
                self.interferer_image.channel(r),
            )
        };
        metrics::energy_ratio_db(range_t, range_i)
    }
}
