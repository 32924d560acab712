//! Spatial input features: inter-microphone phase differences, far-field
//! phase delays, the location-guided angle feature, steering vectors and a
//! grid-search DOA helper built on the angle feature.
//!
//! Angles are azimuths in degrees from the positive x-axis in the horizontal
//! plane, so 90° is broadside to an x-axis linear array. For a pair `(i, j)`
//! the phase delay is `2π f f_s Δ_ij(θ) / (2 (F - 1) c)` where `Δ_ij(θ)` is
//! the projection of `p_i - p_j` onto the source direction; on an x-axis
//! array this is the signed spacing times `cos θ`. A plane wave from `θ`
//! gives `IPD^(i,j) = pd^(i,j)(θ)` (wrapped), so the angle feature
//! `Σ cos(pd - IPD)` peaks at the true direction.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;
use crate::types::{validate_dims, ComplexSpectrogram, SignalConfig};

/// Bins whose magnitude falls below this are treated as having no phase.
pub const PHASE_FLOOR: f64 = 1e-12;

/// Real-valued `(T, F)` map with a descriptive label.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    pub data: Vec<f64>,
    pub dims: (usize, usize),
    pub label: String,
}

impl FeatureMap {
    pub fn get(&self, t: usize, f: usize) -> f64 {
        self.data[t * self.dims.1 + f]
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }
}

/// Per-channel, per-bin steering phasors with dims `(I, F)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    pub data: Vec<Complex64>,
    pub dims: (usize, usize),
}

impl SteeringVector {
    pub fn get(&self, i: usize, f: usize) -> Complex64 {
        self.data[i * self.dims.1 + f]
    }
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_phase(x: f64) -> f64 {
    let mut y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y <= -PI {
        y += 2.0 * PI;
    }
    y
}

fn check_angle(theta_deg: f64) -> Result<()> {
    if !(0.0..=180.0).contains(&theta_deg) {
        return Err(Error::InvalidAngle(theta_deg));
    }
    Ok(())
}

fn check_pair_in_spec(spec: &ComplexSpectrogram, pair: (usize, usize)) -> Result<()> {
    let n = spec.n_channels();
    let worst = pair.0.max(pair.1);
    if worst >= n {
        return Err(Error::DimensionMismatch {
            what: "pair channel index",
            expected: n,
            actual: worst + 1,
        });
    }
    Ok(())
}

/// Phase delay per frequency bin for `pair` and a plane wave from `theta_deg`.
pub fn phase_delay(
    geometry: &ArrayGeometry,
    pair: (usize, usize),
    theta_deg: f64,
    config: &SignalConfig,
) -> Result<Vec<f64>> {
    geometry.check_pair(pair)?;
    check_angle(theta_deg)?;
    let n_bins = config.n_freq_bins();
    let spacing = geometry.projected_spacing(pair.0, pair.1, theta_deg);
    let fs = config.sample_rate_hz as f64;
    let c = config.sound_speed_m_per_s;
    Ok((0..n_bins)
        .map(|f| 2.0 * PI * f as f64 * fs * spacing / (2.0 * (n_bins - 1) as f64 * c))
        .collect())
}

/// Principal-value phase of `x_i / x_j`, zero where either bin is below
/// [`PHASE_FLOOR`].
#[inline]
pub fn ipd_bin(xi: Complex64, xj: Complex64) -> f64 {
    if xi.norm() < PHASE_FLOOR || xj.norm() < PHASE_FLOOR {
        return 0.0;
    }
    let q = xi * xj.conj();
    let a = q.im.atan2(q.re);
    if a <= -PI {
        PI
    } else {
        a
    }
}

/// Inter-microphone phase difference map for `pair`.
pub fn compute_ipd(spec: &ComplexSpectrogram, pair: (usize, usize)) -> Result<FeatureMap> {
    check_pair_in_spec(spec, pair)?;
    let (a, b) = (spec.channel(pair.0), spec.channel(pair.1));
    Ok(FeatureMap {
        data: a.iter().zip(b).map(|(x, y)| ipd_bin(*x, *y)).collect(),
        dims: (spec.n_frames(), spec.n_bins()),
        label: format!("ipd_{}_{}", pair.0 + 1, pair.1 + 1),
    })
}

fn signal_config_for(spec: &ComplexSpectrogram, config: &SignalConfig) -> Result<()> {
    if spec.n_bins() != config.n_freq_bins() {
        return Err(Error::DimensionMismatch {
            what: "frequency bins",
            expected: config.n_freq_bins(),
            actual: spec.n_bins(),
        });
    }
    Ok(())
}

/// Location-guided angle feature `AF_θ = Σ_pairs cos(pd_θ - IPD)`.
///
/// Values lie in `[-M, M]` for `M` pairs.
pub fn compute_angle_feature(
    spec: &ComplexSpectrogram,
    geometry: &ArrayGeometry,
    theta_deg: f64,
    config: &SignalConfig,
) -> Result<FeatureMap> {
    validate_dims(spec, geometry)?;
    signal_config_for(spec, config)?;
    if geometry.pairs().is_empty() {
        return Err(Error::NoPairs);
    }
    let (n_frames, n_bins) = (spec.n_frames(), spec.n_bins());
    let mut af = vec![0.0; n_frames * n_bins];
    for &pair in geometry.pairs() {
        let pd = phase_delay(geometry, pair, theta_deg, config)?;
        let (a, b) = (spec.channel(pair.0), spec.channel(pair.1));
        for (k, v) in af.iter_mut().enumerate() {
            *v += (pd[k % n_bins] - ipd_bin(a[k], b[k])).cos();
        }
    }
    Ok(FeatureMap {
        data: af,
        dims: (n_frames, n_bins),
        label: format!("af_{theta_deg}"),
    })
}

/// Far-field steering phasors relative to the reference channel.
///
/// Entry `(i, f)` is `exp(-j 2π f f_s τ_i / N)` with `τ_i` the arrival delay
/// of channel `i` behind the reference, so `∠(a_i / a_j) = pd^(i,j)`.
pub fn steering_vector(
    geometry: &ArrayGeometry,
    theta_deg: f64,
    config: &SignalConfig,
) -> Result<SteeringVector> {
    check_angle(theta_deg)?;
    let r = geometry.reference_channel();
    let n_bins = config.n_freq_bins();
    let mut data = Vec::with_capacity(geometry.n_mics() * n_bins);
    for i in 0..geometry.n_mics() {
        let pd = phase_delay(geometry, (i, r), theta_deg, config)?;
        data.extend(pd.into_iter().map(|p| {
            if p == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::from_polar(1.0, p)
            }
        }));
    }
    Ok(SteeringVector {
        data,
        dims: (geometry.n_mics(), n_bins),
    })
}

/// Integer-degree grid `0..=180`.
pub fn default_angle_grid() -> Vec<f64> {
    (0..=180).map(f64::from).collect()
}

/// Mean angle feature over informative TF bins for every grid angle.
///
/// A bin is informative when every pair's phase difference is defined.
/// With no informative bins every score is zero.
pub fn angle_feature_scores(
    spec: &ComplexSpectrogram,
    geometry: &ArrayGeometry,
    grid_deg: &[f64],
    config: &SignalConfig,
) -> Result<Vec<f64>> {
    weighted_scores(spec, geometry, grid_deg, config, None)
}

/// Like [`angle_feature_scores`] but each TF bin is weighted by `weights`
/// (dims `(T, F)`, non-negative), e.g. a target-presence mask.
pub fn weighted_angle_feature_scores(
    spec: &ComplexSpectrogram,
    geometry: &ArrayGeometry,
    grid_deg: &[f64],
    config: &SignalConfig,
    weights: &FeatureMap,
) -> Result<Vec<f64>> {
    if weights.dims != (spec.n_frames(), spec.n_bins()) {
        return Err(Error::DimensionMismatch {
            what: "angle weights (T x F)",
            expected: spec.n_frames() * spec.n_bins(),
            actual: weights.data.len(),
        });
    }
    if weights.data.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidConfig(
            "angle weights must be finite and non-negative".into(),
        ));
    }
    weighted_scores(spec, geometry, grid_deg, config, Some(&weights.data))
}

fn weighted_scores(
    spec: &ComplexSpectrogram,
    geometry: &ArrayGeometry,
    grid_deg: &[f64],
    config: &SignalConfig,
    weights: Option<&[f64]>,
) -> Result<Vec<f64>> {
    validate_dims(spec, geometry)?;
    signal_config_for(spec, config)?;
    if geometry.pairs().is_empty() {
        return Err(Error::NoPairs);
    }
    for &theta in grid_deg {
        check_angle(theta)?;
    }
    let (n_frames, n_bins) = (spec.n_frames(), spec.n_bins());
    let weight: Vec<f64> = (0..n_frames * n_bins)
        .map(|k| {
            let informative = geometry.pairs().iter().all(|&(i, j)| {
                spec.channel(i)[k].norm() >= PHASE_FLOOR && spec.channel(j)[k].norm() >= PHASE_FLOOR
            });
            match (informative, weights) {
                (false, _) => 0.0,
                (true, None) => 1.0,
                (true, Some(w)) => w[k],
            }
        })
        .collect();
    let total_weight: f64 = weight.iter().sum();
    if total_weight == 0.0 {
        return Ok(vec![0.0; grid_deg.len()]);
    }
    // ⟨e^{pd}, e^{IPD}⟩ separates, so per-bin sums of cos/sin IPD over
    // frames are enough for every angle.
    let mut sums = Vec::with_capacity(geometry.pairs().len());
    for &(i, j) in geometry.pairs() {
        let (a, b) = (spec.channel(i), spec.channel(j));
        let mut cs = vec![(0.0, 0.0); n_bins];
        for (k, &w) in weight.iter().enumerate().filter(|(_, w)| **w > 0.0) {
            let ipd = ipd_bin(a[k], b[k]);
            let slot = &mut cs[k % n_bins];
            slot.0 += w * ipd.cos();
            slot.1 += w * ipd.sin();
        }
        sums.push(cs);
    }
    grid_deg
        .iter()
        .map(|&theta| {
            let mut total = 0.0;
            for (&pair, cs) in geometry.pairs().iter().zip(&sums) {
                let pd = phase_delay(geometry, pair, theta, config)?;
                total += pd
                    .iter()
                    .zip(cs)
                    .map(|(p, (c, s))| p.cos() * c + p.sin() * s)
                    .sum::<f64>();
            }
            Ok(total / total_weight)
        })
        .collect()
}

fn argmax_angle(grid_deg: &[f64], scores: &[f64]) -> f64 {
    let mut best = (grid_deg[0], scores[0]);
    for (&theta, &score) in grid_deg.iter().zip(scores).skip(1) {
        if score > best.1 || (score == best.1 && theta < best.0) {
            best = (theta, score);
        }
    }
    best.0
}

/// Grid angle maximising the weighted mean angle feature.
pub fn estimate_doa_weighted(
    spec: &ComplexSpectrogram,
    geometry: &ArrayGeometry,
    grid_deg: &[f64],
    config: &SignalConfig,
    weights: &FeatureMap,
) -> Result<f64> {
    if grid_deg.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let scores = weighted_angle_feature_scores(spec, geometry, grid_deg, config, weights)?;
    Ok(argmax_angle(grid_deg, &scores))
}

/// Grid angle with the largest mean angle feature; ties go to the smaller
/// angle, so an input with no usable phase returns the grid minimum.
pub fn estimate_doa(
    spec: &ComplexSpectrogram,
    geometry: &ArrayGeometry,
    grid_deg: &[f64],
    config: &SignalConfig,
) -> Result<f64> {
    if grid_deg.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let scores = angle_feature_scores(spec, geometry, grid_deg, config)?;
    Ok(argmax_angle(grid_deg, &scores))
}
