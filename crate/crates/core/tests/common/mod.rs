#![allow(dead_code)]

use mcsep::simulate::{simulate_sources, synthetic_talker, SceneBundle, SceneParams};
use mcsep::{ArrayGeometry, Complex64, ComplexSpectrogram, SignalConfig, StftPlan};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FS: u32 = 16_000;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn plan() -> StftPlan {
    StftPlan::new(SignalConfig::default()).unwrap()
}

/// Two integer directions in [0, 180] at least 20° apart.
pub fn draw_angles(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let target = rng.random_range(0..=180) as f64;
    loop {
        let other = rng.random_range(0..=180) as f64;
        if (other - target).abs() >= 20.0 {
            return (target, other);
        }
    }
}

/// Two-talker scene number `k` on the default array.
pub fn scene(k: u64, seconds: f64, sir_db: f64) -> SceneBundle {
    let mut r = rng(0x5CE7E + k);
    let (tt, ti) = draw_angles(&mut r);
    let len = (seconds * FS as f64) as usize;
    let target = synthetic_talker(2 * k + 1000, len, FS).unwrap();
    let interferer = synthetic_talker(2 * k + 1001, len, FS).unwrap();
    let mut p = SceneParams::new(tt, ti);
    p.sir_db = sir_db;
    p.seed = k;
    simulate_sources(&target, &interferer, &ArrayGeometry::default_ula(), &p).unwrap()
}

pub fn complex_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(rand_distr::StandardNormal);
    let im: f64 = rng.sample(rand_distr::StandardNormal);
    Complex64::new(re, im)
}

pub fn random_spec(rng: &mut ChaCha8Rng, dims: (usize, usize, usize)) -> ComplexSpectrogram {
    let data = (0..dims.0 * dims.1 * dims.2)
        .map(|_| complex_normal(rng))
        .collect();
    ComplexSpectrogram::from_flat(data, dims).unwrap()
}

pub fn energy(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// nalgebra copy of a row-major complex matrix.
pub fn to_na(n: usize, data: &[Complex64]) -> nalgebra::DMatrix<Complex64> {
    nalgebra::DMatrix::from_row_slice(n, n, data)
}
