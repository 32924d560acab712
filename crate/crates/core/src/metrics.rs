//! Scale-invariant SNR and plain SNR on time-domain signals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::Waveform;

pub const EPS: f64 = 1e-8;
pub const CLAMP_DB: f64 = 80.0;

/// One evaluation record. Serialises with fields in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub si_snr_db: f64,
    pub snr_db: f64,
    pub length_samples: usize,
}

impl MetricReport {
    pub fn compute(estimate: &Waveform, reference: &Waveform) -> Result<Self> {
        Ok(Self {
            si_snr_db: si_snr(estimate, reference)?,
            snr_db: snr(estimate, reference)?,
            length_samples: reference.len(),
        })
    }

    /// Single-line JSON record.
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("metric report serializes")
    }
}

fn clamp_db(x: f64) -> f64 {
    x.clamp(-CLAMP_DB, CLAMP_DB)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn zero_mean(x: &[f64]) -> Vec<f64> {
    let mean = x.iter().sum::<f64>() / x.len().max(1) as f64;
    x.iter().map(|v| v - mean).collect()
}

fn check_lengths(a: &Waveform, b: &Waveform) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    Ok(())
}

/// Scale-invariant SNR in dB.
///
/// Both signals are made zero-mean, the estimate is projected onto the
/// reference, and `10 log10((|s|² + ε) / (|e|² + ε))` is returned clamped to
/// ±80 dB.
pub fn si_snr(estimate: &Waveform, reference: &Waveform) -> Result<f64> {
    si_snr_slices(estimate.samples(), reference.samples())
}

pub fn si_snr_slices(estimate: &[f64], reference: &[f64]) -> Result<f64> {
    if estimate.len() != reference.len() {
        return Err(Error::LengthMismatch(estimate.len(), reference.len()));
    }
    let est = zero_mean(estimate);
    let refr = zero_mean(reference);
    let ref_energy = dot(&refr, &refr);
    if ref_energy == 0.0 {
        return Err(Error::ZeroReference);
    }
    let alpha = dot(&est, &refr) / ref_energy;
    let mut target_energy = 0.0;
    let mut error_energy = 0.0;
    for (e, r) in est.iter().zip(&refr) {
        let s = alpha * r;
        target_energy += s * s;
        error_energy += (e - s) * (e - s);
    }
    Ok(clamp_db(
        10.0 * ((target_energy + EPS) / (error_energy + EPS)).log10(),
    ))
}

/// Plain SNR `10 log10(|ref|² / |est - ref|²)` with the same ε guard and clamp.
pub fn snr(estimate: &Waveform, reference: &Waveform) -> Result<f64> {
    check_lengths(estimate, reference)?;
    snr_slices(estimate.samples(), reference.samples())
}

pub fn snr_slices(estimate: &[f64], reference: &[f64]) -> Result<f64> {
    if estimate.len() != reference.len() {
        return Err(Error::LengthMismatch(estimate.len(), reference.len()));
    }
    let ref_energy = dot(reference, reference);
    let err_energy: f64 = estimate
        .iter()
        .zip(reference)
        .map(|(e, r)| (e - r) * (e - r))
        .sum();
    Ok(clamp_db(
        10.0 * ((ref_energy + EPS) / (err_energy + EPS)).log10(),
    ))
}

/// Energy ratio `10 log10(|a|² / |b|²)` without guard or clamp.
pub fn energy_ratio_db(a: &[f64], b: &[f64]) -> f64 {
    10.0 * (dot(a, a) / dot(b, b)).log10()
}
