mod common;

use common::*;
use mcsep::beamform::{
    apply_beamformer, estimate_psd, estimate_psd_set, filter_and_sum, mvdr_pipeline,
    mvdr_weights_with_loading, oracle_filter_weights, PsdSet,
};
use mcsep::linalg::CMatrix;
use mcsep::masking::{apply_mask, ideal_ratio_mask};
use mcsep::metrics::si_snr_slices;
use mcsep::simulate::{render_plane_wave, sensor_noise, synthetic_talker};
use mcsep::{
    istft, stft, ArrayGeometry, Complex64, MultiChannelWaveform, SignalConfig, TimeFrequencyMask,
};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

fn reference_spec(w: &MultiChannelWaveform, r: usize) -> mcsep::ComplexSpectrogram {
    stft(&MultiChannelWaveform::from_mono(w.to_mono(r)), &plan()).unwrap()
}

fn oracle_masks(
    a: &mcsep::ComplexSpectrogram,
    b: &mcsep::ComplexSpectrogram,
) -> (TimeFrequencyMask, TimeFrequencyMask) {
    (
        ideal_ratio_mask(a, b).unwrap(),
        ideal_ratio_mask(b, a).unwrap(),
    )
}

#[test]
fn unloaded_mvdr_matches_textbook_form() {
    let mut r = rng(21);
    for _ in 0..200 {
        let n = r.random_range(2..=8);
        let reference = r.random_range(0..n);
        let a = DMatrix::from_fn(n, n, |_, _| complex_normal(&mut r));
        let phi_n = &a * a.adjoint() + DMatrix::identity(n, n) * Complex64::new(0.2, 0.0);
        let h = DVector::from_fn(n, |_, _| complex_normal(&mut r));
        let phi_s = &h * h.adjoint() * Complex64::new(3.0, 0.0);
        let row_major =
            |m: &DMatrix<Complex64>| CMatrix::from_rows(n, m.transpose().iter().cloned().collect());
        let psd = PsdSet::new(vec![row_major(&phi_s)], vec![row_major(&phi_n)]).unwrap();
        let w = mvdr_weights_with_loading(&psd, reference, 0.0).unwrap();
        let g = phi_n.clone().try_inverse().unwrap() * &h;
        let denom = (h.adjoint() * &g)[(0, 0)];
        for i in 0..n {
            let expect = g[i] * h[reference].conj() / denom;
            assert!((w.as_flat()[i] - expect).norm() <= 1e-6 * expect.norm());
        }
        // distortionless toward h: wᴴ h = h_R
        let resp: Complex64 = (0..n).map(|i| w.as_flat()[i].conj() * h[i]).sum();
        assert!((resp - h[reference]).norm() <= 1e-9 * h[reference].norm());
    }
}

#[test]
fn mvdr_is_distortionless_on_a_single_plane_wave() {
    let g = ArrayGeometry::default_ula();
    let cfg = SignalConfig::default();
    let plan = plan();
    for (seed, theta) in [(1u64, 30.0), (2, 75.0), (3, 140.0)] {
        let src = synthetic_talker(seed, 32_000, FS).unwrap();
        let target = render_plane_wave(&src, &g, theta, &cfg).unwrap();
        let noise = sensor_noise(&target, 5.0, seed, 0).unwrap();
        let mix_channels = target
            .channels()
            .iter()
            .zip(noise.channels())
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        let mix = MultiChannelWaveform::new(mix_channels, FS).unwrap();
        // both PSDs from their own component, so none of the target leaks into the noise estimate
        let spec = stft(&mix, &plan).unwrap();
        let ones =
            TimeFrequencyMask::constant(Complex64::new(1.0, 0.0), (spec.n_frames(), spec.n_bins()));
        let psd = PsdSet::new(
            estimate_psd(&stft(&target, &plan).unwrap(), &ones).unwrap(),
            estimate_psd(&stft(&noise, &plan).unwrap(), &ones).unwrap(),
        )
        .unwrap();
        let w = mvdr_weights_with_loading(&psd, 0, 1e-6).unwrap();
        let y = istft(
            &apply_beamformer(&w, &spec).unwrap(),
            &plan,
            Some(mix.len()),
        )
        .unwrap();
        let iv = plan.interior(spec.n_frames());
        let (y, s) = (&y.channel(0)[iv.clone()], &target.channel(0)[iv]);
        let alpha = y.iter().zip(s).map(|(a, b)| a * b).sum::<f64>() / energy(s);
        assert!(
            (20.0 * alpha.log10()).abs() < 0.1,
            "theta {theta}: gain {alpha}"
        );
    }
}

#[test]
fn swapped_masks_steer_toward_the_interferer() {
    let plan = plan();
    let b = scene(3, 2.0, 0.0);
    let r = b.reference();
    let spec = stft(&b.mixture, &plan).unwrap();
    let (ms, mn) = oracle_masks(
        &reference_spec(&b.target_image, r),
        &reference_spec(&b.interferer_image, r),
    );
    let y = istft(
        &mvdr_pipeline(&spec, &mn, &ms, r).unwrap(),
        &plan,
        Some(b.mixture.len()),
    )
    .unwrap();
    let iv = plan.interior(spec.n_frames());
    let vs_interferer = si_snr_slices(
        &y.channel(0)[iv.clone()],
        &b.interferer_image.channel(r)[iv.clone()],
    )
    .unwrap();
    let vs_target =
        si_snr_slices(&y.channel(0)[iv.clone()], &b.target_image.channel(r)[iv]).unwrap();
    assert!(vs_interferer > vs_target, "{vs_interferer} vs {vs_target}");
}

#[test]
fn ratio_masking_never_hurts_on_simulated_scenes() {
    let plan = plan();
    for k in 0..4 {
        let b = scene(40 + k, 2.0, 1.5);
        let r = b.reference();
        let mix = reference_spec(&b.mixture, r);
        let (ms, _) = oracle_masks(
            &reference_spec(&b.target_image, r),
            &reference_spec(&b.interferer_image, r),
        );
        let y = istft(
            &apply_mask(&ms, &mix).unwrap(),
            &plan,
            Some(b.mixture.len()),
        )
        .unwrap();
        let iv = plan.interior(mix.n_frames());
        let t = &b.target_image.channel(r)[iv.clone()];
        let masked = si_snr_slices(&y.channel(0)[iv.clone()], t).unwrap();
        let raw = si_snr_slices(&b.mixture.channel(r)[iv], t).unwrap();
        assert!(masked >= raw, "scene {k}: {masked} < {raw}");
    }
}

#[test]
fn oracle_filter_and_sum_beats_the_raw_channel() {
    let plan = plan();
    let b = scene(11, 2.0, 0.0);
    let r = b.reference();
    let spec = stft(&b.mixture, &plan).unwrap();
    let s = reference_spec(&b.target_image, r);
    let w = oracle_filter_weights(&spec, &s, 1e-6).unwrap();
    let y = filter_and_sum(&spec, &w.broadcast(spec.n_frames(), false).unwrap()).unwrap();
    let y = istft(&y, &plan, Some(b.mixture.len())).unwrap();
    let iv = plan.interior(spec.n_frames());
    let t = &b.target_image.channel(r)[iv.clone()];
    let out = si_snr_slices(&y.channel(0)[iv.clone()], t).unwrap();
    let raw = si_snr_slices(&b.mixture.channel(r)[iv], t).unwrap();
    assert!(out > raw + 3.0, "{out} vs {raw}");
}

#[test]
fn mvdr_output_through_both_conventions_agrees() {
    let b = scene(5, 1.5, 0.0);
    let r = b.reference();
    let spec = stft(&b.mixture, &plan()).unwrap();
    let (ms, mn) = oracle_masks(
        &reference_spec(&b.target_image, r),
        &reference_spec(&b.interferer_image, r),
    );
    let w =
        mvdr_weights_with_loading(&estimate_psd_set(&spec, &ms, &mn).unwrap(), r, 1e-6).unwrap();
    let a = apply_beamformer(&w, &spec).unwrap();
    let c = filter_and_sum(&spec, &w.broadcast(spec.n_frames(), true).unwrap()).unwrap();
    for (x, y) in a.as_flat().iter().zip(c.as_flat()) {
        assert!((x - y).norm() <= 1e-12 * x.norm().max(1e-12));
    }
}
