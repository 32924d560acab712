// Mask-based MVDR on simulated scenes, first step by step and then through
// the same entry point the command line uses.
//
//     cargo run --example mvdr_oracle

use mcsep::beamform::{apply_beamformer, estimate_psd_set, mvdr_weights};
use mcsep::cli::{separate, Method, SeparationConfig, SeparationInput};
use mcsep::masking::ideal_ratio_mask;
use mcsep::metrics::si_snr_slices;
use mcsep::simulate::{simulate_sources, synthetic_talker, SceneParams};
use mcsep::{istft, stft, ArrayGeometry, MultiChannelWaveform, SignalConfig, StftPlan};

pub fn run_example() -> mcsep::Result<()> {
    let plan = StftPlan::new(SignalConfig::default())?;
    let geometry = ArrayGeometry::default_ula();
    let target = synthetic_talker(31, 3 * 16_000, 16_000)?;
    let interferer = synthetic_talker(32, 3 * 16_000, 16_000)?;
    let scene = simulate_sources(
        &target,
        &interferer,
        &geometry,
        &SceneParams::new(70.0, 140.0),
    )?;
    let r = scene.reference();

    let mono =
        |w: &MultiChannelWaveform| stft(&MultiChannelWaveform::from_mono(w.to_mono(r)), &plan);
    let (s, v) = (mono(&scene.target_image)?, mono(&scene.interferer_image)?);
    let x = stft(&scene.mixture, &plan)?;

    let psd = estimate_psd_set(&x, &ideal_ratio_mask(&s, &v)?, &ideal_ratio_mask(&v, &s)?)?;
    let w = mvdr_weights(&psd, r)?;
    let y = istft(&apply_beamformer(&w, &x)?, &plan, Some(scene.mixture.len()))?;

    let iv = plan.interior(x.n_frames());
    let clean = &scene.target_image.channel(r)[iv.clone()];
    let raw = si_snr_slices(&scene.mixture.channel(r)[iv.clone()], clean)?;
    let out = si_snr_slices(&y.channel(0)[iv], clean)?;
    println!("step by step: {raw:.2} dB -> {out:.2} dB");

    let input = SeparationInput {
        mixture: scene.mixture.clone(),
        target: Some(scene.target_image.clone()),
        geometry: geometry.with_reference(r)?,
    };
    let result = separate(&input, &SeparationConfig::oracle(Method::Mvdr))?;
    for m in &result.metrics {
        println!(
            "{:>13}: {:.2} dB over the full length",
            m.label, m.report.si_snr_db
        );
    }
    assert!(out > raw);
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
