// Single-channel separation with oracle time-frequency masks on a
// two-talker scene.
//
//     cargo run --example tf_masking

use mcsep::masking::{apply_mask, ideal_complex_mask, ideal_ratio_mask, DEFAULT_MASK_CLIP};
use mcsep::metrics::si_snr_slices;
use mcsep::simulate::{simulate_sources, synthetic_talker, SceneParams};
use mcsep::{istft, stft, ArrayGeometry, MultiChannelWaveform, SignalConfig, StftPlan};

pub fn run_example() -> mcsep::Result<()> {
    let plan = StftPlan::new(SignalConfig::default())?;
    let target = synthetic_talker(1, 2 * 16_000, 16_000)?;
    let interferer = synthetic_talker(2, 2 * 16_000, 16_000)?;
    let scene = simulate_sources(
        &target,
        &interferer,
        &ArrayGeometry::default_ula(),
        &SceneParams::new(45.0, 110.0),
    )?;
    let r = scene.reference();
    let mono =
        |w: &MultiChannelWaveform| stft(&MultiChannelWaveform::from_mono(w.to_mono(r)), &plan);
    let (x, s, v) = (
        mono(&scene.mixture)?,
        mono(&scene.target_image)?,
        mono(&scene.interferer_image)?,
    );

    let interior = plan.interior(x.n_frames());
    let clean = &scene.target_image.channel(r)[interior.clone()];
    let score = |spec| -> mcsep::Result<f64> {
        let y = istft(&spec, &plan, Some(scene.mixture.len()))?;
        si_snr_slices(&y.channel(0)[interior.clone()], clean)
    };

    let raw = si_snr_slices(&scene.mixture.channel(r)[interior.clone()], clean)?;
    let irm = score(apply_mask(&ideal_ratio_mask(&s, &v)?, &x)?)?;
    let icm = score(apply_mask(
        &ideal_complex_mask(&s, &x, DEFAULT_MASK_CLIP)?,
        &x,
    )?)?;
    println!("mixture          {raw:6.2} dB");
    println!("ideal ratio mask {irm:6.2} dB");
    println!("complex mask     {icm:6.2} dB");
    assert!(icm > irm && irm > raw);
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
