// Filter-and-sum with per-bin least-squares weights fitted against the
// clean target, then saved as a BTF weight tensor.
//
//     cargo run --example filter_and_sum

use mcsep::beamform::{filter_and_sum, oracle_filter_weights, DEFAULT_DIAGONAL_LOADING};
use mcsep::metrics::si_snr_slices;
use mcsep::simulate::{simulate_sources, synthetic_talker, SceneParams};
use mcsep::tensorio::{write_btf, BtfTensor};
use mcsep::{istft, stft, ArrayGeometry, MultiChannelWaveform, SignalConfig, StftPlan};

pub fn run_example() -> mcsep::Result<()> {
    let plan = StftPlan::new(SignalConfig::default())?;
    let target = synthetic_talker(21, 2 * 16_000, 16_000)?;
    let interferer = synthetic_talker(22, 2 * 16_000, 16_000)?;
    let mut params = SceneParams::new(30.0, 95.0);
    params.sir_db = 0.0;
    let scene = simulate_sources(&target, &interferer, &ArrayGeometry::default_ula(), &params)?;
    let r = scene.reference();

    let x = stft(&scene.mixture, &plan)?;
    let s = stft(
        &MultiChannelWaveform::from_mono(scene.target_image.to_mono(r)),
        &plan,
    )?;
    let w = oracle_filter_weights(&x, &s, DEFAULT_DIAGONAL_LOADING)?;
    // time-invariant weights, applied without conjugation
    let y = filter_and_sum(&x, &w.broadcast(x.n_frames(), false)?)?;
    let y = istft(&y, &plan, Some(scene.mixture.len()))?;

    let iv = plan.interior(x.n_frames());
    let clean = &scene.target_image.channel(r)[iv.clone()];
    println!(
        "mixture        {:6.2} dB",
        si_snr_slices(&scene.mixture.channel(r)[iv.clone()], clean)?
    );
    println!(
        "filter-and-sum {:6.2} dB",
        si_snr_slices(&y.channel(0)[iv], clean)?
    );

    let dir = tempfile::tempdir().map_err(|e| mcsep::Error::InvalidConfig(e.to_string()))?;
    let path = dir.path().join("weights.btf");
    let tensor = BtfTensor::from_weights(&w);
    write_btf(&path, &tensor)?;
    println!("weights {:?} -> {}", tensor.dims(), path.display());
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
