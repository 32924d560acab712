// Analysis/synthesis round trip on a synthetic talker.
//
//     cargo run --example stft_roundtrip

use mcsep::metrics::si_snr_slices;
use mcsep::simulate::synthetic_talker;
use mcsep::{istft, stft, MultiChannelWaveform, SignalConfig, StftPlan};

pub fn run_example() -> mcsep::Result<()> {
    let config = SignalConfig::default();
    let plan = StftPlan::new(config)?;
    let x = MultiChannelWaveform::from_mono(synthetic_talker(7, 3 * 16_000, 16_000)?);

    let spec = stft(&x, &plan)?;
    let y = istft(&spec, &plan, Some(x.len()))?;

    // the first and last N - H samples are only partly covered by windows
    let interior = plan.interior(spec.n_frames());
    let err = interior
        .clone()
        .map(|n| (x.channel(0)[n] - y.channel(0)[n]).abs())
        .fold(0.0, f64::max);
    let score = si_snr_slices(
        &y.channel(0)[interior.clone()],
        &x.channel(0)[interior.clone()],
    )?;

    println!("frames {} x bins {}", spec.n_frames(), spec.n_bins());
    println!("COLA deviation {:.2e}", plan.cola_deviation());
    println!(
        "interior {:?}: max error {err:.2e}, Si-SNR {score:.1} dB",
        interior
    );
    assert!(score > 79.0);
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
