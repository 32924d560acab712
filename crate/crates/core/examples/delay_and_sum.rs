// Delay-and-sum toward a talker in white sensor noise. With 15 microphones
// the noise gain approaches 10 log10(15) dB.
//
//     cargo run --example delay_and_sum

use mcsep::beamform::delay_and_sum;
use mcsep::metrics::si_snr_slices;
use mcsep::simulate::{add_sensor_noise, render_plane_wave, synthetic_talker};
use mcsep::spatial::steering_vector;
use mcsep::{istft, stft, ArrayGeometry, SignalConfig, StftPlan};

pub fn run_example() -> mcsep::Result<()> {
    let config = SignalConfig::default();
    let plan = StftPlan::new(config)?;
    let geometry = ArrayGeometry::default_ula();
    let r = geometry.reference_channel();
    let theta = 90.0;

    let talker = synthetic_talker(5, 2 * 16_000, 16_000)?;
    let clean = render_plane_wave(&talker, &geometry, theta, &config)?;
    let noisy = add_sensor_noise(&clean, 0.0, 99, r)?;

    let spec = stft(&noisy, &plan)?;
    let y = delay_and_sum(&spec, &steering_vector(&geometry, theta, &config)?)?;
    let y = istft(&y, &plan, Some(noisy.len()))?;

    let iv = plan.interior(spec.n_frames());
    let reference = &clean.channel(r)[iv.clone()];
    let before = si_snr_slices(&noisy.channel(r)[iv.clone()], reference)?;
    let after = si_snr_slices(&y.channel(0)[iv], reference)?;
    println!("reference channel {before:6.2} dB");
    println!("delay-and-sum     {after:6.2} dB");
    println!(
        "gain {:.2} dB (ideal {:.2} dB)",
        after - before,
        10.0 * (geometry.n_mics() as f64).log10()
    );
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
