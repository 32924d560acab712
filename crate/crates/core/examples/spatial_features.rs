// Inter-microphone phase differences, the angle feature and direction
// finding for one talker rendered at 60 degrees.
//
//     cargo run --example spatial_features

use mcsep::simulate::{render_plane_wave, synthetic_talker};
use mcsep::spatial::{
    angle_feature_scores, compute_angle_feature, compute_ipd, default_angle_grid, estimate_doa,
    phase_delay, wrap_phase,
};
use mcsep::{stft, ArrayGeometry, SignalConfig, StftPlan};

pub fn run_example() -> mcsep::Result<()> {
    let config = SignalConfig::default();
    let plan = StftPlan::new(config)?;
    let geometry = ArrayGeometry::default_ula();
    let theta = 60.0;

    let talker = synthetic_talker(11, 2 * 16_000, 16_000)?;
    let spec = stft(
        &render_plane_wave(&talker, &geometry, theta, &config)?,
        &plan,
    )?;

    // observed vs predicted phase for the outermost pair at one bin
    let pair = geometry.pairs()[0];
    let ipd = compute_ipd(&spec, pair)?;
    let pd = phase_delay(&geometry, pair, theta, &config)?;
    let f = 40;
    let t = spec.n_frames() / 2;
    println!(
        "{} at {:.0} Hz: observed {:+.3} rad, predicted {:+.3} rad",
        ipd.label,
        config.bin_hz(f),
        ipd.get(t, f),
        wrap_phase(pd[f])
    );

    for probe in [theta, 120.0] {
        let af = compute_angle_feature(&spec, &geometry, probe, &config)?;
        println!(
            "mean angle feature toward {probe:>5.1} deg: {:.3}",
            af.mean()
        );
    }

    let grid = default_angle_grid();
    let scores = angle_feature_scores(&spec, &geometry, &grid, &config)?;
    let doa = estimate_doa(&spec, &geometry, &grid, &config)?;
    println!(
        "estimated direction {doa} deg (score {:.3})",
        scores[doa as usize]
    );
    assert!((doa - theta).abs() <= 1.0);
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
