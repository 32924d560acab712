// Builds a scenario file in a scratch directory, renders it and writes the
// bundle the separation tools read.
//
//     cargo run --example simulate_scene

use mcsep::simulate::{simulate_scenario, synthetic_talker, Scenario, SceneBundle};
use mcsep::tensorio::{write_wav, BitDepth};
use mcsep::MultiChannelWaveform;

pub fn run_example() -> mcsep::Result<()> {
    let dir = tempfile::tempdir().map_err(|e| mcsep::Error::InvalidConfig(e.to_string()))?;
    for (name, seed) in [("target.wav", 41), ("other.wav", 42)] {
        let talker = synthetic_talker(seed, 4 * 16_000, 16_000)?;
        write_wav(
            dir.path().join(name),
            &MultiChannelWaveform::from_mono(talker),
            BitDepth::Pcm16,
        )?;
    }
    let toml = r#"
target_wav = "target.wav"
interferer_wav = "other.wav"
theta_target_deg = 35
theta_interferer_deg = 100
sir_db = 1.5
overlap_ratio = 0.8
noise_snr_db = 30
seed = 7
"#;
    let file = dir.path().join("scene.toml");
    std::fs::write(&file, toml).map_err(|e| mcsep::Error::InvalidConfig(e.to_string()))?;

    let bundle = simulate_scenario(&Scenario::load(&file)?)?;
    let out = dir.path().join("bundle");
    bundle.write(&out)?;

    let back = SceneBundle::read(&out)?;
    let m = &back.metadata;
    println!(
        "{} channels, {} samples, overlap {:.2} s",
        m.n_channels,
        m.mixture_len,
        m.overlap_samples as f64 / m.sample_rate_hz as f64
    );
    println!(
        "SIR requested {:.2} dB, achieved {:.2} dB, measured {:.2} dB",
        m.requested_sir_db,
        m.achieved_sir_db,
        back.measured_sir_db()
    );
    let mut files: Vec<String> = std::fs::read_dir(&out)
        .map_err(|e| mcsep::Error::InvalidConfig(e.to_string()))?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .collect();
    files.sort();
    println!("bundle: {}", files.join(", "));
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
