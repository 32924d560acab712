mod common;

use common::*;
use mcsep::simulate::{
    simulate_scenario, simulate_sources, synthetic_talker, Scenario, SceneBundle, SceneParams,
};
use mcsep::tensorio::{write_wav, BitDepth};
use mcsep::{ArrayGeometry, Error, MultiChannelWaveform};

fn write_sources(dir: &std::path::Path, len: usize) {
    for (name, seed) in [("t.wav", 31u64), ("i.wav", 32)] {
        let w = synthetic_talker(seed, len, FS).unwrap();
        write_wav(
            dir.join(name),
            &MultiChannelWaveform::from_mono(w),
            BitDepth::Float32,
        )
        .unwrap();
    }
}

#[test]
fn scenario_paths_are_relative_to_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let sub = dir.path().join("audio");
    std::fs::create_dir(&sub).unwrap();
    write_sources(&sub, 16_000);
    let geom = ArrayGeometry::uniform_linear(4, 0.05)
        .unwrap()
        .with_pairs_one_based(&[(1, 4), (2, 3)])
        .unwrap();
    geom.save(dir.path().join("array.toml")).unwrap();
    std::fs::write(
        dir.path().join("s.toml"),
        "target_wav = \"audio/t.wav\"\ninterferer_wav = \"audio/i.wav\"\n\
         theta_target_deg = 70\ntheta_interferer_deg = 150\nsir_db = 3.0\n\
         overlap_ratio = 0.5\nnoise_snr_db = 30.0\nseed = 5\ngeometry = \"array.toml\"\n",
    )
    .unwrap();
    let s = Scenario::load(dir.path().join("s.toml")).unwrap();
    let b = simulate_scenario(&s).unwrap();
    assert_eq!(b.mixture.n_channels(), 4);
    assert_eq!(b.metadata.interferer_offset_samples, 8000);
    assert_eq!(b.mixture.len(), 24_000);
    assert!((b.metadata.achieved_sir_db - 3.0).abs() < 1e-9);
    assert!((b.measured_sir_db() - 3.0).abs() < 1e-9);

    let out = dir.path().join("bundle");
    b.write(&out).unwrap();
    let back = SceneBundle::read(&out).unwrap();
    assert_eq!(back.metadata, b.metadata);
    for ch in 0..4 {
        for (x, y) in back.mixture.channel(ch).iter().zip(b.mixture.channel(ch)) {
            assert_eq!(*x, *y as f32 as f64);
        }
    }
}

#[test]
fn missing_source_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("s.toml"),
        "target_wav = \"nope.wav\"\ninterferer_wav = \"nope2.wav\"\n\
         theta_target_deg = 70\ntheta_interferer_deg = 150\n",
    )
    .unwrap();
    let s = Scenario::load(dir.path().join("s.toml")).unwrap();
    let err = simulate_scenario(&s).unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    assert!(err.to_string().contains("nope.wav"));
}

#[test]
fn unknown_scenario_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("s.toml"),
        "target_wav = \"a.wav\"\ninterferer_wav = \"b.wav\"\n\
         theta_target_deg = 70\ntheta_interferer_deg = 150\nsnr = 4\n",
    )
    .unwrap();
    assert!(matches!(
        Scenario::load(dir.path().join("s.toml")),
        Err(Error::Parse { .. })
    ));
}

#[test]
fn impulse_response_scenario_convolves_each_channel() {
    let dir = tempfile::tempdir().unwrap();
    write_sources(dir.path(), 8000);
    let n_mics = 15;
    let rir: Vec<Vec<f64>> = (0..n_mics)
        .map(|i| {
            let mut h = vec![0.0; 64];
            h[i * 2] = 1.0;
            h[40] = 0.25;
            h
        })
        .collect();
    let rir = MultiChannelWaveform::new(rir, FS).unwrap();
    write_wav(dir.path().join("rt.wav"), &rir, BitDepth::Float32).unwrap();
    write_wav(dir.path().join("ri.wav"), &rir, BitDepth::Float32).unwrap();
    std::fs::write(
        dir.path().join("s.toml"),
        "target_wav = \"t.wav\"\ninterferer_wav = \"i.wav\"\ntheta_target_deg = 0\n\
         theta_interferer_deg = 90\ntarget_rir_wav = \"rt.wav\"\ninterferer_rir_wav = \"ri.wav\"\n",
    )
    .unwrap();
    let b = simulate_scenario(&Scenario::load(dir.path().join("s.toml")).unwrap()).unwrap();
    // image length grows by the response length minus one
    let len = 8000 + 63;
    assert_eq!(b.mixture.len(), len + b.metadata.interferer_offset_samples);
    let src = synthetic_talker(31, 8000, FS).unwrap();
    let img = b.target_image.channel(3);
    for n in 100..200 {
        let expect = src.samples()[n - 6] + 0.25 * src.samples()[n - 40];
        assert!((img[n] - expect).abs() < 1e-6);
    }
}

#[test]
fn four_second_sources_overlap_for_three_point_two_seconds() {
    let t = synthetic_talker(1, 64_000, FS).unwrap();
    let i = synthetic_talker(2, 64_000, FS).unwrap();
    let g = ArrayGeometry::uniform_linear(2, 0.04).unwrap();
    let b = simulate_sources(&t, &i, &g, &SceneParams::new(20.0, 100.0)).unwrap();
    let overlap_s = b.metadata.overlap_samples as f64 / FS as f64;
    assert!((overlap_s - 3.2).abs() <= 256.0 / FS as f64);
    // the interferer image is silent before its onset, the target after its end
    let off = b.metadata.interferer_offset_samples;
    assert!(b.interferer_image.channel(0)[..off]
        .iter()
        .all(|v| *v == 0.0));
    assert!(b.target_image.channel(0)[64_000..]
        .iter()
        .all(|v| *v == 0.0));
}

#[test]
fn different_lengths_are_padded_to_the_longer() {
    let t = synthetic_talker(1, 20_000, FS).unwrap();
    let i = synthetic_talker(2, 12_000, FS).unwrap();
    let g = ArrayGeometry::uniform_linear(3, 0.04).unwrap();
    let b = simulate_sources(&t, &i, &g, &SceneParams::new(20.0, 100.0)).unwrap();
    assert_eq!(b.metadata.overlap_samples, 16_000);
    assert_eq!(b.mixture.len(), 24_000);
}
