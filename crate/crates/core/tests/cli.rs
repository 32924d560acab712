mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::*;
use mcsep::metrics::si_snr;
use mcsep::simulate::{synthetic_talker, SceneBundle};
use mcsep::tensorio::{read_btf, read_wav, write_btf, write_wav, BitDepth, BtfTensor};
use mcsep::{stft, Complex64, MultiChannelWaveform, TimeFrequencyMask};

fn mcsep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcsep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = mcsep(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn metric(line: &str) -> f64 {
    let v: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
    v["si_snr_db"].as_f64().unwrap()
}

/// Writes two talkers and a scenario referencing them; returns the scenario path.
fn scenario(dir: &Path, name: &str, seed: u64) -> PathBuf {
    for (file, k) in [("t.wav", 0), ("i.wav", 1)] {
        let w = synthetic_talker(seed * 2 + k, 24_000, FS).unwrap();
        write_wav(
            dir.join(file),
            &MultiChannelWaveform::from_mono(w),
            BitDepth::Float32,
        )
        .unwrap();
    }
    let path = dir.join(name);
    std::fs::write(
        &path,
        format!(
            "target_wav = \"t.wav\"\ninterferer_wav = \"i.wav\"\ntheta_target_deg = 40\n\
             theta_interferer_deg = 125\nnoise_snr_db = 35.0\nseed = {seed}\n"
        ),
    )
    .unwrap();
    path
}

fn simulated(dir: &Path) -> PathBuf {
    let sc = scenario(dir, "scene.toml", 3);
    let bundle = dir.join("bundle");
    ok(&["simulate", s(&sc), "--out", s(&bundle)]);
    bundle
}

#[test]
fn simulate_separate_evaluate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = simulated(dir.path());
    for f in [
        "mixture.wav",
        "target.wav",
        "interferer.wav",
        "meta.json",
        "manifest.jsonl",
    ] {
        assert!(bundle.join(f).is_file(), "{f} missing");
    }
    let b = SceneBundle::read(&bundle).unwrap();
    let raw = si_snr(
        &b.mixture.to_mono(b.reference()),
        &b.target_image.to_mono(b.reference()),
    )
    .unwrap();

    let mut scores = Vec::new();
    for method in ["delay-sum", "tf-mask", "filter-sum", "mvdr"] {
        let out = dir.path().join(format!("{method}.wav"));
        let stdout = ok(&[
            "separate",
            "--bundle",
            s(&bundle),
            "--method",
            method,
            "--theta",
            "40",
            "--out",
            s(&out),
        ]);
        let printed = metric(stdout.lines().next().unwrap());
        let eval = ok(&[
            "evaluate",
            s(&out),
            s(&bundle.join("target.wav")),
            "--reference-channel",
            &(b.reference() + 1).to_string(),
        ]);
        // same number up to JSON float parsing
        let est = read_wav(&out).unwrap().to_mono(0);
        let lib = si_snr(&est, &b.target_image.to_mono(b.reference())).unwrap();
        assert!((metric(&eval) - lib).abs() < 1e-12);
        assert!((printed - lib).abs() < 1e-3, "{method}: {printed} vs {lib}");
        scores.push((method, lib));
    }
    let mvdr = scores.iter().find(|(m, _)| *m == "mvdr").unwrap().1;
    assert!(mvdr > raw + 3.0, "mvdr {mvdr} vs raw {raw}");
    let manifest = std::fs::read_to_string(dir.path().join("manifest.jsonl")).unwrap();
    assert_eq!(manifest.lines().count(), 4);
    let rec: serde_json::Value = serde_json::from_str(manifest.lines().next().unwrap()).unwrap();
    assert_eq!(rec["command"], "separate");
    assert_eq!(rec["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn simulate_is_deterministic_across_runs_and_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let a = scenario(dir.path(), "a.toml", 5);
    let b = dir.path().join("b.toml");
    std::fs::write(
        &b,
        std::fs::read_to_string(&a)
            .unwrap()
            .replace("seed = 5", "seed = 6"),
    )
    .unwrap();
    let one = dir.path().join("one");
    let three = dir.path().join("three");
    ok(&["simulate", s(&a), s(&b), "--out", s(&one), "--jobs", "1"]);
    ok(&["simulate", s(&a), s(&b), "--out", s(&three), "--jobs", "3"]);
    for stem in ["a", "b"] {
        for f in ["mixture.wav", "target.wav", "interferer.wav", "meta.json"] {
            let x = std::fs::read(one.join(stem).join(f)).unwrap();
            let y = std::fs::read(three.join(stem).join(f)).unwrap();
            assert!(x == y, "{stem}/{f} differs");
        }
    }
    assert_ne!(
        std::fs::read(one.join("a/mixture.wav")).unwrap(),
        std::fs::read(one.join("b/mixture.wav")).unwrap()
    );
}

#[test]
fn missing_source_reports_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let sc = dir.path().join("s.toml");
    std::fs::write(
        &sc,
        "target_wav = \"absent.wav\"\ninterferer_wav = \"absent.wav\"\n\
         theta_target_deg = 10\ntheta_interferer_deg = 90\n",
    )
    .unwrap();
    let out = mcsep(&["simulate", s(&sc), "--out", s(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.wav"));
}

#[test]
fn unit_mask_passes_the_reference_channel_through() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = simulated(dir.path());
    let b = SceneBundle::read(&bundle).unwrap();
    let plan = plan();
    let spec = stft(&b.mixture, &plan).unwrap();
    let ones =
        TimeFrequencyMask::constant(Complex64::new(1.0, 0.0), (spec.n_frames(), spec.n_bins()));
    let mask = dir.path().join("ones.btf");
    write_btf(&mask, &BtfTensor::from_mask(&ones)).unwrap();
    let out = dir.path().join("est.wav");
    let src = format!("btf:{}", s(&mask));
    ok(&[
        "separate",
        "--bundle",
        s(&bundle),
        "--method",
        "tf-mask",
        "--mask-source",
        &src,
        "--out",
        s(&out),
    ]);
    let est = read_wav(&out).unwrap();
    let reference = b.mixture.channel(b.reference());
    for n in plan.interior(spec.n_frames()) {
        assert!(
            (est.channel(0)[n] - reference[n]).abs() < 1e-6,
            "sample {n}"
        );
    }
}

#[test]
fn usage_and_data_errors_have_distinct_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = simulated(dir.path());
    let out = dir.path().join("x.wav");
    // delay-sum needs a direction
    let r = mcsep(&[
        "separate",
        "--bundle",
        s(&bundle),
        "--method",
        "delay-sum",
        "--out",
        s(&out),
    ]);
    assert_eq!(r.status.code(), Some(2));
    // oracle masks need a target
    let r = mcsep(&[
        "separate",
        "--mixture",
        s(&bundle.join("mixture.wav")),
        "--method",
        "mvdr",
        "--out",
        s(&out),
    ]);
    assert_eq!(r.status.code(), Some(2));
    // unknown flag is a clap usage error
    assert_eq!(mcsep(&["evaluate", "--bogus"]).status.code(), Some(2));

    let short = dir.path().join("short.wav");
    let w = synthetic_talker(1, 1000, FS).unwrap();
    write_wav(
        &short,
        &MultiChannelWaveform::from_mono(w),
        BitDepth::Float32,
    )
    .unwrap();
    let r = mcsep(&["evaluate", s(&short), s(&bundle.join("target.wav"))]);
    assert_eq!(r.status.code(), Some(3));
}

#[test]
fn evaluate_against_itself_is_the_ceiling() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("a.wav");
    let w = synthetic_talker(2, 8000, FS).unwrap();
    write_wav(&p, &MultiChannelWaveform::from_mono(w), BitDepth::Float32).unwrap();
    let manifest = dir.path().join("m.jsonl");
    let line = ok(&["evaluate", s(&p), s(&p), "--manifest", s(&manifest)]);
    assert_eq!(metric(&line), 80.0);
    assert!(manifest.is_file());
}

#[test]
fn features_writes_one_map_per_pair() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = simulated(dir.path());
    let feats = dir.path().join("feats");
    ok(&["features", "--bundle", s(&bundle), "--out", s(&feats)]);
    let ipds: Vec<_> = std::fs::read_dir(&feats)
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().into_string().unwrap())
        .filter(|n| n.starts_with("ipd_"))
        .collect();
    assert_eq!(ipds.len(), 9);
    assert!(feats.join("ipd_1_15.btf").is_file());
    let af = read_btf(feats.join("af.btf"))
        .unwrap()
        .to_feature("af")
        .unwrap();
    assert!(af.data.iter().all(|v| v.abs() <= 9.0 + 1e-6));
    assert!(feats.join("manifest.jsonl").is_file());

    let pairs = dir.path().join("pairs");
    ok(&[
        "features",
        "--bundle",
        s(&bundle),
        "--pairs",
        "2-3,4-9",
        "--out",
        s(&pairs),
    ]);
    assert!(pairs.join("ipd_2_3.btf").is_file() && pairs.join("ipd_4_9.btf").is_file());

    let mono = dir.path().join("mono.wav");
    let w = synthetic_talker(2, 8000, FS).unwrap();
    write_wav(
        &mono,
        &MultiChannelWaveform::from_mono(w),
        BitDepth::Float32,
    )
    .unwrap();
    let r = mcsep(&[
        "features",
        "--wav",
        s(&mono),
        "--out",
        s(&dir.path().join("f2")),
    ]);
    assert_eq!(r.status.code(), Some(3));
}
