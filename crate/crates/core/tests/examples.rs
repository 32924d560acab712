#![allow(dead_code)]

mod stft_roundtrip {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/stft_roundtrip.rs"
    ));
}

#[test]
fn stft_roundtrip_runs() {
    stft_roundtrip::run_example().unwrap();
}

mod spatial_features {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/spatial_features.rs"
    ));
}

#[test]
fn spatial_features_runs() {
    spatial_features::run_example().unwrap();
}

mod tf_masking {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/tf_masking.rs"
    ));
}

#[test]
fn tf_masking_runs() {
    tf_masking::run_example().unwrap();
}

mod delay_and_sum {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/delay_and_sum.rs"
    ));
}

#[test]
fn delay_and_sum_runs() {
    delay_and_sum::run_example().unwrap();
}

mod filter_and_sum {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/filter_and_sum.rs"
    ));
}

#[test]
fn filter_and_sum_runs() {
    filter_and_sum::run_example().unwrap();
}

mod mvdr_oracle {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/mvdr_oracle.rs"
    ));
}

#[test]
fn mvdr_oracle_runs() {
    mvdr_oracle::run_example().unwrap();
}

mod simulate_scene {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/simulate_scene.rs"
    ));
}

#[test]
fn simulate_scene_runs() {
    simulate_scene::run_example().unwrap();
}

mod btf_interchange {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/btf_interchange.rs"
    ));
}

#[test]
fn btf_interchange_runs() {
    btf_interchange::run_example().unwrap();
}
