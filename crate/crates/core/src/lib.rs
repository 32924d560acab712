//! Multi-channel front-ends for overlapped speech separation.
//!
//! The crate covers the signal path from a microphone-array recording to a
//! separated single-channel estimate:
//!
//! * [`stft`]: analysis/synthesis with a periodic Hann window.
//! * [`spatial`]: inter-channel phase differences, the directional angle
//!   feature and grid-search direction estimation.
//! * [`masking`]: ideal complex and ratio masks and mask application.
//! * [`beamform`]: delay-and-sum, filter-and-sum and mask-driven MVDR.
//! * [`metrics`]: scale-invariant SNR and plain SNR.
//! * [`simulate`]: far-field two-talker scenes with controlled SIR and overlap.
//! * [`tensorio`]: WAV and the little-endian BTF tensor format.
//!
//! The `mcsep` binary wraps the same functionality behind `simulate`,
//! `separate`, `evaluate` and `features` subcommands; see [`cli`].

pub mod beamform;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod masking;
pub mod metrics;
pub mod simulate;
pub mod spatial;
pub mod stft;
pub mod tensorio;
pub mod types;

pub use error::{Error, ErrorClass, Result};
pub use geometry::ArrayGeometry;
pub use num_complex::Complex64;
pub use stft::{istft, stft, StftPlan};
pub use types::{
    BeamformerWeights, ComplexSpectrogram, MultiChannelWaveform, SignalConfig, TimeFrequencyMask,
    Waveform,
};
