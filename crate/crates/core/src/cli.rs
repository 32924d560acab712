//! Command-line front end and the separation pipeline it drives.
//!
//! Subcommands: `simulate`, `separate`, `evaluate`, `features`. Every run
//! except `evaluate` appends one JSON line to a run manifest (command echo,
//! SHA-256 of inputs, configuration, tool version, metric records); pass
//! `--manifest` to choose its location or to enable it for `evaluate`.
//!
//! Inputs required per separation method:
//!
//! | method       | `--mask-source oracle`            | `--mask-source btf:<path>`              |
//! |--------------|-----------------------------------|-----------------------------------------|
//! | `delay-sum`  | `--theta` (mask source unused)    | `--theta` (mask source unused)          |
//! | `tf-mask`    | target reference                  | complex `(T,F)` mask                    |
//! | `filter-sum` | target reference                  | weights `(I,F)` or `(I,T,F)`            |
//! | `mvdr`       | target reference                  | target mask, optional `--noise-mask`    |
//!
//! A target reference comes from a bundle directory or `--target`.
//!
//! Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::OpenOptions;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::beamform::{
    apply_beamformer, delay_and_sum, estimate_psd_set, filter_and_sum, mvdr_weights_with_loading,
    oracle_filter_weights, DEFAULT_DIAGONAL_LOADING,
};
use crate::error::{Error, ErrorClass, Result};
use crate::geometry::ArrayGeometry;
use crate::masking::{apply_mask, ideal_complex_mask, ideal_ratio_mask, DEFAULT_MASK_CLIP};
use crate::metrics::MetricReport;
use crate::simulate::{simulate_scenario, Scenario, SceneBundle, SceneMetadata};
use crate::spatial::{
    compute_angle_feature, compute_ipd, default_angle_grid, estimate_doa, steering_vector,
};
use crate::stft::{istft, stft, StftPlan};
use crate::tensorio::{read_btf, read_wav, write_btf, write_wav, BitDepth, BtfTensor};
use crate::types::{
    BeamformerWeights, ComplexSpectrogram, MultiChannelWaveform, SignalConfig, TimeFrequencyMask,
    Waveform,
};

pub const MANIFEST_FILE: &str = "manifest.jsonl";

#[derive(Debug, Parser)]
#[command(
    name = "mcsep",
    version,
    about = "Multi-channel speech separation front-ends"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render scenario files into bundle directories.
    Simulate(SimulateArgs),
    /// Separate the target talker from a mixture.
    Separate(SeparateArgs),
    /// Score an estimate against a reference and print one JSON line.
    Evaluate(EvaluateArgs),
    /// Dump IPD and angle-feature maps as BTF tensors.
    Features(FeaturesArgs),
}

#[derive(Debug, Clone, clap::Args, Serialize)]
pub struct SimulateArgs {
    /// Scenario TOML files.
    #[arg(required = true)]
    pub scenarios: Vec<PathBuf>,
    /// Bundle directory; with several scenarios, one sub-directory per
    /// scenario file stem.
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads across scenarios. Results do not depend on it.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    DelaySum,
    TfMask,
    FilterSum,
    Mvdr,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::DelaySum => "delay-sum",
            Method::TfMask => "tf-mask",
            Method::FilterSum => "filter-sum",
            Method::Mvdr => "mvdr",
        }
    }
}

/// Where masks (or filter-and-sum weights) come from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum MaskSource {
    Oracle,
    Btf(PathBuf),
}

impl std::str::FromStr for MaskSource {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "oracle" {
            Ok(MaskSource::Oracle)
        } else if let Some(p) = s.strip_prefix("btf:") {
            if p.is_empty() {
                Err("btf: needs a path".into())
            } else {
                Ok(MaskSource::Btf(p.into()))
            }
        } else {
            Err(format!("expected `oracle` or `btf:<path>`, got `{s}`"))
        }
    }
}

#[derive(Debug, Clone, clap::Args, Serialize)]
pub struct SeparateArgs {
    /// Bundle directory written by `simulate`.
    #[arg(long, conflicts_with = "mixture", required_unless_present = "mixture")]
    pub bundle: Option<PathBuf>,
    /// Multi-channel mixture WAV.
    #[arg(long)]
    pub mixture: Option<PathBuf>,
    /// Target image (multi-channel) or target at the reference channel
    /// (mono) for oracle masks and metrics.
    #[arg(long, requires = "mixture")]
    pub target: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub method: Method,
    #[arg(long, default_value = "oracle", value_parser = clap::value_parser!(MaskSource))]
    pub mask_source: MaskSource,
    /// Interference mask for `mvdr` with a BTF target mask; defaults to
    /// `1 - mask`.
    #[arg(long)]
    pub noise_mask: Option<PathBuf>,
    /// Target direction in degrees for `delay-sum`.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Array geometry TOML; defaults to the 15-microphone linear array.
    #[arg(long)]
    pub geometry: Option<PathBuf>,
    /// Complex mask magnitude bound for oracle `tf-mask`.
    #[arg(long, default_value_t = DEFAULT_MASK_CLIP)]
    pub clip: f64,
    /// Relative diagonal loading for `mvdr` and oracle `filter-sum`.
    #[arg(long, default_value_t = DEFAULT_DIAGONAL_LOADING)]
    pub diagonal_loading: f64,
    /// Also write the beamformer weights used, as BTF.
    #[arg(long)]
    pub save_weights: Option<PathBuf>,
    /// Output mono WAV (float32).
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, clap::Args, Serialize)]
pub struct EvaluateArgs {
    pub estimate: PathBuf,
    pub reference: PathBuf,
    /// Channel of the estimate file, 1-based.
    #[arg(long, default_value_t = 1)]
    pub estimate_channel: usize,
    /// Channel of the reference file, 1-based.
    #[arg(long, default_value_t = 1)]
    pub reference_channel: usize,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, clap::Args, Serialize)]
pub struct FeaturesArgs {
    /// Bundle directory; the mixture is used.
    #[arg(long, conflicts_with = "wav", required_unless_present = "wav")]
    pub bundle: Option<PathBuf>,
    /// Multi-channel WAV.
    #[arg(long)]
    pub wav: Option<PathBuf>,
    #[arg(long)]
    pub geometry: Option<PathBuf>,
    /// 1-based pairs such as `1-15,2-14`; overrides the geometry's pairs.
    #[arg(long, value_delimiter = ',', value_parser = parse_pair)]
    pub pairs: Option<Vec<(usize, usize)>>,
    /// Angle for the angle feature; defaults to the bundle's target angle,
    /// else to the estimated direction.
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

fn parse_pair(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s
        .split_once('-')
        .ok_or_else(|| format!("pair `{s}` is not of the form i-j"))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<usize>()
            .map_err(|e| format!("pair `{s}`: {e}"))
    };
    Ok((parse(a)?, parse(b)?))
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e.class() {
        ErrorClass::Usage => 2,
        ErrorClass::Data => 3,
        ErrorClass::Numerical => 4,
    }
}

pub fn execute(command: &Command) -> Result<()> {
    match command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Separate(a) => cmd_separate(a).map(|_| ()),
        Command::Evaluate(a) => {
            let report = cmd_evaluate(a)?;
            println!("{}", report.to_line());
            Ok(())
        }
        Command::Features(a) => cmd_features(a),
    }
}

/// One run-manifest line.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest<'a, A: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub args: &'a A,
    pub inputs: Vec<InputHash>,
    pub config: serde_json::Value,
    pub metrics: Vec<LabelledMetric>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputHash {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct LabelledMetric {
    pub label: String,
    #[serde(flatten)]
    pub report: MetricReport,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let digest = Sha256::digest(&bytes);
    let mut hex = String::with_capacity(64);
    for b in digest.iter() {
        write!(hex, "{b:02x}").expect("writing to a String");
    }
    Ok(hex)
}

fn hash_inputs(paths: &[PathBuf]) -> Result<Vec<InputHash>> {
    paths
        .iter()
        .map(|p| {
            Ok(InputHash {
                path: p.clone(),
                sha256: sha256_file(p)?,
            })
        })
        .collect()
}

fn append_manifest<A: Serialize>(path: &Path, record: &RunManifest<'_, A>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let line = serde_json::to_string(record).expect("manifest serializes");
    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Error::io(path, e))?;
    writeln!(f, "{line}").map_err(|e| Error::io(path, e))
}

fn manifest<'a, A: Serialize>(
    command: &'static str,
    args: &'a A,
    inputs: Vec<InputHash>,
    config: serde_json::Value,
    metrics: Vec<LabelledMetric>,
) -> RunManifest<'a, A> {
    RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        args,
        inputs,
        config,
        metrics,
    }
}

fn scenario_inputs(s: &Scenario) -> Vec<PathBuf> {
    let mut v = vec![s.target_wav.clone(), s.interferer_wav.clone()];
    v.extend(
        [&s.geometry, &s.target_rir_wav, &s.interferer_rir_wav]
            .into_iter()
            .flatten()
            .cloned(),
    );
    v
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    if args.jobs == 0 {
        return Err(Error::InvalidConfig("--jobs must be at least 1".into()));
    }
    let scenarios = args
        .scenarios
        .iter()
        .map(Scenario::load)
        .collect::<Result<Vec<_>>>()?;
    let out_dirs: Vec<PathBuf> = if args.scenarios.len() == 1 {
        vec![args.out.clone()]
    } else {
        args.scenarios
            .iter()
            .map(|p| args.out.join(p.file_stem().unwrap_or(p.as_os_str())))
            .collect()
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let metas: Vec<SceneMetadata> = pool.install(|| {
        scenarios
            .par_iter()
            .zip(&out_dirs)
            .map(|(s, dir)| {
                let bundle = simulate_scenario(s)?;
                bundle.write(dir)?;
                Ok(bundle.metadata)
            })
            .collect::<Result<_>>()
    })?;
    let mut inputs = args.scenarios.clone();
    for s in &scenarios {
        inputs.extend(scenario_inputs(s));
    }
    let record = manifest(
        "simulate",
        args,
        hash_inputs(&inputs)?,
        serde_json::to_value(&metas).expect("metadata serializes"),
        Vec::new(),
    );
    let path = args
        .manifest
        .clone()
        .unwrap_or_else(|| args.out.join(MANIFEST_FILE));
    append_manifest(&path, &record)
}

/// Everything a separation run needs, already in memory.
#[derive(Debug, Clone)]
pub struct SeparationInput {
    pub mixture: MultiChannelWaveform,
    /// Target image or target at the reference channel.
    pub target: Option<MultiChannelWaveform>,
    pub geometry: ArrayGeometry,
}

impl SeparationInput {
    fn target_ref(&self) -> Option<Result<Waveform>> {
        self.target.as_ref().map(|t| {
            let ch = if t.n_channels() == 1 {
                0
            } else {
                self.geometry.reference_channel()
            };
            if ch >= t.n_channels() {
                return Err(Error::DimensionMismatch {
                    what: "target channels",
                    expected: ch + 1,
                    actual: t.n_channels(),
                });
            }
            if t.len() != self.mixture.len() {
                return Err(Error::LengthMismatch(t.len(), self.mixture.len()));
            }
            Ok(t.to_mono(ch))
        })
    }
}

/// Method configuration for [`separate`].
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationConfig {
    pub method: Method,
    pub mask_source: MaskSource,
    pub noise_mask: Option<PathBuf>,
    pub theta_deg: Option<f64>,
    pub clip: f64,
    pub diagonal_loading: f64,
}

impl SeparationConfig {
    pub fn oracle(method: Method) -> Self {
        Self {
            method,
            mask_source: MaskSource::Oracle,
            noise_mask: None,
            theta_deg: None,
            clip: DEFAULT_MASK_CLIP,
            diagonal_loading: DEFAULT_DIAGONAL_LOADING,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SeparationOutput {
    pub estimate: Waveform,
    pub weights: Option<BeamformerWeights>,
    /// Output and raw reference channel scored against the target, when a
    /// target is known.
    pub metrics: Vec<LabelledMetric>,
}

fn missing(method: Method, what: &str) -> Error {
    Error::MissingInput {
        method: method.name().into(),
        what: what.into(),
    }
}

fn check_mask_dims(mask: &TimeFrequencyMask, spec: &ComplexSpectrogram, what: &str) -> Result<()> {
    let want = (spec.n_frames(), spec.n_bins());
    if mask.dims() != want {
        return Err(Error::DimsMismatch(format!(
            "{what} is {:?}, mixture spectrogram is {want:?}",
            mask.dims()
        )));
    }
    Ok(())
}

/// Runs one separation method on in-memory signals. The CLI `separate`
/// command is a file-reading wrapper around this.
pub fn separate(input: &SeparationInput, cfg: &SeparationConfig) -> Result<SeparationOutput> {
    let method = cfg.method;
    let fs = input.mixture.sample_rate_hz();
    let plan = StftPlan::new(SignalConfig::with_sample_rate(fs))?;
    let reference = input.geometry.reference_channel();
    let target_ref = input.target_ref().transpose()?;
    let needs_oracle = cfg.mask_source == MaskSource::Oracle && method != Method::DelaySum;
    if needs_oracle && target_ref.is_none() {
        return Err(missing(
            method,
            "oracle masks need a target reference (--bundle or --target)",
        ));
    }
    if method != Method::TfMask && input.mixture.n_channels() != input.geometry.n_mics() {
        return Err(Error::DimensionMismatch {
            what: "mixture channels vs geometry microphones",
            expected: input.geometry.n_mics(),
            actual: input.mixture.n_channels(),
        });
    }
    if reference >= input.mixture.n_channels() {
        return Err(Error::DimensionMismatch {
            what: "reference channel",
            expected: reference + 1,
            actual: input.mixture.n_channels(),
        });
    }
    let mix_ref_wave = input.mixture.to_mono(reference);
    let target_spec = |t: &Waveform| stft(&MultiChannelWaveform::from_mono(t.clone()), &plan);

    let mut weights = None;
    let estimate_spec = match method {
        Method::DelaySum => {
            let theta = cfg.theta_deg.ok_or_else(|| missing(method, "--theta"))?;
            let spec = stft(&input.mixture, &plan)?;
            let sv = steering_vector(&input.geometry, theta, plan.config())?;
            delay_and_sum(&spec, &sv)?
        }
        Method::TfMask => {
            let mix_ref = stft(
                &MultiChannelWaveform::from_mono(mix_ref_wave.clone()),
                &plan,
            )?;
            let mask = match &cfg.mask_source {
                MaskSource::Oracle => {
                    let s = target_spec(target_ref.as_ref().expect("checked above"))?;
                    ideal_complex_mask(&s, &mix_ref, cfg.clip)?
                }
                MaskSource::Btf(p) => read_btf(p)?.to_mask()?,
            };
            check_mask_dims(&mask, &mix_ref, "mask")?;
            apply_mask(&mask, &mix_ref)?
        }
        Method::FilterSum => {
            let spec = stft(&input.mixture, &plan)?;
            let w = match &cfg.mask_source {
                MaskSource::Oracle => {
                    let s = target_spec(target_ref.as_ref().expect("checked above"))?;
                    oracle_filter_weights(&spec, &s, cfg.diagonal_loading)?
                }
                MaskSource::Btf(p) => read_btf(p)?.to_weights()?,
            };
            let tv = match &w {
                BeamformerWeights::TimeInvariant { .. } => w.broadcast(spec.n_frames(), false)?,
                BeamformerWeights::TimeVarying { .. } => w.clone(),
            };
            let out = filter_and_sum(&spec, &tv)?;
            weights = Some(w);
            out
        }
        Method::Mvdr => {
            let spec = stft(&input.mixture, &plan)?;
            let (mask_s, mask_n) = match &cfg.mask_source {
                MaskSource::Oracle => {
                    let t = target_ref.as_ref().expect("checked above");
                    let residual: Vec<f64> = mix_ref_wave
                        .samples()
                        .iter()
                        .zip(t.samples())
                        .map(|(x, s)| x - s)
                        .collect();
                    let s = target_spec(t)?;
                    let n = target_spec(&Waveform::new(residual, fs)?)?;
                    (ideal_ratio_mask(&s, &n)?, ideal_ratio_mask(&n, &s)?)
                }
                MaskSource::Btf(p) => {
                    let ms = read_btf(p)?.to_mask()?;
                    let mn = match &cfg.noise_mask {
                        Some(q) => read_btf(q)?.to_mask()?,
                        None => ms.complement(),
                    };
                    (ms, mn)
                }
            };
            check_mask_dims(&mask_s, &spec, "target mask")?;
            check_mask_dims(&mask_n, &spec, "noise mask")?;
            let psd = estimate_psd_set(&spec, &mask_s, &mask_n)?;
            let w = mvdr_weights_with_loading(&psd, reference, cfg.diagonal_loading)?;
            let out = apply_beamformer(&w, &spec)?;
            weights = Some(w);
            out
        }
    };
    let wave = istft(&estimate_spec, &plan, Some(input.mixture.len()))?;
    let estimate = wave.to_mono(0);
    let mut metrics = Vec::new();
    if let Some(t) = &target_ref {
        metrics.push(LabelledMetric {
            label: "output".into(),
            report: MetricReport::compute(&estimate, t)?,
        });
        metrics.push(LabelledMetric {
            label: "raw_reference".into(),
            report: MetricReport::compute(&mix_ref_wave, t)?,
        });
    }
    Ok(SeparationOutput {
        estimate,
        weights,
        metrics,
    })
}

fn load_geometry(path: Option<&Path>, meta: Option<&SceneMetadata>) -> Result<ArrayGeometry> {
    match path {
        Some(p) => ArrayGeometry::load(p),
        None => {
            let g = ArrayGeometry::default_ula();
            match meta {
                Some(m) => g.with_reference(m.reference_channel - 1),
                None => Ok(g),
            }
        }
    }
}

pub fn cmd_separate(args: &SeparateArgs) -> Result<SeparationOutput> {
    let mut inputs = Vec::new();
    let (mixture, target, meta) = match (&args.bundle, &args.mixture) {
        (Some(dir), _) => {
            let b = SceneBundle::read(dir)?;
            for f in [
                crate::simulate::MIXTURE_WAV,
                crate::simulate::TARGET_WAV,
                crate::simulate::META_JSON,
            ] {
                inputs.push(dir.join(f));
            }
            (b.mixture, Some(b.target_image), Some(b.metadata))
        }
        (None, Some(m)) => {
            inputs.push(m.clone());
            let target = match &args.target {
                Some(t) => {
                    inputs.push(t.clone());
                    Some(read_wav(t)?)
                }
                None => None,
            };
            (read_wav(m)?, target, None)
        }
        (None, None) => {
            return Err(Error::MissingInput {
                method: args.method.name().into(),
                what: "--bundle or --mixture".into(),
            })
        }
    };
    if let Some(g) = &args.geometry {
        inputs.push(g.clone());
    }
    if let MaskSource::Btf(p) = &args.mask_source {
        inputs.push(p.clone());
    }
    if let Some(p) = &args.noise_mask {
        inputs.push(p.clone());
    }
    let geometry = load_geometry(args.geometry.as_deref(), meta.as_ref())?;
    let cfg = SeparationConfig {
        method: args.method,
        mask_source: args.mask_source.clone(),
        noise_mask: args.noise_mask.clone(),
        theta_deg: args.theta,
        clip: args.clip,
        diagonal_loading: args.diagonal_loading,
    };
    let input = SeparationInput {
        mixture,
        target,
        geometry,
    };
    let out = separate(&input, &cfg)?;
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    write_wav(
        &args.out,
        &MultiChannelWaveform::from_mono(out.estimate.clone()),
        BitDepth::Float32,
    )?;
    if let (Some(p), Some(w)) = (&args.save_weights, &out.weights) {
        write_btf(p, &BtfTensor::from_weights(w))?;
    }
    if let Some(m) = out.metrics.first() {
        println!("{}", m.report.to_line());
    }
    let config = serde_json::json!({
        "stft": input.geometry_signal_config(),
        "reference_channel": input.geometry.reference_channel() + 1,
        "n_mics": input.geometry.n_mics(),
    });
    let record = manifest(
        "separate",
        args,
        hash_inputs(&inputs)?,
        config,
        out.metrics.clone(),
    );
    let path = args.manifest.clone().unwrap_or_else(|| {
        args.out
            .parent()
            .unwrap_or(Path::new("."))
            .join(MANIFEST_FILE)
    });
    append_manifest(&path, &record)?;
    Ok(out)
}

impl SeparationInput {
    fn geometry_signal_config(&self) -> SignalConfig {
        SignalConfig::with_sample_rate(self.mixture.sample_rate_hz())
    }
}

fn pick_channel(
    wave: &MultiChannelWaveform,
    one_based: usize,
    what: &'static str,
) -> Result<Waveform> {
    if one_based == 0 || one_based > wave.n_channels() {
        return Err(Error::DimensionMismatch {
            what,
            expected: one_based,
            actual: wave.n_channels(),
        });
    }
    Ok(wave.to_mono(one_based - 1))
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<MetricReport> {
    let est = read_wav(&args.estimate)?;
    let reference = read_wav(&args.reference)?;
    if est.sample_rate_hz() != reference.sample_rate_hz() {
        return Err(Error::InvalidConfig(format!(
            "sample rates differ: {} vs {} Hz",
            est.sample_rate_hz(),
            reference.sample_rate_hz()
        )));
    }
    let est = pick_channel(&est, args.estimate_channel, "estimate channel")?;
    let reference = pick_channel(&reference, args.reference_channel, "reference channel")?;
    let report = MetricReport::compute(&est, &reference)?;
    if let Some(path) = &args.manifest {
        let record = manifest(
            "evaluate",
            args,
            hash_inputs(&[args.estimate.clone(), args.reference.clone()])?,
            serde_json::Value::Null,
            vec![LabelledMetric {
                label: "estimate".into(),
                report,
            }],
        );
        append_manifest(path, &record)?;
    }
    Ok(report)
}

pub fn cmd_features(args: &FeaturesArgs) -> Result<()> {
    let mut inputs = Vec::new();
    let (mixture, meta) = match (&args.bundle, &args.wav) {
        (Some(dir), _) => {
            let b = SceneBundle::read(dir)?;
            inputs.push(dir.join(crate::simulate::MIXTURE_WAV));
            inputs.push(dir.join(crate::simulate::META_JSON));
            (b.mixture, Some(b.metadata))
        }
        (None, Some(w)) => {
            inputs.push(w.clone());
            (read_wav(w)?, None)
        }
        (None, None) => {
            return Err(Error::MissingInput {
                method: "features".into(),
                what: "--bundle or --wav".into(),
            })
        }
    };
    if mixture.n_channels() < 2 {
        return Err(Error::NoPairs);
    }
    if let Some(g) = &args.geometry {
        inputs.push(g.clone());
    }
    let mut geometry = load_geometry(args.geometry.as_deref(), meta.as_ref())?;
    if let Some(pairs) = &args.pairs {
        geometry = geometry.with_pairs_one_based(pairs)?;
    }
    if geometry.pairs().is_empty() {
        return Err(Error::NoPairs);
    }
    let config = SignalConfig::with_sample_rate(mixture.sample_rate_hz());
    let plan = StftPlan::new(config)?;
    let spec = stft(&mixture, &plan)?;
    crate::types::validate_dims(&spec, &geometry)?;
    let theta = match (args.theta, &meta) {
        (Some(t), _) => t,
        (None, Some(m)) => m.theta_target_deg,
        (None, None) => estimate_doa(&spec, &geometry, &default_angle_grid(), &config)?,
    };
    std::fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    let mut written = Vec::new();
    for &pair in geometry.pairs() {
        let map = compute_ipd(&spec, pair)?;
        let name = format!("{}.btf", map.label);
        write_btf(args.out.join(&name), &BtfTensor::from_feature(&map))?;
        written.push(name);
    }
    let af = compute_angle_feature(&spec, &geometry, theta, &config)?;
    write_btf(args.out.join("af.btf"), &BtfTensor::from_feature(&af))?;
    written.push("af.btf".into());
    let record = manifest(
        "features",
        args,
        hash_inputs(&inputs)?,
        serde_json::json!({
            "stft": config,
            "theta_deg": theta,
            "pairs_one_based": geometry.pairs().iter().map(|(i, j)| (i + 1, j + 1)).collect::<Vec<_>>(),
            "files": written,
        }),
        Vec::new(),
    );
    let path = args
        .manifest
        .clone()
        .unwrap_or_else(|| args.out.join(MANIFEST_FILE));
    append_manifest(&path, &record)
}
