//! Microphone array description and its on-disk form.
//!
//! Indices are 0-based in memory. Geometry files use 1-based channel numbers
//! for pairs and the reference channel:
//!
//! ```toml
//! reference_channel = 1
//! mic_positions_m = [[0.0, 0.0, 0.0], [0.04, 0.0, 0.0]]
//! pairs = [[1, 2]]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The nine pairs (1-based) used for IPD and angle features with the
/// default 15-microphone array.
pub const DEFAULT_PAIRS_ONE_BASED: [(usize, usize); 9] = [
    (1, 15),
    (2, 14),
    (3, 13),
    (1, 7),
    (12, 4),
    (11, 5),
    (12, 8),
    (7, 10),
    (8, 9),
];

pub const DEFAULT_N_MICS: usize = 15;
pub const DEFAULT_SPACING_M: f64 = 0.04;

/// `(cos θ, sin θ)` for θ in degrees, exact at multiples of 90°.
pub fn cos_sin_deg(theta_deg: f64) -> (f64, f64) {
    let r = theta_deg.rem_euclid(360.0);
    if r == 0.0 {
        (1.0, 0.0)
    } else if r == 90.0 {
        (0.0, 1.0)
    } else if r == 180.0 {
        (-1.0, 0.0)
    } else if r == 270.0 {
        (0.0, -1.0)
    } else {
        let th = theta_deg.to_radians();
        (th.cos(), th.sin())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    mic_positions_m: Vec<[f64; 3]>,
    pairs: Vec<(usize, usize)>,
    reference_channel: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeometryFile {
    #[serde(default = "one")]
    reference_channel: usize,
    mic_positions_m: Vec<[f64; 3]>,
    #[serde(default)]
    pairs: Vec<[usize; 2]>,
}

fn one() -> usize {
    1
}

impl ArrayGeometry {
    pub fn new(
        mic_positions_m: Vec<[f64; 3]>,
        pairs: Vec<(usize, usize)>,
        reference_channel: usize,
    ) -> Result<Self> {
        let n = mic_positions_m.len();
        if n == 0 {
            return Err(Error::InvalidConfig(
                "geometry needs at least one microphone".into(),
            ));
        }
        if mic_positions_m.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("microphone positions"));
        }
        if reference_channel >= n {
            return Err(Error::InvalidConfig(format!(
                "reference channel {} out of range for {n} microphones",
                reference_channel + 1
            )));
        }
        for &(i, j) in &pairs {
            if i >= n || j >= n {
                return Err(Error::InvalidPair(i, j));
            }
        }
        Ok(Self {
            mic_positions_m,
            pairs,
            reference_channel,
        })
    }

    /// `n` microphones along the positive x-axis starting at the origin,
    /// reference channel 0, no pairs.
    pub fn uniform_linear(n: usize, spacing_m: f64) -> Result<Self> {
        let positions = (0..n).map(|k| [k as f64 * spacing_m, 0.0, 0.0]).collect();
        Self::new(positions, Vec::new(), 0)
    }

    /// 15-microphone, 4 cm ULA with the nine default feature pairs.
    pub fn default_ula() -> Self {
        Self::uniform_linear(DEFAULT_N_MICS, DEFAULT_SPACING_M)
            .and_then(|g| g.with_pairs_one_based(&DEFAULT_PAIRS_ONE_BASED))
            .expect("default geometry is valid")
    }

    pub fn with_pairs(mut self, pairs: Vec<(usize, usize)>) -> Result<Self> {
        let n = self.n_mics();
        if let Some(&(i, j)) = pairs.iter().find(|(i, j)| *i >= n || *j >= n) {
            return Err(Error::InvalidPair(i, j));
        }
        self.pairs = pairs;
        Ok(self)
    }

    pub fn with_pairs_one_based(self, pairs: &[(usize, usize)]) -> Result<Self> {
        let zero_based = pairs
            .iter()
            .map(|&(i, j)| {
                if i == 0 || j == 0 {
                    Err(Error::InvalidPair(i, j))
                } else {
                    Ok((i - 1, j - 1))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        self.with_pairs(zero_based)
    }

    pub fn with_reference(mut self, reference_channel: usize) -> Result<Self> {
        if reference_channel >= self.n_mics() {
            return Err(Error::InvalidConfig(format!(
                "reference channel {} out of range",
                reference_channel + 1
            )));
        }
        self.reference_channel = reference_channel;
        Ok(self)
    }

    pub fn n_mics(&self) -> usize {
        self.mic_positions_m.len()
    }

    pub fn positions(&self) -> &[[f64; 3]] {
        &self.mic_positions_m
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn reference_channel(&self) -> usize {
        self.reference_channel
    }

    pub fn check_pair(&self, pair: (usize, usize)) -> Result<()> {
        let n = self.n_mics();
        if pair.0 >= n || pair.1 >= n {
            return Err(Error::InvalidPair(pair.0, pair.1));
        }
        Ok(())
    }

    /// Euclidean distance between two microphones.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.mic_positions_m[i], self.mic_positions_m[j]);
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    }

    /// Path-length advantage of mic `i` over mic `j` for a far-field source
    /// at azimuth `theta_deg` in the horizontal plane: `(p_i - p_j) · u(θ)`
    /// with `u(θ) = (cos θ, sin θ, 0)`.
    ///
    /// For microphones on the x-axis this is the signed spacing times
    /// `cos θ`; it is positive when `i` is nearer the source.
    pub fn projected_spacing(&self, i: usize, j: usize, theta_deg: f64) -> f64 {
        let (a, b) = (self.mic_positions_m[i], self.mic_positions_m[j]);
        let (c, s) = cos_sin_deg(theta_deg);
        (a[0] - b[0]) * c + (a[1] - b[1]) * s
    }

    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self> {
        let file: GeometryFile = toml::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        if file.reference_channel == 0 {
            return Err(Error::Parse {
                path: origin.to_path_buf(),
                message: "reference_channel is 1-based".into(),
            });
        }
        let pairs: Vec<(usize, usize)> = file.pairs.iter().map(|p| (p[0], p[1])).collect();
        Self::new(file.mic_positions_m, Vec::new(), file.reference_channel - 1)
            .and_then(|g| g.with_pairs_one_based(&pairs))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text, path)
    }

    pub fn to_toml_string(&self) -> String {
        let file = GeometryFile {
            reference_channel: self.reference_channel + 1,
            mic_positions_m: self.mic_positions_m.clone(),
            pairs: self.pairs.iter().map(|&(i, j)| [i + 1, j + 1]).collect(),
        };
        toml::to_string(&file).expect("geometry serializes")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_toml_string()).map_err(|e| Error::io(path, e))
    }
}

impl Default for ArrayGeometry {
    fn default() -> Self {
        Self::default_ula()
    }
}
