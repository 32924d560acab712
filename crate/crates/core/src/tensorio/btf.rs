//! BTF: a minimal little-endian binary tensor container.
//!
//! ```text
//! offset  size        field
//! 0       4           magic "BTF1"
//! 4       1           dtype: 1 = f32 real, 2 = f32 complex (re, im interleaved)
//! 5       1           ndim, 1..=4
//! 6       2           reserved, zero
//! 8       8 * ndim    dims, u64 little-endian, outermost first
//! ...     payload     row-major f32 little-endian
//! ```
//!
//! A `(1, 2)` complex tensor holding `[1+2j, -0.5+0j]` is
//!
//! ```text
//! 42 54 46 31 02 02 00 00  01 00 00 00 00 00 00 00
//! 02 00 00 00 00 00 00 00  00 00 80 3f 00 00 00 40
//! 00 00 00 bf 00 00 00 00
//! ```
//!
//! Dim order per payload kind: masks `(T, F)`, time-invariant weights
//! `(I, F)`, time-varying weights `(I, T, F)`, feature maps `(T, F)`.

use std::path::Path;

use num_complex::{Complex32, Complex64};

use crate::error::{Error, Result};
use crate::spatial::FeatureMap;
use crate::types::{BeamformerWeights, TimeFrequencyMask};

pub const MAGIC: [u8; 4] = *b"BTF1";
pub const DTYPE_REAL: u8 = 1;
pub const DTYPE_COMPLEX: u8 = 2;
const HEADER_FIXED: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub enum BtfData {
    Real(Vec<f32>),
    Complex(Vec<Complex32>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BtfTensor {
    dims: Vec<usize>,
    data: BtfData,
}

impl BtfTensor {
    pub fn new(dims: Vec<usize>, data: BtfData) -> Result<Self> {
        if dims.is_empty() || dims.len() > 4 {
            return Err(Error::DimsMismatch(format!(
                "ndim {} not in 1..=4",
                dims.len()
            )));
        }
        let n: usize = dims.iter().product();
        let len = match &data {
            BtfData::Real(v) => v.len(),
            BtfData::Complex(v) => v.len(),
        };
        if n != len {
            return Err(Error::DimsMismatch(format!(
                "dims {dims:?} hold {n} elements, data has {len}"
            )));
        }
        Ok(Self { dims, data })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &BtfData {
        &self.data
    }

    fn dtype(&self) -> u8 {
        match self.data {
            BtfData::Real(_) => DTYPE_REAL,
            BtfData::Complex(_) => DTYPE_COMPLEX,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&MAGIC);
        out.push(self.dtype());
        out.push(self.dims.len() as u8);
        out.extend_from_slice(&[0, 0]);
        for d in &self.dims {
            out.extend_from_slice(&(*d as u64).to_le_bytes());
        }
        match &self.data {
            BtfData::Real(v) => v
                .iter()
                .for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
            BtfData::Complex(v) => v.iter().for_each(|z| {
                out.extend_from_slice(&z.re.to_le_bytes());
                out.extend_from_slice(&z.im.to_le_bytes());
            }),
        }
        out
    }

    /// Parses a BTF image. Payload size is checked against the header
    /// before any allocation.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_FIXED {
            return Err(Error::Truncated {
                expected: HEADER_FIXED as u64,
                found: bytes.len() as u64,
            });
        }
        let magic: [u8; 4] = bytes[..4].try_into().expect("4 bytes");
        if magic != MAGIC {
            return Err(Error::BadMagic(magic));
        }
        let dtype = bytes[4];
        let elem = match dtype {
            DTYPE_REAL => 4u64,
            DTYPE_COMPLEX => 8u64,
            other => return Err(Error::UnsupportedDtype(other)),
        };
        let ndim = bytes[5] as usize;
        if !(1..=4).contains(&ndim) {
            return Err(Error::DimsMismatch(format!("ndim {ndim} not in 1..=4")));
        }
        if bytes[6] != 0 || bytes[7] != 0 {
            return Err(Error::CorruptFile {
                offset: 6,
                reason: "reserved bytes must be zero".into(),
            });
        }
        let header = HEADER_FIXED + 8 * ndim;
        if bytes.len() < header {
            return Err(Error::Truncated {
                expected: header as u64,
                found: bytes.len() as u64,
            });
        }
        let dims: Vec<u64> = bytes[HEADER_FIXED..header]
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        let payload = &bytes[header..];
        let expected = dims
            .iter()
            .try_fold(elem, |acc, d| acc.checked_mul(*d))
            .ok_or_else(|| Error::DimsMismatch(format!("dims {dims:?} overflow")))?;
        let found = payload.len() as u64;
        if found < expected {
            return Err(Error::Truncated { expected, found });
        }
        if found > expected {
            return Err(Error::DimsMismatch(format!(
                "{} trailing bytes after payload of dims {dims:?}",
                found - expected
            )));
        }
        let floats = payload
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")));
        let data = if dtype == DTYPE_REAL {
            BtfData::Real(floats.collect())
        } else {
            let v: Vec<f32> = floats.collect();
            BtfData::Complex(
                v.chunks_exact(2)
                    .map(|p| Complex32::new(p[0], p[1]))
                    .collect(),
            )
        };
        Ok(Self {
            dims: dims.into_iter().map(|d| d as usize).collect(),
            data,
        })
    }

    fn complex_f64(&self) -> Result<Vec<Complex64>> {
        match &self.data {
            BtfData::Complex(v) => Ok(v
                .iter()
                .map(|z| Complex64::new(z.re as f64, z.im as f64))
                .collect()),
            BtfData::Real(v) => Ok(v.iter().map(|x| Complex64::new(*x as f64, 0.0)).collect()),
        }
    }

    pub fn from_mask(mask: &TimeFrequencyMask) -> Self {
        let (t, f) = mask.dims();
        Self {
            dims: vec![t, f],
            data: BtfData::Complex(mask.as_flat().iter().map(to_c32).collect()),
        }
    }

    /// Reads a `(T, F)` mask; real tensors become masks with zero
    /// imaginary part.
    pub fn to_mask(&self) -> Result<TimeFrequencyMask> {
        let [t, f] = self.dims[..] else {
            return Err(Error::DimsMismatch(format!(
                "mask must be 2-D (T, F), got {:?}",
                self.dims
            )));
        };
        TimeFrequencyMask::from_flat(self.complex_f64()?, (t, f))
    }

    pub fn from_weights(w: &BeamformerWeights) -> Self {
        let dims = match w {
            BeamformerWeights::TimeInvariant { dims, .. } => vec![dims.0, dims.1],
            BeamformerWeights::TimeVarying { dims, .. } => vec![dims.0, dims.1, dims.2],
        };
        Self {
            dims,
            data: BtfData::Complex(w.as_flat().iter().map(to_c32).collect()),
        }
    }

    /// `(I, F)` tensors load as time-invariant weights, `(I, T, F)` as
    /// time-varying ones.
    pub fn to_weights(&self) -> Result<BeamformerWeights> {
        let data = self.complex_f64()?;
        match self.dims[..] {
            [i, f] => BeamformerWeights::time_invariant(data, (i, f)),
            [i, t, f] => BeamformerWeights::time_varying(data, (i, t, f)),
            _ => Err(Error::DimsMismatch(format!(
                "weights must be (I, F) or (I, T, F), got {:?}",
                self.dims
            ))),
        }
    }

    pub fn from_feature(map: &FeatureMap) -> Self {
        Self {
            dims: vec![map.dims.0, map.dims.1],
            data: BtfData::Real(map.data.iter().map(|x| *x as f32).collect()),
        }
    }

    pub fn to_feature(&self, label: impl Into<String>) -> Result<FeatureMap> {
        let (BtfData::Real(v), [t, f]) = (&self.data, &self.dims[..]) else {
            return Err(Error::DimsMismatch(format!(
                "feature map must be real (T, F), got {:?}",
                self.dims
            )));
        };
        Ok(FeatureMap {
            data: v.iter().map(|x| *x as f64).collect(),
            dims: (*t, *f),
            label: label.into(),
        })
    }
}

fn to_c32(z: &Complex64) -> Complex32 {
    Complex32::new(z.re as f32, z.im as f32)
}

pub fn read_btf(path: impl AsRef<Path>) -> Result<BtfTensor> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    BtfTensor::from_bytes(&bytes)
}

pub fn write_btf(path: impl AsRef<Path>, tensor: &BtfTensor) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, tensor.to_bytes()).map_err(|e| Error::io(path, e))
}
