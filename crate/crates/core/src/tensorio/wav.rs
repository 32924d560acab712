//! RIFF/WAVE reader and writer for 16-bit PCM and 32-bit IEEE float.

use std::path::Path;

use crate::error::{Error, Result};
use crate::types::MultiChannelWaveform;

const FORMAT_PCM: u16 = 1;
const FORMAT_FLOAT: u16 = 3;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitDepth {
    Pcm16,
    Float32,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::CorruptFile {
                offset: self.pos as u64,
                reason: format!("unexpected end of file reading {what}"),
            });
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        let b = self.take(2, what)?;
        Ok(u16::from_le_bytes([b[0], b[1]]))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        let b = self.take(4, what)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }
}

struct Format {
    tag: u16,
    channels: u16,
    sample_rate: u32,
    bits: u16,
}

/// Decodes a WAV file image.
pub fn decode_wav(bytes: &[u8]) -> Result<MultiChannelWaveform> {
    let mut cur = Cursor { bytes, pos: 0 };
    if cur.take(4, "RIFF tag")? != b"RIFF" {
        return Err(Error::UnsupportedFormat("missing RIFF tag".into()));
    }
    let _riff_len = cur.u32("RIFF size")?;
    if cur.take(4, "WAVE tag")? != b"WAVE" {
        return Err(Error::UnsupportedFormat("missing WAVE tag".into()));
    }
    let mut format: Option<Format> = None;
    loop {
        let chunk_start = cur.pos;
        let id = cur.take(4, "chunk id")?;
        let len = cur.u32("chunk size")? as usize;
        let body_start = cur.pos;
        match id {
            b"fmt " => {
                if len < 16 {
                    return Err(Error::CorruptFile {
                        offset: chunk_start as u64,
                        reason: format!("fmt chunk of {len} bytes"),
                    });
                }
                let mut tag = cur.u16("format tag")?;
                let channels = cur.u16("channel count")?;
                let sample_rate = cur.u32("sample rate")?;
                let _byte_rate = cur.u32("byte rate")?;
                let _align = cur.u16("block align")?;
                let bits = cur.u16("bits per sample")?;
                if tag == FORMAT_EXTENSIBLE {
                    if len < 40 {
                        return Err(Error::CorruptFile {
                            offset: chunk_start as u64,
                            reason: "short extensible fmt chunk".into(),
                        });
                    }
                    let _ = cur.take(8, "extension header")?;
                    tag = cur.u16("sub-format")?;
                }
                cur.pos = body_start;
                cur.take(len + (len & 1), "fmt chunk")?;
                format = Some(Format {
                    tag,
                    channels,
                    sample_rate,
                    bits,
                });
            }
            b"data" => {
                let fmt = format.ok_or_else(|| Error::CorruptFile {
                    offset: chunk_start as u64,
                    reason: "data chunk before fmt chunk".into(),
                })?;
                let payload = cur.take(len, "data chunk")?;
                return decode_samples(&fmt, payload);
            }
            _ => {
                cur.take(len + (len & 1), "chunk body")?;
            }
        }
    }
}

fn decode_samples(fmt: &Format, payload: &[u8]) -> Result<MultiChannelWaveform> {
    let width = match (fmt.tag, fmt.bits) {
        (FORMAT_PCM, 16) => 2,
        (FORMAT_FLOAT, 32) => 4,
        (tag, bits) => {
            return Err(Error::UnsupportedFormat(format!(
                "format tag {tag} with {bits} bits per sample"
            )))
        }
    };
    let n_ch = fmt.channels as usize;
    if n_ch == 0 {
        return Err(Error::UnsupportedFormat("zero channels".into()));
    }
    let frame = width * n_ch;
    if !payload.len().is_multiple_of(frame) {
        return Err(Error::CorruptFile {
            offset: payload.len() as u64,
            reason: format!("data length not a multiple of the {frame}-byte frame"),
        });
    }
    let n = payload.len() / frame;
    let mut channels = vec![Vec::with_capacity(n); n_ch];
    for (k, chunk) in payload.chunks_exact(width).enumerate() {
        let v = if width == 2 {
            i16::from_le_bytes([chunk[0], chunk[1]]) as f64 / 32768.0
        } else {
            f32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]) as f64
        };
        channels[k % n_ch].push(v);
    }
    MultiChannelWaveform::new(channels, fmt.sample_rate)
}

/// Encodes a waveform as a WAV file image.
pub fn encode_wav(wave: &MultiChannelWaveform, depth: BitDepth) -> Vec<u8> {
    let n_ch = wave.n_channels();
    let (tag, width) = match depth {
        BitDepth::Pcm16 => (FORMAT_PCM, 2usize),
        BitDepth::Float32 => (FORMAT_FLOAT, 4usize),
    };
    let data_len = wave.len() * n_ch * width;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&((36 + data_len) as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&tag.to_le_bytes());
    out.extend_from_slice(&(n_ch as u16).to_le_bytes());
    out.extend_from_slice(&wave.sample_rate_hz().to_le_bytes());
    let block = (n_ch * width) as u32;
    out.extend_from_slice(&(wave.sample_rate_hz() * block).to_le_bytes());
    out.extend_from_slice(&(block as u16).to_le_bytes());
    out.extend_from_slice(&((width * 8) as u16).to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for n in 0..wave.len() {
        for ch in wave.channels() {
            match depth {
                BitDepth::Pcm16 => {
                    let q = (ch[n] * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
                    out.extend_from_slice(&q.to_le_bytes());
                }
                BitDepth::Float32 => out.extend_from_slice(&(ch[n] as f32).to_le_bytes()),
            }
        }
    }
    out
}

pub fn read_wav(path: impl AsRef<Path>) -> Result<MultiChannelWaveform> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_wav(&bytes)
}

pub fn write_wav(
    path: impl AsRef<Path>,
    wave: &MultiChannelWaveform,
    depth: BitDepth,
) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_wav(wave, depth)).map_err(|e| Error::io(path, e))
}
