//! File formats: multi-channel WAV and BTF tensors.

pub mod btf;
pub mod wav;

pub use btf::{read_btf, write_btf, BtfData, BtfTensor};
pub use wav::{decode_wav, encode_wav, read_wav, write_wav, BitDepth};
