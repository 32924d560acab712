// Round trip of a complex mask through the BTF container, with a hex dump
// of the header.
//
//     cargo run --example btf_interchange

use mcsep::tensorio::{BtfData, BtfTensor};
use mcsep::{Complex64, TimeFrequencyMask};

pub fn run_example() -> mcsep::Result<()> {
    let values = vec![Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.0)];
    let mask = TimeFrequencyMask::from_flat(values, (1, 2))?;
    let tensor = BtfTensor::from_mask(&mask);
    let bytes = tensor.to_bytes();

    for (row, chunk) in bytes.chunks(16).enumerate() {
        let hex: Vec<String> = chunk.iter().map(|b| format!("{b:02x}")).collect();
        println!("{:04x}  {}", row * 16, hex.join(" "));
    }

    let back = BtfTensor::from_bytes(&bytes)?;
    assert_eq!(back, tensor);
    assert_eq!(back.to_mask()?, mask);
    if let BtfData::Complex(v) = back.data() {
        println!("dims {:?}, {} complex f32 values", back.dims(), v.len());
    }

    // truncated payloads are rejected, not zero-filled
    assert!(BtfTensor::from_bytes(&bytes[..bytes.len() - 1]).is_err());
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
