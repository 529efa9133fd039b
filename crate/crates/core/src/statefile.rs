//! Binary state dumps: an 8-byte little-endian amplitude count followed by
//! interleaved little-endian `f64` (real, imaginary) pairs.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::state::StateVector;
use crate::C64;

pub fn encode(psi: &StateVector) -> Vec<u8> {
    let mut bytes = Vec::with_capacity(8 + 16 * psi.dim());
    bytes.extend_from_slice(&(psi.dim() as u64).to_le_bytes());
    for a in psi.amplitudes() {
        bytes.extend_from_slice(&a.re.to_le_bytes());
        bytes.extend_from_slice(&a.im.to_le_bytes());
    }
    bytes
}

pub fn decode(bytes: &[u8]) -> std::result::Result<StateVector, String> {
    if bytes.len() < 8 {
        return Err("missing length prefix".into());
    }
    let (head, body) = bytes.split_at(8);
    let count = u64::from_le_bytes(head.try_into().expect("8 bytes")) as usize;
    if body.len() != count.checked_mul(16).ok_or("length overflow")? {
        return Err(format!(
            "length prefix says {count} amplitudes but {} payload bytes follow",
            body.len()
        ));
    }
    let amplitudes = body
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            C64::new(re, im)
        })
        .collect();
    StateVector::from_amplitudes(amplitudes).map_err(|e| e.to_string())
}

pub fn write_state(psi: &StateVector, path: &Path) -> Result<()> {
    fs::write(path, encode(psi)).map_err(|e| Error::io(path, e))
}

pub fn read_state(path: &Path) -> Result<StateVector> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes).map_err(|reason| Error::Format {
        path: path.to_path_buf(),
        reason,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn layout() {
        let psi = StateVector::from_amplitudes(vec![C64::new(1.0, -2.0), C64::new(0.5, 0.0)]).unwrap();
        let bytes = encode(&psi);
        assert_eq!(bytes.len(), 8 + 32);
        assert_eq!(&bytes[..8], &2u64.to_le_bytes());
        assert_eq!(&bytes[8..16], &1.0f64.to_le_bytes());
        assert_eq!(&bytes[16..24], &(-2.0f64).to_le_bytes());
    }

    #[test]
    fn round_trip_is_exact() {
        let psi = StateVector::random_infinite_temperature(5, &mut RngStream::new(2)).unwrap();
        assert_eq!(decode(&encode(&psi)).unwrap(), psi);
    }

    #[test]
    fn truncated_input() {
        let psi = StateVector::all_down(2).unwrap();
        let bytes = encode(&psi);
        assert!(decode(&bytes[..bytes.len() - 1]).is_err());
        assert!(decode(&bytes[..4]).is_err());
        let mut three = 3u64.to_le_bytes().to_vec();
        three.extend(std::iter::repeat(0u8).take(48));
        assert!(decode(&three).is_err());
    }
}
