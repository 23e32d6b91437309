//! Binary flow dump: `PFLW`, width and height as little-endian `u32`, an
//! LSB-first row-major validity bitmap padded to a byte, then `(dx, dy)`
//! little-endian `f32` pairs.

use crate::error::{Error, Result};
use crate::field::FlowGrid;

pub const FLOW_MAGIC: &[u8; 4] = b"PFLW";
const HEADER: usize = 12;

/// Byte length of a flow file for the given dimensions.
pub fn flow_file_len(width: usize, height: usize) -> Option<usize> {
    let n = width.checked_mul(height)?;
    n.checked_mul(8)?.checked_add(n.div_ceil(8))?.checked_add(HEADER)
}

pub fn write_flow(field: &FlowGrid) -> Vec<u8> {
    let (w, h) = field.dims();
    let n = w * h;
    let mut out = Vec::with_capacity(flow_file_len(w, h).expect("in-memory field fits"));
    out.extend_from_slice(FLOW_MAGIC);
    out.extend_from_slice(&(w as u32).to_le_bytes());
    out.extend_from_slice(&(h as u32).to_le_bytes());
    let mut bitmap = vec![0u8; n.div_ceil(8)];
    for (i, _) in field.valid().iter().enumerate().filter(|(_, v)| **v) {
        bitmap[i / 8] |= 1 << (i % 8);
    }
    out.extend_from_slice(&bitmap);
    for v in field.vectors() {
        out.extend_from_slice(&v[0].to_le_bytes());
        out.extend_from_slice(&v[1].to_le_bytes());
    }
    out
}

pub fn read_flow(bytes: &[u8]) -> Result<FlowGrid> {
    if bytes.len() < HEADER {
        return Err(Error::Length {
            expected: HEADER,
            found: bytes.len(),
        });
    }
    if &bytes[..4] != FLOW_MAGIC {
        return Err(Error::Format(format!("bad magic {:?}", &bytes[..4])));
    }
    let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes")) as usize;
    let (w, h) = (word(4), word(8));
    let expected = flow_file_len(w, h).ok_or_else(|| Error::Format(format!("{w}x{h} field is too large")))?;
    if bytes.len() != expected {
        return Err(Error::Length {
            expected,
            found: bytes.len(),
        });
    }
    let n = w * h;
    let bitmap = &bytes[HEADER..HEADER + n.div_ceil(8)];
    if n % 8 != 0 && bitmap[n / 8] >> (n % 8) != 0 {
        return Err(Error::Format("nonzero padding bits in validity bitmap".into()));
    }
    let valid: Vec<bool> = (0..n).map(|i| bitmap[i / 8] >> (i % 8) & 1 == 1).collect();
    let body = &bytes[HEADER + bitmap.len()..];
    let mut vectors = Vec::with_capacity(n);
    for (i, chunk) in body.chunks_exact(8).enumerate() {
        let dx = f32::from_le_bytes(chunk[..4].try_into().expect("4 bytes"));
        let dy = f32::from_le_bytes(chunk[4..].try_into().expect("4 bytes"));
        if valid[i] {
            if !(dx.is_finite() && dy.is_finite()) {
                return Err(Error::Format(format!("pixel {i} has a non-finite vector")));
            }
        } else if chunk.iter().any(|&b| b != 0) {
            return Err(Error::Format(format!(
                "invalid pixel {i} carries a nonzero vector"
            )));
        }
        vectors.push([dx, dy]);
    }
    FlowGrid::from_parts(w, h, vectors, valid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_pixel_layout() {
        let g = FlowGrid::from_fn(1, 1, |_, _| [0.5, -1.25]);
        let bytes = write_flow(&g);
        assert_eq!(bytes.len(), 21);
        assert_eq!(&bytes[..4], b"PFLW");
        assert_eq!(bytes[12], 1);
        assert_eq!(&bytes[13..17], &0.5f32.to_le_bytes());
        assert_eq!(read_flow(&bytes).unwrap(), g);
    }

    #[test]
    fn all_invalid_writes_zero_vectors() {
        let bytes = write_flow(&FlowGrid::zeros(2, 2, false));
        assert_eq!(bytes.len(), 12 + 1 + 32);
        assert!(bytes[12..].iter().all(|&b| b == 0));
        assert_eq!(read_flow(&bytes).unwrap().valid_count(), 0);
    }

    #[test]
    fn errors() {
        let good = write_flow(&FlowGrid::zeros(3, 3, true));
        let mut magic = good.clone();
        magic[0] = b'X';
        assert!(matches!(read_flow(&magic), Err(Error::Format(_))));
        assert!(matches!(
            read_flow(&good[..good.len() - 1]),
            Err(Error::Length {
                expected: 86,
                found: 85
            })
        ));
        assert!(matches!(read_flow(&good[..5]), Err(Error::Length { .. })));
        let mut padded = good.clone();
        padded[13] |= 0x80;
        assert!(matches!(read_flow(&padded), Err(Error::Format(_))));
        let mut dirty = write_flow(&FlowGrid::zeros(3, 3, false));
        dirty[20] = 1;
        assert!(matches!(read_flow(&dirty), Err(Error::Format(_))));
        let mut huge = good.clone();
        huge[4..12].copy_from_slice(&[0xff; 8]);
        assert!(read_flow(&huge).is_err());
    }
}
