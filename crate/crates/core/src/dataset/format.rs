//! `.tlsm` map files.
//!
//! Layout (all little-endian): magic `TLSM`, u32 rows (t_A samples), u32
//! columns (ν_d samples), then rows·columns f32 values in row-major order.
//! Axes and labels live in the dataset manifest.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"TLSM";
const HEADER_LEN: usize = 12;

/// Raw map payload as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct MapFile {
    pub rows: u32,
    pub cols: u32,
    pub values: Vec<f32>,
}

impl MapFile {
    pub fn from_f64(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::Format(format!("{} values for a {rows}×{cols} map", values.len())));
        }
        let rows = u32::try_from(rows).map_err(|_| Error::Format("too many rows".into()))?;
        let cols = u32::try_from(cols).map_err(|_| Error::Format("too many columns".into()))?;
        Ok(Self { rows, cols, values: values.iter().map(|&v| v as f32).collect() })
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 4 * self.values.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&self.rows.to_le_bytes());
        out.extend_from_slice(&self.cols.to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Format(format!("file too short ({} bytes)", bytes.len())));
        }
        if &bytes[..4] != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes"));
        let (rows, cols) = (word(4), word(8));
        let expected = (rows as usize)
            .checked_mul(cols as usize)
            .and_then(|n| n.checked_mul(4))
            .ok_or_else(|| Error::Format("dimensions overflow".into()))?;
        let payload = &bytes[HEADER_LEN..];
        if payload.len() != expected {
            return Err(Error::Format(format!(
                "{rows}×{cols} map needs {expected} payload bytes, found {}",
                payload.len()
            )));
        }
        let values = payload.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes"))).collect();
        Ok(Self { rows, cols, values })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(&self.encode()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::decode(&bytes).map_err(|e| Error::parse(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let f = MapFile { rows: 2, cols: 3, values: vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.5] };
        let bytes = f.encode();
        assert_eq!(&bytes[..4], b"TLSM");
        assert_eq!(&bytes[4..8], &[2, 0, 0, 0]);
        assert_eq!(&bytes[8..12], &[3, 0, 0, 0]);
        assert_eq!(&bytes[12..16], &0f32.to_le_bytes());
        assert_eq!(&bytes[32..36], &5.5f32.to_le_bytes());
        assert_eq!(bytes.len(), 12 + 24);
    }

    #[test]
    fn rejects_bad_magic_and_length() {
        let mut bytes = MapFile { rows: 1, cols: 2, values: vec![1.0, 2.0] }.encode();
        assert!(MapFile::decode(&bytes[..bytes.len() - 1]).is_err());
        bytes[0] = b'X';
        assert!(matches!(MapFile::decode(&bytes), Err(Error::Format(_))));
        assert!(MapFile::decode(b"TLS").is_err());
    }

    proptest! {
        #[test]
        fn roundtrip(rows in 1usize..8, cols in 1usize..8, seed in any::<u64>()) {
            let values: Vec<f32> = (0..rows * cols)
                .map(|i| f32::from_bits((seed.wrapping_mul(i as u64 + 1) >> 7) as u32 & 0x3fff_ffff))
                .collect();
            let f = MapFile { rows: rows as u32, cols: cols as u32, values };
            prop_assert_eq!(MapFile::decode(&f.encode()).unwrap(), f);
        }
    }
}
