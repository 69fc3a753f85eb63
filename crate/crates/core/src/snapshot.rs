//! SQGF binary snapshots.
//!
//! Layout (all little-endian): `b"SQGF"`, version byte `1`, `u32 n1`, `u32 n2`,
//! `f64 L1`, `f64 L2`, then `n1 * n2` `f64` physical values, x1 fastest.
//! Zonal profiles use the degenerate form `n1 = 1`.

use std::io::{Read, Write};

use crate::error::{Result, SqgError};
use crate::spectral::{Grid, GridSpec, PhysicalField};

pub const MAGIC: &[u8; 4] = b"SQGF";
pub const VERSION: u8 = 1;
const HEADER_LEN: usize = 4 + 1 + 4 + 4 + 8 + 8;

/// Decoded snapshot; `n1` may be 1 for zonal profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub n1: usize,
    pub n2: usize,
    pub l1: f64,
    pub l2: f64,
    pub values: Vec<f64>,
}

impl Snapshot {
    pub fn from_field(f: &PhysicalField) -> Self {
        let s = f.grid().spec();
        Snapshot { n1: s.n1, n2: s.n2, l1: s.l1, l2: s.l2, values: f.values().to_vec() }
    }

    pub fn to_field(&self) -> Result<PhysicalField> {
        let grid = Grid::new(GridSpec::new(self.n1, self.n2, self.l1, self.l2)?)?;
        PhysicalField::new(grid, self.values.clone())
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 8 * self.values.len());
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.extend_from_slice(&(self.n1 as u32).to_le_bytes());
        out.extend_from_slice(&(self.n2 as u32).to_le_bytes());
        out.extend_from_slice(&self.l1.to_le_bytes());
        out.extend_from_slice(&self.l2.to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(SqgError::Format(format!("truncated header ({} bytes)", bytes.len())));
        }
        if &bytes[..4] != MAGIC {
            return Err(SqgError::Format("bad magic".into()));
        }
        if bytes[4] != VERSION {
            return Err(SqgError::Format(format!("unsupported version {}", bytes[4])));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap()) as usize;
        let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        let (n1, n2) = (u32_at(5), u32_at(9));
        let (l1, l2) = (f64_at(13), f64_at(21));
        let count = n1
            .checked_mul(n2)
            .ok_or_else(|| SqgError::Format("size overflow".into()))?;
        if bytes.len() != HEADER_LEN + 8 * count {
            return Err(SqgError::Format(format!(
                "expected {} payload bytes, got {}",
                8 * count,
                bytes.len() - HEADER_LEN
            )));
        }
        let values = (0..count).map(|i| f64_at(HEADER_LEN + 8 * i)).collect();
        Ok(Snapshot { n1, n2, l1, l2, values })
    }

    pub fn write_to(&self, mut w: impl Write) -> std::io::Result<()> {
        w.write_all(&self.encode())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut buf = Vec::new();
        r.read_to_end(&mut buf).map_err(|e| SqgError::Format(e.to_string()))?;
        Self::decode(&buf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_physical;
    use proptest::prelude::*;

    #[test]
    fn header_layout_is_exact() {
        let s = Snapshot { n1: 2, n2: 1, l1: 1.5, l2: -0.0, values: vec![1.0, 2.0] };
        let b = s.encode();
        assert_eq!(&b[..5], b"SQGF\x01");
        assert_eq!(&b[5..9], &[2, 0, 0, 0]);
        assert_eq!(&b[9..13], &[1, 0, 0, 0]);
        assert_eq!(&b[13..21], &1.5f64.to_le_bytes());
        assert_eq!(b.len(), HEADER_LEN + 16);
        assert_eq!(&b[HEADER_LEN + 8..], &2.0f64.to_le_bytes());
    }

    #[test]
    fn rejects_corrupt_input() {
        let g = Grid::new(GridSpec::with_sizes(4, 4).unwrap()).unwrap();
        let mut b = Snapshot::from_field(&random_physical(&g, 1)).encode();
        assert!(Snapshot::decode(&b[..10]).is_err());
        assert!(Snapshot::decode(&b[..b.len() - 1]).is_err());
        b[4] = 2;
        assert!(Snapshot::decode(&b).is_err());
        b[0] = b'X';
        assert!(Snapshot::decode(&b).is_err());
    }

    proptest! {
        #[test]
        fn roundtrip_is_bitwise(seed in 0u64..1000, n1 in 2usize..6, n2 in 2usize..6) {
            let g = Grid::new(GridSpec::with_sizes(2 * n1, 2 * n2).unwrap()).unwrap();
            let f = random_physical(&g, seed);
            let snap = Snapshot::from_field(&f);
            let back = Snapshot::decode(&snap.encode()).unwrap();
            prop_assert_eq!(back.to_field().unwrap(), f);
        }
    }
}
