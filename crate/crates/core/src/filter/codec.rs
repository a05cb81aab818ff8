//! Versioned binary form of an [`IteratedBloomFilter`].
//!
//! All integers are little-endian.
//!
//! ```text
//! magic      "IFBF"
//! version    u8        (1)
//! flags      u8        bit 0: counters present, bit 1: capacities present
//! d          u16
//! k_i        u16
//! seeds      k_i x u64
//! m_ind      d x u64
//! capacity   d x u64   (only with flag bit 1)
//! per level:
//!   segments u32
//!   per segment:
//!     inserted u64
//!     bits     ceil(m_ind / 8) bytes, bit i at byte i/8, bit i%8
//!     counters ceil(m_ind / 2) bytes, low nibble first (only with flag bit 0)
//! ```

use alloc::format;
use alloc::vec::Vec;

use super::bits::{byte_len, BitArray, Nibbles};
use super::ibf::{Level, Segment};
use crate::{Error, FilterGeometry, IteratedBloomFilter, Result};

pub const MAGIC: [u8; 4] = *b"IFBF";
pub const FORMAT_VERSION: u8 = 1;

const FLAG_COUNTERS: u8 = 1;
const FLAG_CAPACITIES: u8 = 2;

impl IteratedBloomFilter {
    pub fn to_bytes(&self) -> Vec<u8> {
        let g = self.geometry();
        let has_caps = self.levels.iter().any(|l| l.capacity.is_some());
        let mut flags = 0;
        if self.is_counting() {
            flags |= FLAG_COUNTERS;
        }
        if has_caps {
            flags |= FLAG_CAPACITIES;
        }
        let mut out = Vec::new();
        out.extend_from_slice(&MAGIC);
        out.push(FORMAT_VERSION);
        out.push(flags);
        out.extend_from_slice(&(g.depth() as u16).to_le_bytes());
        out.extend_from_slice(&(g.hashes() as u16).to_le_bytes());
        for s in g.seeds() {
            out.extend_from_slice(&s.to_le_bytes());
        }
        for m in g.level_sizes() {
            out.extend_from_slice(&m.to_le_bytes());
        }
        if has_caps {
            for l in &self.levels {
                out.extend_from_slice(&l.capacity.unwrap_or(0).to_le_bytes());
            }
        }
        for l in &self.levels {
            out.extend_from_slice(&(l.chain.len() as u32).to_le_bytes());
            for seg in &l.chain {
                out.extend_from_slice(&seg.inserted.to_le_bytes());
                out.extend_from_slice(seg.bits.as_bytes());
                if let Some(c) = &seg.counters {
                    out.extend_from_slice(c.as_bytes());
                }
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(Error::Decode("bad magic".into()));
        }
        let version = r.u8()?;
        if version != FORMAT_VERSION {
            return Err(Error::Decode(format!("unsupported version {version}")));
        }
        let flags = r.u8()?;
        if flags & !(FLAG_COUNTERS | FLAG_CAPACITIES) != 0 {
            return Err(Error::Decode(format!("unknown flags {flags:#04x}")));
        }
        let d = r.u16()? as usize;
        let k_i = r.u16()? as u32;
        let seeds = (0..k_i).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
        let m_ind = (0..d).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
        let geometry = FilterGeometry::new(m_ind, k_i, seeds)
            .map_err(|e| Error::Decode(format!("invalid geometry: {e}")))?;
        let capacities = if flags & FLAG_CAPACITIES != 0 {
            (0..d)
                .map(|_| r.u64().map(|c| (c != 0).then_some(c)))
                .collect::<Result<Vec<_>>>()?
        } else {
            alloc::vec![None; d]
        };
        let counting = flags & FLAG_COUNTERS != 0;
        let mut levels = Vec::with_capacity(d);
        for (x, capacity) in capacities.into_iter().enumerate() {
            let m = geometry.level_size(x);
            let segments = r.u32()?;
            if segments == 0 {
                return Err(Error::Decode(format!("level {x} has no filters")));
            }
            let mut chain = Vec::new();
            for _ in 0..segments {
                let inserted = r.u64()?;
                let bits = BitArray::from_bytes(m, r.take(byte_len(m))?.to_vec())
                    .ok_or_else(|| Error::Decode(format!("level {x}: dirty padding bits")))?;
                let counters = if counting {
                    let raw = r.take(m.div_ceil(2) as usize)?.to_vec();
                    Some(Nibbles::from_bytes(m, raw).expect("length checked by take"))
                } else {
                    None
                };
                chain.push(Segment {
                    bits,
                    counters,
                    inserted,
                });
            }
            levels.push(Level { chain, capacity });
        }
        if r.pos != bytes.len() {
            return Err(Error::Decode(format!("{} trailing bytes", bytes.len() - r.pos)));
        }
        Ok(IteratedBloomFilter::from_parts(geometry, levels, counting))
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Decode(format!("truncated input at byte {}", self.pos)))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn header_layout() {
        let g = FilterGeometry::new(vec![16, 12], 1, vec![7]).unwrap();
        let mut f = IteratedBloomFilter::new(g);
        f.insert_level(0, &[9]).unwrap();
        f.insert_level(1, &[0]).unwrap();
        let b = f.to_bytes();
        let mut expected = Vec::new();
        expected.extend_from_slice(b"IFBF");
        expected.extend_from_slice(&[1, 0, 2, 0, 1, 0]);
        expected.extend_from_slice(&7u64.to_le_bytes());
        expected.extend_from_slice(&16u64.to_le_bytes());
        expected.extend_from_slice(&12u64.to_le_bytes());
        expected.extend_from_slice(&1u32.to_le_bytes());
        expected.extend_from_slice(&1u64.to_le_bytes());
        expected.extend_from_slice(&[0x00, 0x02]);
        expected.extend_from_slice(&1u32.to_le_bytes());
        expected.extend_from_slice(&1u64.to_le_bytes());
        expected.extend_from_slice(&[0x01, 0x00]);
        assert_eq!(b, expected);
        assert_eq!(IteratedBloomFilter::from_bytes(&b).unwrap(), f);
    }

    #[test]
    fn round_trips_counters_and_chains() {
        let g = FilterGeometry::uniform(2, 100, 2).unwrap();
        let mut f = IteratedBloomFilter::with_counters(g).with_capacities(&[2, 50]).unwrap();
        for i in 0..10 {
            f.insert_level(0, &[i, i + 1]).unwrap();
            f.insert_level(1, &[i * 3, 99 - i]).unwrap();
        }
        assert!(f.chain_len(0) > 1);
        let back = IteratedBloomFilter::from_bytes(&f.to_bytes()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn rejects_malformed_input() {
        let g = FilterGeometry::uniform(1, 64, 1).unwrap();
        let good = IteratedBloomFilter::new(g).to_bytes();
        assert!(IteratedBloomFilter::from_bytes(&good[..good.len() - 1]).is_err());
        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(IteratedBloomFilter::from_bytes(&bad).is_err());
        let mut bad = good.clone();
        bad[4] = 9;
        assert!(IteratedBloomFilter::from_bytes(&bad).is_err());
        let mut bad = good.clone();
        bad.push(0);
        assert!(IteratedBloomFilter::from_bytes(&bad).is_err());
        assert!(IteratedBloomFilter::from_bytes(&[]).is_err());
    }
}
