//! Compact wire form of an [`EncodedName`].
//!
//! Positions are packed level-major then seed-major, each in exactly
//! `b_ind[x]` bits, most significant bit first; the final byte is padded with
//! zero bits. There is no header: the receiver knows the geometry and infers
//! the level count from the byte length.

use alloc::vec::Vec;

use crate::{EncodedName, Error, FilterGeometry, Result};

struct BitWriter {
    bytes: Vec<u8>,
    used: u32,
}

impl BitWriter {
    fn push(&mut self, value: u64, width: u32) {
        for i in (0..width).rev() {
            if self.used.is_multiple_of(8) {
                self.bytes.push(0);
            }
            let bit = (value >> i) & 1;
            let last = self.bytes.last_mut().expect("pushed above");
            *last |= (bit as u8) << (7 - self.used % 8);
            self.used += 1;
        }
    }
}

struct BitReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl BitReader<'_> {
    fn read(&mut self, width: u32) -> Option<u64> {
        let mut v = 0u64;
        for _ in 0..width {
            let byte = *self.bytes.get(self.pos / 8)?;
            let bit = (byte >> (7 - self.pos % 8)) & 1;
            v = (v << 1) | u64::from(bit);
            self.pos += 1;
        }
        Some(v)
    }
}

/// Packs the positions of `name`. `geometry` must be the one the name was encoded for.
pub fn encode_wire(name: &EncodedName, geometry: &FilterGeometry) -> Result<Vec<u8>> {
    if name.geometry_id() != geometry.fingerprint() {
        return Err(Error::GeometryMismatch("name was encoded for another geometry".into()));
    }
    let mut w = BitWriter {
        bytes: Vec::with_capacity(wire_len(geometry, name.level_count())),
        used: 0,
    };
    for (x, level) in name.levels().enumerate() {
        let width = geometry.address_bits(x);
        for &p in level {
            w.push(p, width);
        }
    }
    Ok(w.bytes)
}

fn wire_len(geometry: &FilterGeometry, levels: usize) -> usize {
    geometry.name_bits(levels).div_ceil(8) as usize
}

/// Unpacks a name, inferring its level count from `bytes.len()`.
///
/// Fails when no level count, or more than one, produces that length. The
/// latter only happens for levels narrower than a byte; use
/// [`decode_wire_levels`] there.
pub fn decode_wire(bytes: &[u8], geometry: &FilterGeometry) -> Result<EncodedName> {
    if bytes.is_empty() {
        return Err(Error::Decode("empty input".into()));
    }
    let mut candidates = (1..=geometry.depth()).filter(|&l| wire_len(geometry, l) == bytes.len());
    let levels = match (candidates.next(), candidates.next()) {
        (Some(l), None) => l,
        (None, _) => {
            return Err(Error::Decode(alloc::format!(
                "{} bytes match no level count",
                bytes.len()
            )))
        }
        (Some(_), Some(_)) => {
            return Err(Error::Decode(alloc::format!(
                "{} bytes are ambiguous for this geometry",
                bytes.len()
            )))
        }
    };
    decode_wire_levels(bytes, geometry, levels)
}

/// Unpacks a name of exactly `levels` levels.
pub fn decode_wire_levels(bytes: &[u8], geometry: &FilterGeometry, levels: usize) -> Result<EncodedName> {
    if levels == 0 || levels > geometry.depth() {
        return Err(Error::Decode(alloc::format!("invalid level count {levels}")));
    }
    if bytes.len() != wire_len(geometry, levels) {
        return Err(Error::Decode(alloc::format!(
            "expected {} bytes, got {}",
            wire_len(geometry, levels),
            bytes.len()
        )));
    }
    let k = geometry.hashes() as usize;
    let mut r = BitReader { bytes, pos: 0 };
    let mut out: Vec<Vec<u64>> = Vec::with_capacity(levels);
    for x in 0..levels {
        let width = geometry.address_bits(x);
        let m = geometry.level_size(x);
        let mut level = Vec::with_capacity(k);
        for _ in 0..k {
            let p = r.read(width).ok_or_else(|| Error::Decode("truncated input".into()))?;
            if p >= m {
                return Err(Error::Decode(alloc::format!(
                    "position {p} out of range at level {x} (size {m})"
                )));
            }
            level.push(p);
        }
        out.push(level);
    }
    while let Some(bit) = r.read(1) {
        if bit != 0 {
            return Err(Error::Decode("non-zero padding".into()));
        }
    }
    EncodedName::from_levels(geometry, &out).map_err(|e| Error::Decode(alloc::format!("{e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::naming::iterate_chain;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn four_level_single_hash_name_is_eight_bytes() {
        let g = FilterGeometry::uniform(4, 32768, 1).unwrap();
        let n = iterate_chain(&"Cambridge/ComputerLab/FW01/Windows".parse().unwrap(), &g).unwrap();
        let wire = encode_wire(&n, &g).unwrap();
        assert_eq!(g.name_bits(4), 60);
        assert_eq!(wire.len(), 8);
        assert_eq!(wire[7] & 0x0f, 0, "four pad bits are zero");
        assert_eq!(decode_wire(&wire, &g).unwrap(), n);
    }

    #[test]
    fn bit_order_is_msb_first() {
        let g = FilterGeometry::uniform(2, 1 << 12, 1).unwrap();
        let n = EncodedName::from_levels(&g, &[[0xABCu64], [0x123]]).unwrap();
        assert_eq!(encode_wire(&n, &g).unwrap(), vec![0xAB, 0xC1, 0x23]);
    }

    #[test]
    fn decode_errors() {
        let g = FilterGeometry::uniform(4, 32768, 1).unwrap();
        assert!(decode_wire(&[], &g).is_err());
        assert!(decode_wire(&[0; 3], &g).is_err());
        assert!(decode_wire(&[0; 9], &g).is_err());
        assert!(decode_wire(&[0, 1], &g).is_err(), "dirty padding");
        let odd = FilterGeometry::uniform(1, 20000, 1).unwrap();
        assert!(decode_wire(&[0xff, 0xfc], &odd).is_err(), "position beyond m_ind");
        let tiny = FilterGeometry::uniform(2, 4, 1).unwrap();
        let n = EncodedName::from_levels(&tiny, &[[1u64], [2]]).unwrap();
        let wire = encode_wire(&n, &tiny).unwrap();
        assert!(decode_wire(&wire, &tiny).is_err(), "ambiguous");
        assert_eq!(decode_wire_levels(&wire, &tiny, 2).unwrap(), n);
    }

    fn geometry_and_name() -> impl Strategy<Value = (FilterGeometry, Vec<Vec<u64>>)> {
        (1usize..=6, 1u32..=4, 256u64..(1 << 40)).prop_flat_map(|(d, k, base)| {
            let sizes = proptest::collection::vec(base..base * 2, d);
            (sizes, Just(k), 1..=d)
        })
        .prop_flat_map(|(sizes, k, levels)| {
            let g = FilterGeometry::with_default_seeds(sizes.clone(), k).unwrap();
            let lv = sizes[..levels]
                .iter()
                .map(|&m| proptest::collection::vec(0..m, k as usize))
                .collect::<Vec<_>>();
            (Just(g), lv)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn wire_round_trip((g, levels) in geometry_and_name()) {
            let n = EncodedName::from_levels(&g, &levels).unwrap();
            let wire = encode_wire(&n, &g).unwrap();
            prop_assert_eq!(wire.len() as u64, g.name_bits(levels.len()).div_ceil(8));
            prop_assert_eq!(decode_wire(&wire, &g).unwrap(), n);
        }
    }
}
