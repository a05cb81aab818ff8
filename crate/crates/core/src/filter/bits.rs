use alloc::vec;
use alloc::vec::Vec;

/// Fixed-size bit array. Bit `i` lives in byte `i / 8`, bit `i % 8`, which is
/// also the serialized layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct BitArray {
    len: u64,
    bytes: Vec<u8>,
}

impl BitArray {
    pub fn zeroed(len: u64) -> Self {
        BitArray {
            len,
            bytes: vec![0; byte_len(len)],
        }
    }

    pub fn from_bytes(len: u64, bytes: Vec<u8>) -> Option<Self> {
        if bytes.len() != byte_len(len) {
            return None;
        }
        // padding bits past `len` must be clear
        let tail = len % 8;
        if tail != 0 && bytes.last().is_some_and(|b| b >> tail != 0) {
            return None;
        }
        Some(BitArray { len, bytes })
    }

    #[inline]
    pub fn get(&self, i: u64) -> bool {
        self.bytes[(i / 8) as usize] & (1 << (i % 8)) != 0
    }

    #[inline]
    pub fn set(&mut self, i: u64) {
        self.bytes[(i / 8) as usize] |= 1 << (i % 8);
    }

    #[inline]
    pub fn clear(&mut self, i: u64) {
        self.bytes[(i / 8) as usize] &= !(1 << (i % 8));
    }

    pub fn or_assign(&mut self, other: &BitArray) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.bytes.iter_mut().zip(&other.bytes) {
            *a |= b;
        }
    }

    pub fn count_ones(&self) -> u64 {
        self.bytes.iter().map(|b| u64::from(b.count_ones())).sum()
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }
}

pub(crate) fn byte_len(bits: u64) -> usize {
    bits.div_ceil(8) as usize
}

/// Saturating 4-bit counters, two per byte (low nibble first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Nibbles {
    bytes: Vec<u8>,
}

impl Nibbles {
    pub const MAX: u8 = 15;

    pub fn zeroed(len: u64) -> Self {
        Nibbles {
            bytes: vec![0; len.div_ceil(2) as usize],
        }
    }

    pub fn from_bytes(len: u64, bytes: Vec<u8>) -> Option<Self> {
        (bytes.len() == len.div_ceil(2) as usize).then_some(Nibbles { bytes })
    }

    #[inline]
    pub fn get(&self, i: u64) -> u8 {
        let b = self.bytes[(i / 2) as usize];
        if i.is_multiple_of(2) {
            b & 0x0f
        } else {
            b >> 4
        }
    }

    fn put(&mut self, i: u64, v: u8) {
        let b = &mut self.bytes[(i / 2) as usize];
        if i.is_multiple_of(2) {
            *b = (*b & 0xf0) | v;
        } else {
            *b = (*b & 0x0f) | (v << 4);
        }
    }

    pub fn increment(&mut self, i: u64) {
        let v = self.get(i);
        if v < Self::MAX {
            self.put(i, v + 1);
        }
    }

    /// Decrements unless saturated; returns the new value.
    pub fn decrement(&mut self, i: u64) -> u8 {
        let v = self.get(i);
        if v == 0 || v == Self::MAX {
            return v;
        }
        self.put(i, v - 1);
        v - 1
    }

    pub fn add_saturating(&mut self, other: &Nibbles) {
        for (a, b) in self.bytes.iter_mut().zip(&other.bytes) {
            let lo = ((*a & 0x0f) + (b & 0x0f)).min(Self::MAX);
            let hi = ((*a >> 4) + (b >> 4)).min(Self::MAX);
            *a = lo | (hi << 4);
        }
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }
}
