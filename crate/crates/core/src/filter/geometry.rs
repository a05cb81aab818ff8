use alloc::vec::Vec;

use crate::math::address_bits;
use crate::{Error, Result};

/// Shape of an iterated filter shared by every node of a network.
///
/// Positions are computed once at the source and carried on the wire, so two
/// nodes only understand each other when their geometries are identical.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FilterGeometry {
    m_ind: Vec<u64>,
    k_i: u32,
    seeds: Vec<u64>,
    b_ind: Vec<u32>,
}

impl FilterGeometry {
    pub fn new(m_ind: Vec<u64>, k_i: u32, seeds: Vec<u64>) -> Result<Self> {
        if m_ind.is_empty() {
            return Err(Error::invalid("d", "at least one level is required"));
        }
        if let Some(m) = m_ind.iter().find(|&&m| m < 2) {
            return Err(Error::invalid("m_ind", alloc::format!("level size {m} is below 2")));
        }
        if k_i == 0 {
            return Err(Error::invalid("k_i", "at least one hash per level is required"));
        }
        if seeds.len() != k_i as usize {
            return Err(Error::invalid(
                "seeds",
                alloc::format!("expected {k_i} seeds, got {}", seeds.len()),
            ));
        }
        let mut sorted = seeds.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("seeds", "seeds must be distinct"));
        }
        let b_ind = m_ind.iter().map(|&m| address_bits(m)).collect();
        Ok(FilterGeometry {
            m_ind,
            k_i,
            seeds,
            b_ind,
        })
    }

    /// Geometry whose seeds are `0..k_i`.
    pub fn with_default_seeds(m_ind: Vec<u64>, k_i: u32) -> Result<Self> {
        Self::new(m_ind, k_i, (0..u64::from(k_i)).collect())
    }

    /// `d` levels of `m_ind` bits each.
    pub fn uniform(d: usize, m_ind: u64, k_i: u32) -> Result<Self> {
        Self::with_default_seeds(alloc::vec![m_ind; d], k_i)
    }

    /// Number of levels `d`.
    pub fn depth(&self) -> usize {
        self.m_ind.len()
    }

    /// Hash functions per level.
    pub fn hashes(&self) -> u32 {
        self.k_i
    }

    pub fn seeds(&self) -> &[u64] {
        &self.seeds
    }

    pub fn level_sizes(&self) -> &[u64] {
        &self.m_ind
    }

    pub fn level_size(&self, level: usize) -> u64 {
        self.m_ind[level]
    }

    /// Address width of a position at `level`, `ceil(log2 m_ind)`.
    pub fn address_bits(&self, level: usize) -> u32 {
        self.b_ind[level]
    }

    /// Total bits across all levels.
    pub fn total_bits(&self) -> u64 {
        self.m_ind.iter().sum()
    }

    /// Wire payload of a name occupying the first `levels` levels.
    pub fn name_bits(&self, levels: usize) -> u64 {
        self.b_ind[..levels.min(self.depth())]
            .iter()
            .map(|&b| u64::from(b) * u64::from(self.k_i))
            .sum()
    }

    /// Stable identifier of this geometry carried by encoded names.
    pub fn fingerprint(&self) -> u64 {
        let mut buf = Vec::with_capacity(8 * (2 + self.m_ind.len() + self.seeds.len()));
        buf.extend_from_slice(&(self.m_ind.len() as u64).to_le_bytes());
        buf.extend_from_slice(&u64::from(self.k_i).to_le_bytes());
        for s in &self.seeds {
            buf.extend_from_slice(&s.to_le_bytes());
        }
        for m in &self.m_ind {
            buf.extend_from_slice(&m.to_le_bytes());
        }
        xxhash_rust::xxh64::xxh64(&buf, 0)
    }
}
