use alloc::vec::Vec;

use xxhash_rust::xxh64::xxh64;

use crate::{Error, FilterGeometry, HierarchicalName, Result};

/// Per-seed running digests of an iterated hash.
///
/// The first field is hashed on its own; every later field is hashed
/// together with the previous digest:
/// `h_j = H(seed, le_bytes(h_{j-1}) || "/" || field_j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainState {
    digests: Vec<u64>,
    seeds: Vec<u64>,
    absorbed: usize,
}

impl ChainState {
    pub fn start(seeds: &[u64], field: &str) -> Self {
        ChainState {
            digests: seeds.iter().map(|&s| xxh64(field.as_bytes(), s)).collect(),
            seeds: seeds.to_vec(),
            absorbed: 1,
        }
    }

    pub fn absorb(&mut self, field: &str) {
        let mut buf = Vec::with_capacity(9 + field.len());
        for (d, &s) in self.digests.iter_mut().zip(&self.seeds) {
            buf.clear();
            buf.extend_from_slice(&d.to_le_bytes());
            buf.push(b'/');
            buf.extend_from_slice(field.as_bytes());
            *d = xxh64(&buf, s);
        }
        self.absorbed += 1;
    }

    pub fn digests(&self) -> &[u64] {
        &self.digests
    }

    /// Fields absorbed so far.
    pub fn level(&self) -> usize {
        self.absorbed
    }
}

/// Positions of a name in a particular [`FilterGeometry`]: for each level,
/// one index per hash seed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EncodedName {
    geometry_id: u64,
    hashes: u32,
    positions: Vec<u64>,
}

impl EncodedName {
    /// Builds a name from explicit per-level positions, validating them
    /// against `geometry`.
    pub fn from_levels<L: AsRef<[u64]>>(geometry: &FilterGeometry, levels: &[L]) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::GeometryMismatch("a name needs at least one level".into()));
        }
        if levels.len() > geometry.depth() {
            return Err(Error::GeometryMismatch(alloc::format!(
                "{} levels exceed depth {}",
                levels.len(),
                geometry.depth()
            )));
        }
        let k = geometry.hashes() as usize;
        let mut positions = Vec::with_capacity(levels.len() * k);
        for (x, level) in levels.iter().enumerate() {
            let level = level.as_ref();
            if level.len() != k {
                return Err(Error::GeometryMismatch(alloc::format!(
                    "level {x} has {} positions, expected {k}",
                    level.len()
                )));
            }
            let m = geometry.level_size(x);
            if let Some(p) = level.iter().find(|&&p| p >= m) {
                return Err(Error::GeometryMismatch(alloc::format!(
                    "position {p} out of range at level {x}"
                )));
            }
            positions.extend_from_slice(level);
        }
        Ok(EncodedName {
            geometry_id: geometry.fingerprint(),
            hashes: geometry.hashes(),
            positions,
        })
    }

    pub fn geometry_id(&self) -> u64 {
        self.geometry_id
    }

    /// Levels `L` occupied by the name.
    pub fn level_count(&self) -> usize {
        self.positions.len() / self.hashes as usize
    }

    pub fn level(&self, x: usize) -> &[u64] {
        let k = self.hashes as usize;
        &self.positions[x * k..(x + 1) * k]
    }

    pub fn levels(&self) -> core::slice::ChunksExact<'_, u64> {
        self.positions.chunks_exact(self.hashes as usize)
    }

    /// All positions, level-major then seed-major.
    pub fn positions(&self) -> &[u64] {
        &self.positions
    }

    /// The first `len` levels.
    pub fn truncated(&self, len: usize) -> EncodedName {
        let len = len.clamp(1, self.level_count());
        EncodedName {
            geometry_id: self.geometry_id,
            hashes: self.hashes,
            positions: self.positions[..len * self.hashes as usize].to_vec(),
        }
    }
}

/// Encodes `name` for `geometry`.
///
/// Level `j` takes `digest_j mod m_ind[j]` for every seed. A name deeper than
/// the geometry keeps absorbing fields into the chain and the final digest
/// fills the last level.
pub fn iterate_chain(name: &HierarchicalName, geometry: &FilterGeometry) -> Result<EncodedName> {
    let fields = name.fields();
    let d = geometry.depth();
    let levels = fields.len().min(d);
    let mut positions = Vec::with_capacity(levels * geometry.hashes() as usize);
    let mut chain = ChainState::start(geometry.seeds(), &fields[0]);
    for x in 0..levels {
        if x > 0 {
            chain.absorb(&fields[x]);
        }
        if x + 1 == d {
            for field in &fields[d..] {
                chain.absorb(field);
            }
        }
        let m = geometry.level_size(x);
        positions.extend(chain.digests().iter().map(|h| h % m));
    }
    Ok(EncodedName {
        geometry_id: geometry.fingerprint(),
        hashes: geometry.hashes(),
        positions,
    })
}
