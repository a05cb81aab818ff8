use alloc::format;
use alloc::vec::Vec;

use super::bits::{BitArray, Nibbles};
use crate::{EncodedName, Error, FilterGeometry, Result};

/// Largest value a position counter reaches; saturated counters never decrement.
pub const COUNTER_MAX: u8 = Nibbles::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Segment {
    pub(crate) bits: BitArray,
    pub(crate) counters: Option<Nibbles>,
    pub(crate) inserted: u64,
}

impl Segment {
    fn new(m: u64, counting: bool) -> Self {
        Segment {
            bits: BitArray::zeroed(m),
            counters: counting.then(|| Nibbles::zeroed(m)),
            inserted: 0,
        }
    }

    fn contains(&self, positions: &[u64]) -> bool {
        positions.iter().all(|&i| self.bits.get(i))
    }

    fn add(&mut self, positions: &[u64]) {
        for &i in positions {
            self.bits.set(i);
            if let Some(c) = self.counters.as_mut() {
                c.increment(i);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Level {
    /// Individual filters at this level; more than one once the first overflowed.
    pub(crate) chain: Vec<Segment>,
    /// Distinct inserts a segment accepts before a new one is appended.
    pub(crate) capacity: Option<u64>,
}

impl Level {
    fn contains(&self, positions: &[u64]) -> bool {
        self.chain.iter().any(|s| s.contains(positions))
    }

    fn distinct(&self) -> u64 {
        self.chain.iter().map(|s| s.inserted).sum()
    }
}

/// A stack of `d` individual Bloom filters, one per name level.
///
/// Level `x` receives the positions of the `x`-th iterated hash of a name.
/// A query reports how many consecutive levels, starting at the first, hold
/// every queried position.
///
/// When a per-level capacity is configured, a level whose active filter has
/// accepted that many distinct elements grows a fresh filter; queries match a
/// level when any filter in its chain matches. Optional 4-bit counters allow
/// deletion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IteratedBloomFilter {
    geometry: FilterGeometry,
    pub(crate) levels: Vec<Level>,
    counting: bool,
}

impl IteratedBloomFilter {
    pub fn new(geometry: FilterGeometry) -> Self {
        Self::build(geometry, false)
    }

    /// Filter with a saturating counter behind every bit, enabling [`delete`](Self::delete).
    pub fn with_counters(geometry: FilterGeometry) -> Self {
        Self::build(geometry, true)
    }

    fn build(geometry: FilterGeometry, counting: bool) -> Self {
        let levels = geometry
            .level_sizes()
            .iter()
            .map(|&m| Level {
                chain: alloc::vec![Segment::new(m, counting)],
                capacity: None,
            })
            .collect();
        IteratedBloomFilter {
            geometry,
            levels,
            counting,
        }
    }

    pub(crate) fn from_parts(geometry: FilterGeometry, levels: Vec<Level>, counting: bool) -> Self {
        IteratedBloomFilter {
            geometry,
            levels,
            counting,
        }
    }

    /// Enables growth: once the active filter of level `x` holds
    /// `capacities[x]` distinct elements, further elements go to a new one.
    pub fn with_capacities(mut self, capacities: &[u64]) -> Result<Self> {
        if capacities.len() != self.levels.len() {
            return Err(Error::GeometryMismatch(format!(
                "{} capacities for {} levels",
                capacities.len(),
                self.levels.len()
            )));
        }
        if capacities.contains(&0) {
            return Err(Error::invalid("capacity", "must be positive"));
        }
        for (level, &c) in self.levels.iter_mut().zip(capacities) {
            level.capacity = Some(c);
        }
        Ok(self)
    }

    pub fn geometry(&self) -> &FilterGeometry {
        &self.geometry
    }

    pub fn is_counting(&self) -> bool {
        self.counting
    }

    pub fn capacity(&self, level: usize) -> Option<u64> {
        self.levels[level].capacity
    }

    /// Number of individual filters chained at `level`.
    pub fn chain_len(&self, level: usize) -> usize {
        self.levels[level].chain.len()
    }

    /// Distinct elements inserted at `level` (an element whose positions were
    /// already all set counts as a repetition).
    pub fn distinct_inserts(&self, level: usize) -> u64 {
        self.levels[level].distinct()
    }

    /// Set bits at `level`, summed over its chain.
    pub fn ones(&self, level: usize) -> u64 {
        self.levels[level].chain.iter().map(|s| s.bits.count_ones()).sum()
    }

    fn check_positions(&self, level: usize, positions: &[u64]) -> Result<()> {
        if level >= self.levels.len() {
            return Err(Error::GeometryMismatch(format!(
                "level {level} beyond depth {}",
                self.levels.len()
            )));
        }
        if positions.len() != self.geometry.hashes() as usize {
            return Err(Error::GeometryMismatch(format!(
                "{} positions for {} hashes",
                positions.len(),
                self.geometry.hashes()
            )));
        }
        let m = self.geometry.level_size(level);
        if let Some(p) = positions.iter().find(|&&p| p >= m) {
            return Err(Error::GeometryMismatch(format!(
                "position {p} out of range at level {level} (size {m})"
            )));
        }
        Ok(())
    }

    fn check_name(&self, name: &EncodedName) -> Result<()> {
        if name.geometry_id() != self.geometry.fingerprint() {
            return Err(Error::GeometryMismatch("name was encoded for another geometry".into()));
        }
        if name.level_count() > self.levels.len() {
            return Err(Error::GeometryMismatch(format!(
                "name has {} levels, filter {}",
                name.level_count(),
                self.levels.len()
            )));
        }
        Ok(())
    }

    /// Inserts `positions` at one level. Returns `true` if the element was new.
    pub fn insert_level(&mut self, level: usize, positions: &[u64]) -> Result<bool> {
        self.check_positions(level, positions)?;
        let counting = self.counting;
        let m = self.geometry.level_size(level);
        let lvl = &mut self.levels[level];
        if let Some(seg) = lvl.chain.iter_mut().rev().find(|s| s.contains(positions)) {
            if let Some(c) = seg.counters.as_mut() {
                positions.iter().for_each(|&i| c.increment(i));
            }
            return Ok(false);
        }
        let full = lvl
            .capacity
            .is_some_and(|cap| lvl.chain.last().is_some_and(|s| s.inserted >= cap));
        if full {
            lvl.chain.push(Segment::new(m, counting));
        }
        let active = lvl.chain.last_mut().expect("a level always has one segment");
        active.add(positions);
        active.inserted += 1;
        Ok(true)
    }

    pub fn level_contains(&self, level: usize, positions: &[u64]) -> Result<bool> {
        self.check_positions(level, positions)?;
        Ok(self.levels[level].contains(positions))
    }

    /// Inserts every level of `name`.
    pub fn insert(&mut self, name: &EncodedName) -> Result<()> {
        self.check_name(name)?;
        for (x, positions) in name.levels().enumerate() {
            self.insert_level(x, positions)?;
        }
        Ok(())
    }

    /// Match depth of `name`: the largest `L` such that levels `0..L` all
    /// contain the name's positions.
    pub fn query(&self, name: &EncodedName) -> Result<usize> {
        self.check_name(name)?;
        self.query_levels(name.levels())
    }

    /// Match depth for raw per-level positions.
    pub fn query_levels<'a, I>(&self, levels: I) -> Result<usize>
    where
        I: IntoIterator<Item = &'a [u64]>,
    {
        let mut depth = 0;
        for (x, positions) in levels.into_iter().enumerate() {
            if !self.level_contains(x, positions)? {
                break;
            }
            depth += 1;
        }
        Ok(depth)
    }

    /// Removes one insertion of `name`. Requires counters and that every
    /// level of the name is currently present.
    pub fn delete(&mut self, name: &EncodedName) -> Result<()> {
        if !self.counting {
            return Err(Error::CountersDisabled);
        }
        self.check_name(name)?;
        let mut targets = Vec::with_capacity(name.level_count());
        for (x, positions) in name.levels().enumerate() {
            let seg = self.levels[x]
                .chain
                .iter()
                .rposition(|s| s.contains(positions))
                .ok_or(Error::NotPresent)?;
            targets.push(seg);
        }
        for ((x, positions), seg) in name.levels().enumerate().zip(targets) {
            let segment = &mut self.levels[x].chain[seg];
            let counters = segment.counters.as_mut().expect("counting filter");
            for &i in positions {
                if counters.decrement(i) == 0 {
                    segment.bits.clear(i);
                }
            }
            if !segment.contains(positions) {
                segment.inserted = segment.inserted.saturating_sub(1);
            }
        }
        Ok(())
    }

    /// Bitwise OR of `other` into `self`, segment by segment.
    pub fn union_with(&mut self, other: &IteratedBloomFilter) -> Result<()> {
        if self.geometry != other.geometry {
            return Err(Error::GeometryMismatch("cannot merge different geometries".into()));
        }
        for (mine, theirs) in self.levels.iter_mut().zip(&other.levels) {
            for (x, seg) in theirs.chain.iter().enumerate() {
                if x >= mine.chain.len() {
                    mine.chain.push(seg.clone());
                    continue;
                }
                let target = &mut mine.chain[x];
                target.bits.or_assign(&seg.bits);
                if let (Some(c), Some(o)) = (target.counters.as_mut(), seg.counters.as_ref()) {
                    c.add_saturating(o);
                }
                target.inserted += seg.inserted;
            }
        }
        Ok(())
    }
}
