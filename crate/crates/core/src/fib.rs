//! One forwarding table per interface and the largest-match decision.
//!
//! An arriving Interest carries an [`EncodedName`]. Every interface other than
//! the inbound one reports its match depth, and the interface with the largest
//! depth wins. Ties go to the lowest interface id unless multicast is
//! requested; depth zero everywhere means there is no route.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::{EncodedName, Error, FilterGeometry, IteratedBloomFilter, Result};

/// Interface number local to one node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InterfaceId(pub u32);

impl core::fmt::Display for InterfaceId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Per-interface membership structure answering match-depth queries.
pub trait MatchTable {
    fn empty(geometry: &FilterGeometry) -> Self;
    fn insert(&mut self, name: &EncodedName) -> Result<()>;
    fn match_depth(&self, name: &EncodedName) -> Result<usize>;
}

impl MatchTable for IteratedBloomFilter {
    fn empty(geometry: &FilterGeometry) -> Self {
        IteratedBloomFilter::new(geometry.clone())
    }

    fn insert(&mut self, name: &EncodedName) -> Result<()> {
        IteratedBloomFilter::insert(self, name)
    }

    fn match_depth(&self, name: &EncodedName) -> Result<usize> {
        self.query(name)
    }
}

/// Exact set of registered level prefixes; the false-positive-free reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactTable {
    geometry_id: u64,
    depth: usize,
    prefixes: BTreeSet<Vec<u64>>,
}

impl MatchTable for ExactTable {
    fn empty(geometry: &FilterGeometry) -> Self {
        ExactTable {
            geometry_id: geometry.fingerprint(),
            depth: geometry.depth(),
            prefixes: BTreeSet::new(),
        }
    }

    fn insert(&mut self, name: &EncodedName) -> Result<()> {
        self.check(name)?;
        let k = name.positions().len() / name.level_count();
        for len in 1..=name.level_count() {
            self.prefixes.insert(name.positions()[..len * k].to_vec());
        }
        Ok(())
    }

    fn match_depth(&self, name: &EncodedName) -> Result<usize> {
        self.check(name)?;
        let k = name.positions().len() / name.level_count();
        Ok((1..=name.level_count())
            .take_while(|&len| self.prefixes.contains(&name.positions()[..len * k]))
            .count())
    }
}

impl ExactTable {
    fn check(&self, name: &EncodedName) -> Result<()> {
        if name.geometry_id() != self.geometry_id || name.level_count() > self.depth {
            return Err(Error::GeometryMismatch("name does not fit this table".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceFib<T = IteratedBloomFilter> {
    pub id: InterfaceId,
    pub table: T,
}

impl<T: MatchTable> InterfaceFib<T> {
    pub fn new(id: InterfaceId, geometry: &FilterGeometry) -> Self {
        InterfaceFib {
            id,
            table: T::empty(geometry),
        }
    }

    /// Inserts every level of `name` into this interface's table.
    pub fn register(&mut self, name: &EncodedName) -> Result<()> {
        self.table.insert(name)
    }

    pub fn match_depth(&self, name: &EncodedName) -> Result<usize> {
        self.table.match_depth(name)
    }
}

/// What to do when several interfaces share the largest depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    LowestId,
    Multicast,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForwardingDecision {
    pub chosen: Option<InterfaceId>,
    /// Depth reported by every candidate interface.
    pub depths: BTreeMap<InterfaceId, usize>,
    /// Every interface at the largest depth (empty when `chosen` is `None`).
    pub tied: Vec<InterfaceId>,
    pub tie: bool,
}

impl ForwardingDecision {
    /// Interfaces the Interest leaves on under `policy`.
    pub fn targets(&self, policy: TieBreak) -> &[InterfaceId] {
        match (policy, self.chosen) {
            (_, None) => &[],
            (TieBreak::Multicast, Some(_)) => &self.tied,
            (TieBreak::LowestId, Some(_)) => &self.tied[..1],
        }
    }

    pub fn depth(&self) -> usize {
        self.chosen.map_or(0, |c| self.depths[&c])
    }
}

/// Picks the interface with the largest match for `name`, never `inbound`.
pub fn decide<T: MatchTable>(
    fibs: &[InterfaceFib<T>],
    name: &EncodedName,
    inbound: Option<InterfaceId>,
) -> Result<ForwardingDecision> {
    if let Some(i) = inbound {
        if !fibs.iter().any(|f| f.id == i) {
            return Err(Error::UnknownInterface(i.0));
        }
    }
    let mut depths = BTreeMap::new();
    for fib in fibs.iter().filter(|f| Some(f.id) != inbound) {
        depths.insert(fib.id, fib.match_depth(name)?);
    }
    let best = depths.values().copied().max().unwrap_or(0);
    let tied: Vec<InterfaceId> = if best == 0 {
        Vec::new()
    } else {
        depths.iter().filter(|(_, &d)| d == best).map(|(&i, _)| i).collect()
    };
    Ok(ForwardingDecision {
        chosen: tied.first().copied(),
        tie: tied.len() > 1,
        tied,
        depths,
    })
}

/// Serializes a node's tables: `u32` count, then per interface its `u32` id,
/// `u32` blob length and the filter blob, all little-endian.
pub fn dump(fibs: &[InterfaceFib<IteratedBloomFilter>]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&(fibs.len() as u32).to_le_bytes());
    for fib in fibs {
        let blob = fib.table.to_bytes();
        out.extend_from_slice(&fib.id.0.to_le_bytes());
        out.extend_from_slice(&(blob.len() as u32).to_le_bytes());
        out.extend_from_slice(&blob);
    }
    out
}

/// Inverse of [`dump`].
pub fn load(bytes: &[u8]) -> Result<Vec<InterfaceFib<IteratedBloomFilter>>> {
    fn u32_at(bytes: &[u8], pos: usize) -> Result<u32> {
        bytes
            .get(pos..pos + 4)
            .map(|b| u32::from_le_bytes(b.try_into().unwrap()))
            .ok_or_else(|| Error::Decode("truncated FIB dump".into()))
    }
    let count = u32_at(bytes, 0)?;
    let mut pos = 4;
    let mut out = Vec::new();
    for _ in 0..count {
        let id = u32_at(bytes, pos)?;
        let len = u32_at(bytes, pos + 4)? as usize;
        pos += 8;
        let blob = bytes
            .get(pos..pos + len)
            .ok_or_else(|| Error::Decode("truncated FIB dump".into()))?;
        out.push(InterfaceFib {
            id: InterfaceId(id),
            table: IteratedBloomFilter::from_bytes(blob)?,
        });
        pos += len;
    }
    if pos != bytes.len() {
        return Err(Error::Decode("trailing bytes after FIB dump".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::naming::iterate_chain;

    fn geo() -> FilterGeometry {
        FilterGeometry::uniform(4, 1 << 14, 1).unwrap()
    }

    fn enc(s: &str) -> EncodedName {
        iterate_chain(&s.parse().unwrap(), &geo()).unwrap()
    }

    fn node(n: u32) -> Vec<InterfaceFib> {
        (1..=n).map(|i| InterfaceFib::new(InterfaceId(i), &geo())).collect()
    }

    #[test]
    fn registered_name_wins() {
        let mut fibs = node(3);
        let name = enc("Cambridge/ComputerLab/FW01/Windows");
        fibs[1].register(&name).unwrap();
        let d = decide(&fibs, &name, Some(InterfaceId(1))).unwrap();
        assert_eq!(d.chosen, Some(InterfaceId(2)));
        assert_eq!(d.depth(), 4);
        assert!(!d.tie);
    }

    #[test]
    fn empty_tables_give_no_route() {
        let fibs = node(3);
        let d = decide(&fibs, &enc("a/b"), Some(InterfaceId(1))).unwrap();
        assert_eq!(d.chosen, None);
        assert!(d.targets(TieBreak::Multicast).is_empty());
        assert_eq!(d.depths.len(), 2);
    }

    #[test]
    fn largest_match_is_selected() {
        // node C: interface 2 knows only Cambridge, interface 3 knows Cambridge/ComputerLab/NetOS
        let mut fibs = node(3);
        fibs[1].register(&enc("Cambridge/Physics")).unwrap();
        fibs[2].register(&enc("Cambridge/ComputerLab/NetOS")).unwrap();
        let interest = enc("Cambridge/ComputerLab/NetOS/Windows");
        let d = decide(&fibs, &interest, Some(InterfaceId(1))).unwrap();
        assert_eq!(d.depths[&InterfaceId(2)], 1);
        assert_eq!(d.depths[&InterfaceId(3)], 3);
        assert_eq!(d.chosen, Some(InterfaceId(3)));
    }

    #[test]
    fn ties_go_to_the_lowest_id() {
        let mut fibs = node(4);
        fibs[3].register(&enc("a/b/x")).unwrap();
        fibs[2].register(&enc("a/b/y")).unwrap();
        let d = decide(&fibs, &enc("a/b/z"), Some(InterfaceId(1))).unwrap();
        assert!(d.tie);
        assert_eq!(d.chosen, Some(InterfaceId(3)));
        assert_eq!(d.targets(TieBreak::LowestId), &[InterfaceId(3)]);
        assert_eq!(d.targets(TieBreak::Multicast), &[InterfaceId(3), InterfaceId(4)]);
    }

    #[test]
    fn inbound_is_never_chosen() {
        let mut fibs = node(2);
        let name = enc("a/b");
        fibs[0].register(&name).unwrap();
        let d = decide(&fibs, &name, Some(InterfaceId(1))).unwrap();
        assert_eq!(d.chosen, None);
        assert!(!d.depths.contains_key(&InterfaceId(1)));
        assert_eq!(
            decide(&fibs, &name, Some(InterfaceId(9))).unwrap_err(),
            Error::UnknownInterface(9)
        );
    }

    #[test]
    fn exact_table_has_no_false_positives() {
        let mut t = ExactTable::empty(&geo());
        t.insert(&enc("a/b/c")).unwrap();
        assert_eq!(t.match_depth(&enc("a/b/c")).unwrap(), 3);
        assert_eq!(t.match_depth(&enc("a/b/c/d")).unwrap(), 3);
        assert_eq!(t.match_depth(&enc("a/q")).unwrap(), 1);
        assert_eq!(t.match_depth(&enc("q")).unwrap(), 0);
    }

    #[test]
    fn dump_round_trip() {
        let mut fibs = node(3);
        fibs[0].register(&enc("a/b")).unwrap();
        fibs[2].register(&enc("c")).unwrap();
        let bytes = dump(&fibs);
        assert_eq!(&bytes[..4], &3u32.to_le_bytes());
        assert_eq!(&bytes[4..8], &1u32.to_le_bytes());
        assert_eq!(load(&bytes).unwrap(), fibs);
        assert!(load(&bytes[..bytes.len() - 2]).is_err());
        assert!(load(&[1, 0, 0]).is_err());
    }
}
