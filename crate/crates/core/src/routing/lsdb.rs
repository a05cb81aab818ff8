use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{NodeId, Topology};
use crate::{EncodedName, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyAdvert {
    pub origin: NodeId,
    pub neighbors: Vec<(NodeId, u64)>,
    pub seq: u64,
}

/// Names registered at `origin`, bundled in one advert.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixAdvert {
    pub origin: NodeId,
    pub names: Vec<EncodedName>,
    pub seq: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Advert {
    Adjacency(AdjacencyAdvert),
    Prefix(PrefixAdvert),
}

impl Advert {
    pub fn origin(&self) -> NodeId {
        match self {
            Advert::Adjacency(a) => a.origin,
            Advert::Prefix(p) => p.origin,
        }
    }

    pub fn seq(&self) -> u64 {
        match self {
            Advert::Adjacency(a) => a.seq,
            Advert::Prefix(p) => p.seq,
        }
    }
}

/// Newest advert of each kind per origin.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinkStateDb {
    pub adjacency: BTreeMap<NodeId, AdjacencyAdvert>,
    pub prefixes: BTreeMap<NodeId, PrefixAdvert>,
}

impl LinkStateDb {
    /// Stores `advert` if it is newer than what is held for its origin.
    pub fn install(&mut self, advert: &Advert) -> bool {
        fn newer<T: Clone>(slot: &mut BTreeMap<NodeId, T>, origin: NodeId, seq: u64, held: impl Fn(&T) -> u64, new: &T) -> bool {
            match slot.get(&origin) {
                Some(old) if held(old) >= seq => false,
                _ => {
                    slot.insert(origin, new.clone());
                    true
                }
            }
        }
        match advert {
            Advert::Adjacency(a) => newer(&mut self.adjacency, a.origin, a.seq, |o| o.seq, a),
            Advert::Prefix(p) => newer(&mut self.prefixes, p.origin, p.seq, |o| o.seq, p),
        }
    }

    /// Number of adverts held.
    pub fn len(&self) -> usize {
        self.adjacency.len() + self.prefixes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flooding {
    pub databases: Vec<LinkStateDb>,
    /// Synchronous rounds in which some node learned something new.
    pub rounds: usize,
    /// Adverts sent over links, duplicates included.
    pub messages: u64,
}

/// Floods `adverts` from their origins into empty databases.
pub fn flood_adverts(topology: &Topology, adverts: &[Advert]) -> Result<Flooding> {
    let mut databases = alloc::vec![LinkStateDb::default(); topology.node_count()];
    let (rounds, messages) = flood_into(topology, &mut databases, adverts)?;
    Ok(Flooding {
        databases,
        rounds,
        messages,
    })
}

/// Floods `adverts` into existing databases. Each round every node forwards
/// what it learned in the previous round to all neighbors; a node drops
/// adverts it already holds at the same or a higher sequence number.
pub fn flood_into(topology: &Topology, databases: &mut [LinkStateDb], adverts: &[Advert]) -> Result<(usize, u64)> {
    if databases.len() != topology.node_count() {
        return Err(Error::InvalidTopology("one database per node is required".into()));
    }
    let mut pending: Vec<Vec<Advert>> = alloc::vec![Vec::new(); topology.node_count()];
    for a in adverts {
        let origin = a.origin();
        if !topology.contains(origin) {
            return Err(Error::UnknownNode(origin.0));
        }
        if databases[origin.0 as usize].install(a) {
            pending[origin.0 as usize].push(a.clone());
        }
    }
    let mut rounds = 0;
    let mut messages = 0;
    while pending.iter().any(|p| !p.is_empty()) {
        let mut next: Vec<Vec<Advert>> = alloc::vec![Vec::new(); topology.node_count()];
        let mut learned = false;
        for u in topology.nodes() {
            for a in &pending[u.0 as usize] {
                for &(v, _) in topology.neighbors(u) {
                    messages += 1;
                    if databases[v.0 as usize].install(a) {
                        next[v.0 as usize].push(a.clone());
                        learned = true;
                    }
                }
            }
        }
        if learned {
            rounds += 1;
        }
        pending = next;
    }
    Ok((rounds, messages))
}
