use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec::Vec;

use super::{build_fibs, flood_adverts, AdjacencyAdvert, Advert, LinkStateDb, NodeId, PrefixAdvert, Topology};
use crate::fib::{decide, InterfaceFib, InterfaceId, MatchTable, TieBreak};
use crate::naming::iterate_chain;
use crate::{EncodedName, Error, FilterGeometry, HierarchicalName, Result};

/// What gets charged per hop on a link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TrafficMode {
    /// Packed positions of the encoded name.
    #[default]
    Encoded,
    /// Plain-text name at 8 bits per byte, separators excluded.
    Hierarchical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    /// Hops before an Interest is declared lost; `None` means twice the node count.
    pub hop_limit: Option<usize>,
    pub tie_break: TieBreak,
    pub traffic: TrafficMode,
    /// Keep the node sequence each Interest visited (unicast only).
    pub record_paths: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            hop_limit: None,
            tie_break: TieBreak::LowestId,
            traffic: TrafficMode::Encoded,
            record_paths: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome {
    /// Reached a node serving the name.
    Delivered,
    /// Left its source but ended somewhere else: a dead end reached through a
    /// false positive, or the hop limit.
    Misdelivered,
    /// No interface matched at the source.
    Dropped,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SimReport {
    pub injected: u64,
    pub delivered: u64,
    pub misdelivered: u64,
    pub dropped: u64,
    pub outcomes: Vec<Outcome>,
    /// Hops travelled by each Interest (by the delivering copy under multicast).
    pub hops: Vec<u32>,
    /// Name bits carried per directed link.
    pub link_bits: BTreeMap<(NodeId, NodeId), u64>,
    /// Visited nodes per Interest when paths are recorded.
    pub paths: Vec<Vec<NodeId>>,
}

impl SimReport {
    pub fn total_hops(&self) -> u64 {
        self.hops.iter().map(|&h| u64::from(h)).sum()
    }

    pub fn total_bits(&self) -> u64 {
        self.link_bits.values().sum()
    }

    fn record(&mut self, outcome: Outcome, hops: u32) {
        self.injected += 1;
        match outcome {
            Outcome::Delivered => self.delivered += 1,
            Outcome::Misdelivered => self.misdelivered += 1,
            Outcome::Dropped => self.dropped += 1,
        }
        self.outcomes.push(outcome);
        self.hops.push(hops);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeState<T> {
    pub fibs: Vec<InterfaceFib<T>>,
    /// Names this node serves, as flat position vectors.
    pub local: BTreeSet<Vec<u64>>,
    pub unreachable: Vec<NodeId>,
}

impl<T> NodeState<T> {
    fn serves(&self, name: &EncodedName) -> bool {
        let k = name.positions().len() / name.level_count();
        (1..=name.level_count()).any(|l| self.local.contains(&name.positions()[..l * k]))
    }
}

/// A converged network: every node's tables built from its own database.
#[derive(Debug, Clone, PartialEq)]
pub struct Network<T> {
    topology: Topology,
    nodes: Vec<NodeState<T>>,
    wire: Option<FilterGeometry>,
}

impl<T: MatchTable> Network<T> {
    /// Advertises every node's links and registered names, floods them and
    /// builds all tables.
    pub fn build(topology: Topology, registrations: &[(NodeId, HierarchicalName)]) -> Result<Self> {
        let mut by_origin: BTreeMap<NodeId, Vec<EncodedName>> = BTreeMap::new();
        for (node, name) in registrations {
            if !topology.contains(*node) {
                return Err(Error::UnknownNode(node.0));
            }
            by_origin
                .entry(*node)
                .or_default()
                .push(iterate_chain(name, topology.geometry())?);
        }
        let mut adverts: Vec<Advert> = topology
            .nodes()
            .map(|u| {
                Advert::Adjacency(AdjacencyAdvert {
                    origin: u,
                    neighbors: topology.neighbors(u).to_vec(),
                    seq: 1,
                })
            })
            .collect();
        adverts.extend(by_origin.into_iter().map(|(origin, names)| {
            Advert::Prefix(PrefixAdvert {
                origin,
                names,
                seq: 1,
            })
        }));
        let flooding = flood_adverts(&topology, &adverts)?;
        Self::from_databases(topology, &flooding.databases)
    }

    /// Builds every node's tables from its converged database.
    pub fn from_databases(topology: Topology, databases: &[LinkStateDb]) -> Result<Self> {
        if databases.len() != topology.node_count() {
            return Err(Error::InvalidTopology("one database per node is required".into()));
        }
        let nodes = topology
            .nodes()
            .map(|u| {
                let built = build_fibs::<T>(u, &databases[u.0 as usize], &topology)?;
                let local = databases[u.0 as usize]
                    .prefixes
                    .get(&u)
                    .map(|p| p.names.iter().map(|n| n.positions().to_vec()).collect())
                    .unwrap_or_default();
                Ok(NodeState {
                    fibs: built.fibs,
                    local,
                    unreachable: built.unreachable,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Network {
            topology,
            nodes,
            wire: None,
        })
    }

    /// Charges encoded names as if they were packed for `geometry` instead of
    /// the table geometry. Lets exact-set runs report deployable traffic.
    pub fn with_wire_geometry(mut self, geometry: FilterGeometry) -> Self {
        self.wire = Some(geometry);
        self
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn node(&self, id: NodeId) -> &NodeState<T> {
        &self.nodes[id.0 as usize]
    }

    /// Forwards each Interest from its source and tallies the outcomes.
    pub fn run_interests(&self, interests: &[(NodeId, HierarchicalName)], config: &SimConfig) -> Result<SimReport> {
        let limit = config.hop_limit.unwrap_or(2 * self.topology.node_count());
        let mut report = SimReport::default();
        for (source, name) in interests {
            if !self.topology.contains(*source) {
                return Err(Error::UnknownNode(source.0));
            }
            let encoded = iterate_chain(name, self.topology.geometry())?;
            let bits = match config.traffic {
                TrafficMode::Encoded => self
                    .wire
                    .as_ref()
                    .unwrap_or(self.topology.geometry())
                    .name_bits(encoded.level_count()),
                TrafficMode::Hierarchical => 8 * name.byte_len() as u64,
            };
            match config.tie_break {
                TieBreak::LowestId => {
                    let (outcome, hops, path) = self.unicast(*source, &encoded, bits, limit, &mut report)?;
                    report.record(outcome, hops);
                    if config.record_paths {
                        report.paths.push(path);
                    }
                }
                TieBreak::Multicast => {
                    let (outcome, hops) = self.multicast(*source, &encoded, bits, limit, &mut report)?;
                    report.record(outcome, hops);
                    if config.record_paths {
                        report.paths.push(Vec::new());
                    }
                }
            }
        }
        Ok(report)
    }

    fn step(
        &self,
        node: NodeId,
        iface: InterfaceId,
        bits: u64,
        report: &mut SimReport,
    ) -> (NodeId, Option<InterfaceId>) {
        let next = self
            .topology
            .neighbor_on(node, iface)
            .expect("tables only exist for physical interfaces");
        *report.link_bits.entry((node, next)).or_insert(0) += bits;
        (next, self.topology.interface_to(next, node))
    }

    fn unicast(
        &self,
        source: NodeId,
        name: &EncodedName,
        bits: u64,
        limit: usize,
        report: &mut SimReport,
    ) -> Result<(Outcome, u32, Vec<NodeId>)> {
        let mut node = source;
        let mut inbound = None;
        let mut hops = 0u32;
        let mut path = alloc::vec![source];
        loop {
            let state = &self.nodes[node.0 as usize];
            if state.serves(name) {
                return Ok((Outcome::Delivered, hops, path));
            }
            if hops as usize >= limit {
                return Ok((Outcome::Misdelivered, hops, path));
            }
            let decision = decide(&state.fibs, name, inbound)?;
            let Some(iface) = decision.chosen else {
                let outcome = if hops == 0 { Outcome::Dropped } else { Outcome::Misdelivered };
                return Ok((outcome, hops, path));
            };
            (node, inbound) = self.step(node, iface, bits, report);
            hops += 1;
            path.push(node);
        }
    }

    fn multicast(
        &self,
        source: NodeId,
        name: &EncodedName,
        bits: u64,
        limit: usize,
        report: &mut SimReport,
    ) -> Result<(Outcome, u32)> {
        let mut queue = VecDeque::from([(source, None, 0u32)]);
        let mut delivered_at: Option<u32> = None;
        let mut max_hops = 0;
        while let Some((node, inbound, hops)) = queue.pop_front() {
            max_hops = max_hops.max(hops);
            let state = &self.nodes[node.0 as usize];
            if state.serves(name) {
                delivered_at = Some(delivered_at.map_or(hops, |h| h.min(hops)));
                continue;
            }
            if hops as usize >= limit {
                continue;
            }
            let decision = decide(&state.fibs, name, inbound)?;
            for &iface in decision.targets(TieBreak::Multicast) {
                let (next, back) = self.step(node, iface, bits, report);
                queue.push_back((next, back, hops + 1));
            }
        }
        Ok(match delivered_at {
            Some(h) => (Outcome::Delivered, h),
            None if max_hops == 0 => (Outcome::Dropped, 0),
            None => (Outcome::Misdelivered, max_hops),
        })
    }
}
