use alloc::collections::{BinaryHeap, BTreeMap};
use alloc::vec::Vec;
use core::cmp::Reverse;

use super::{LinkStateDb, NodeId, Topology};
use crate::fib::{InterfaceFib, MatchTable};
use crate::{Error, Result};

/// Path length compared by cost, then by hop count. Preferring fewer hops
/// among equal-cost paths keeps hop-by-hop forwarding loop-free even over
/// zero-cost links.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PathMetric {
    pub cost: u64,
    pub hops: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortestPaths {
    pub source: NodeId,
    pub metric: Vec<Option<PathMetric>>,
    /// Lowest-id neighbor of `source` that starts some shortest path.
    pub first_hop: Vec<Option<NodeId>>,
}

/// Directed edges confirmed by both endpoints' adjacency adverts, with the
/// cost the tail advertised.
fn graph(db: &LinkStateDb, nodes: usize) -> Vec<Vec<(NodeId, u64)>> {
    let mut g = alloc::vec![Vec::new(); nodes];
    for (u, adv) in &db.adjacency {
        if u.0 as usize >= nodes {
            continue;
        }
        for &(v, cost) in &adv.neighbors {
            let back = db
                .adjacency
                .get(&v)
                .is_some_and(|a| a.neighbors.iter().any(|&(w, _)| w == *u));
            if back && (v.0 as usize) < nodes {
                g[u.0 as usize].push((v, cost));
            }
        }
    }
    g
}

/// Dijkstra from `source` over the adjacencies in `db`.
pub fn shortest_paths(source: NodeId, db: &LinkStateDb, nodes: usize) -> ShortestPaths {
    let g = graph(db, nodes);
    let mut metric: Vec<Option<PathMetric>> = alloc::vec![None; nodes];
    let mut first_hop: Vec<Option<NodeId>> = alloc::vec![None; nodes];
    let mut done = alloc::vec![false; nodes];
    let mut heap = BinaryHeap::new();
    metric[source.0 as usize] = Some(PathMetric { cost: 0, hops: 0 });
    heap.push(Reverse((PathMetric { cost: 0, hops: 0 }, source)));
    while let Some(Reverse((m, u))) = heap.pop() {
        let ui = u.0 as usize;
        if done[ui] {
            continue;
        }
        done[ui] = true;
        for &(v, cost) in &g[ui] {
            let vi = v.0 as usize;
            if done[vi] {
                continue;
            }
            let cand = PathMetric {
                cost: m.cost.saturating_add(cost),
                hops: m.hops + 1,
            };
            let hop = if u == source { v } else { first_hop[ui].expect("settled node has a first hop") };
            match metric[vi] {
                Some(old) if old < cand => {}
                Some(old) if old == cand => {
                    if first_hop[vi].is_none_or(|h| hop < h) {
                        first_hop[vi] = Some(hop);
                    }
                }
                _ => {
                    metric[vi] = Some(cand);
                    first_hop[vi] = Some(hop);
                    heap.push(Reverse((cand, v)));
                }
            }
        }
    }
    ShortestPaths {
        source,
        metric,
        first_hop,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuiltFibs<T> {
    pub fibs: Vec<InterfaceFib<T>>,
    /// Origins with prefix adverts but no path; their names were left out.
    pub unreachable: Vec<NodeId>,
    /// First hop chosen for every reachable remote origin.
    pub next_hop: BTreeMap<NodeId, NodeId>,
}

/// Builds `node`'s per-interface tables: every name advertised by a remote
/// origin is ORed into the table of the interface leading to the origin's
/// shortest-path first hop.
pub fn build_fibs<T: MatchTable>(node: NodeId, db: &LinkStateDb, topology: &Topology) -> Result<BuiltFibs<T>> {
    if !topology.contains(node) {
        return Err(Error::UnknownNode(node.0));
    }
    let geometry = topology.geometry();
    let mut fibs: Vec<InterfaceFib<T>> = topology
        .interfaces(node)
        .map(|i| InterfaceFib::new(i, geometry))
        .collect();
    let paths = shortest_paths(node, db, topology.node_count());
    let mut unreachable = Vec::new();
    let mut next_hop = BTreeMap::new();
    for (origin, advert) in &db.prefixes {
        if *origin == node {
            continue;
        }
        let Some(hop) = paths.first_hop.get(origin.0 as usize).copied().flatten() else {
            unreachable.push(*origin);
            continue;
        };
        let iface = topology.interface_to(node, hop).ok_or_else(|| {
            Error::InvalidTopology(alloc::format!("database link {node}-{hop} is not a physical link"))
        })?;
        next_hop.insert(*origin, hop);
        let fib = &mut fibs[iface.0 as usize - 1];
        for name in &advert.names {
            fib.register(name)?;
        }
    }
    Ok(BuiltFibs {
        fibs,
        unreachable,
        next_hop,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::routing::{flood_adverts, AdjacencyAdvert, Advert, Link, PrefixAdvert};
    use crate::{iterate_chain_for_tests as enc, FilterGeometry, IteratedBloomFilter};
    use alloc::string::ToString;
    use alloc::vec;

    fn topo(n: u32, links: &[(u32, u32, u64)]) -> Topology {
        Topology::new(
            FilterGeometry::uniform(3, 1 << 12, 1).unwrap(),
            (0..n).map(|i| i.to_string()).collect(),
            links
                .iter()
                .map(|&(a, b, cost)| Link {
                    a: NodeId(a),
                    b: NodeId(b),
                    cost,
                })
                .collect(),
        )
        .unwrap()
    }

    fn adjacency(t: &Topology) -> Vec<Advert> {
        t.nodes()
            .map(|u| {
                Advert::Adjacency(AdjacencyAdvert {
                    origin: u,
                    neighbors: t.neighbors(u).to_vec(),
                    seq: 1,
                })
            })
            .collect()
    }

    #[test]
    fn equal_cost_paths_prefer_the_lowest_next_hop() {
        // 0 - 1 - 3 and 0 - 2 - 3, both cost 2
        let t = topo(4, &[(0, 2, 1), (0, 1, 1), (1, 3, 1), (2, 3, 1)]);
        let f = flood_adverts(&t, &adjacency(&t)).unwrap();
        let sp = shortest_paths(NodeId(0), &f.databases[0], 4);
        assert_eq!(sp.first_hop[3], Some(NodeId(1)));
        assert_eq!(sp.metric[3], Some(PathMetric { cost: 2, hops: 2 }));
    }

    #[test]
    fn zero_cost_ties_prefer_fewer_hops() {
        let t = topo(3, &[(0, 1, 0), (1, 2, 0), (0, 2, 0)]);
        let f = flood_adverts(&t, &adjacency(&t)).unwrap();
        let sp = shortest_paths(NodeId(0), &f.databases[0], 3);
        assert_eq!(sp.first_hop[2], Some(NodeId(2)));
    }

    #[test]
    fn one_sided_adjacency_is_ignored() {
        let t = topo(2, &[(0, 1, 1)]);
        let adverts = vec![Advert::Adjacency(AdjacencyAdvert {
            origin: NodeId(0),
            neighbors: vec![(NodeId(1), 1)],
            seq: 1,
        })];
        let f = flood_adverts(&t, &adverts).unwrap();
        let sp = shortest_paths(NodeId(0), &f.databases[0], 2);
        assert_eq!(sp.first_hop[1], None);
    }

    #[test]
    fn two_nodes_share_one_link_fib() {
        let t = topo(2, &[(0, 1, 3)]);
        let names: Vec<_> = ["a/b", "c", "d/e/f"].iter().map(|s| enc(s, t.geometry())).collect();
        let mut adverts = adjacency(&t);
        adverts.push(Advert::Prefix(PrefixAdvert {
            origin: NodeId(1),
            names: names.clone(),
            seq: 1,
        }));
        let f = flood_adverts(&t, &adverts).unwrap();
        let built = build_fibs::<IteratedBloomFilter>(NodeId(0), &f.databases[0], &t).unwrap();
        assert_eq!(built.fibs.len(), 1);
        for n in &names {
            assert_eq!(built.fibs[0].match_depth(n).unwrap(), n.level_count());
        }
        assert!(built.unreachable.is_empty());
    }

    #[test]
    fn unreachable_origins_are_flagged() {
        let t = topo(3, &[(0, 1, 1)]);
        let mut adverts = adjacency(&t);
        adverts.push(Advert::Prefix(PrefixAdvert {
            origin: NodeId(2),
            names: vec![enc("x", t.geometry())],
            seq: 1,
        }));
        let mut f = flood_adverts(&t, &adverts).unwrap();
        // node 2 is isolated, so inject its advert into node 0 directly
        f.databases[0].install(&adverts[3]);
        let built = build_fibs::<IteratedBloomFilter>(NodeId(0), &f.databases[0], &t).unwrap();
        assert_eq!(built.unreachable, vec![NodeId(2)]);
    }
}
