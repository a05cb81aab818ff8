use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::fib::InterfaceId;
use crate::{Error, FilterGeometry, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Undirected link with a non-negative integer cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Link {
    pub a: NodeId,
    pub b: NodeId,
    pub cost: u64,
}

/// Nodes, links and the filter geometry every node uses.
///
/// A node's interfaces are numbered from 1 in ascending neighbor order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    geometry: FilterGeometry,
    labels: Vec<String>,
    links: Vec<Link>,
    adjacency: Vec<Vec<(NodeId, u64)>>,
}

impl Topology {
    pub fn new(geometry: FilterGeometry, labels: Vec<String>, links: Vec<Link>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidTopology("no nodes".into()));
        }
        let unique: BTreeSet<&str> = labels.iter().map(String::as_str).collect();
        if unique.len() != labels.len() {
            return Err(Error::InvalidTopology("duplicate node label".into()));
        }
        let n = labels.len() as u32;
        let mut adjacency = alloc::vec![Vec::new(); labels.len()];
        let mut seen = BTreeSet::new();
        for l in &links {
            if l.a.0 >= n {
                return Err(Error::UnknownNode(l.a.0));
            }
            if l.b.0 >= n {
                return Err(Error::UnknownNode(l.b.0));
            }
            if l.a == l.b {
                return Err(Error::InvalidTopology(alloc::format!("self-loop at node {}", l.a)));
            }
            if !seen.insert((l.a.min(l.b), l.a.max(l.b))) {
                return Err(Error::InvalidTopology(alloc::format!(
                    "duplicate link {}-{}",
                    l.a,
                    l.b
                )));
            }
            adjacency[l.a.0 as usize].push((l.b, l.cost));
            adjacency[l.b.0 as usize].push((l.a, l.cost));
        }
        for a in &mut adjacency {
            a.sort_unstable();
        }
        Ok(Topology {
            geometry,
            labels,
            links,
            adjacency,
        })
    }

    pub fn geometry(&self) -> &FilterGeometry {
        &self.geometry
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.labels.len() as u32).map(NodeId)
    }

    pub fn label(&self, node: NodeId) -> &str {
        &self.labels[node.0 as usize]
    }

    pub fn node_by_label(&self, label: &str) -> Option<NodeId> {
        self.labels.iter().position(|l| l == label).map(|i| NodeId(i as u32))
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn contains(&self, node: NodeId) -> bool {
        (node.0 as usize) < self.labels.len()
    }

    /// Neighbors of `node` with link costs, ascending by neighbor id.
    pub fn neighbors(&self, node: NodeId) -> &[(NodeId, u64)] {
        &self.adjacency[node.0 as usize]
    }

    pub fn interface_to(&self, node: NodeId, neighbor: NodeId) -> Option<InterfaceId> {
        self.neighbors(node)
            .iter()
            .position(|&(v, _)| v == neighbor)
            .map(|i| InterfaceId(i as u32 + 1))
    }

    pub fn neighbor_on(&self, node: NodeId, iface: InterfaceId) -> Option<NodeId> {
        let i = iface.0.checked_sub(1)? as usize;
        self.neighbors(node).get(i).map(|&(v, _)| v)
    }

    pub fn interfaces(&self, node: NodeId) -> impl Iterator<Item = InterfaceId> {
        (1..=self.neighbors(node).len() as u32).map(InterfaceId)
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = alloc::vec![false; self.node_count()];
        let mut stack = alloc::vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &(v, _) in &self.adjacency[u] {
                if !seen[v.0 as usize] {
                    seen[v.0 as usize] = true;
                    stack.push(v.0 as usize);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    fn geo() -> FilterGeometry {
        FilterGeometry::uniform(2, 1024, 1).unwrap()
    }

    fn link(a: u32, b: u32, cost: u64) -> Link {
        Link {
            a: NodeId(a),
            b: NodeId(b),
            cost,
        }
    }

    #[test]
    fn interfaces_follow_neighbor_order() {
        let t = Topology::new(geo(), labels(4), vec![link(2, 3, 1), link(2, 0, 5), link(1, 2, 1)]).unwrap();
        assert_eq!(t.interface_to(NodeId(2), NodeId(0)), Some(InterfaceId(1)));
        assert_eq!(t.interface_to(NodeId(2), NodeId(3)), Some(InterfaceId(3)));
        assert_eq!(t.neighbor_on(NodeId(2), InterfaceId(2)), Some(NodeId(1)));
        assert_eq!(t.neighbor_on(NodeId(2), InterfaceId(0)), None);
        assert!(t.is_connected());
    }

    #[test]
    fn rejects_invalid_links() {
        assert!(Topology::new(geo(), labels(2), vec![link(0, 0, 1)]).is_err());
        assert!(Topology::new(geo(), labels(2), vec![link(0, 2, 1)]).is_err());
        assert!(Topology::new(geo(), labels(2), vec![link(0, 1, 1), link(1, 0, 2)]).is_err());
        assert!(Topology::new(geo(), vec!["a".into(), "a".into()], vec![]).is_err());
        assert!(Topology::new(geo(), vec![], vec![]).is_err());
    }

    #[test]
    fn connectivity() {
        let t = Topology::new(geo(), labels(3), vec![link(0, 1, 1)]).unwrap();
        assert!(!t.is_connected());
    }
}
