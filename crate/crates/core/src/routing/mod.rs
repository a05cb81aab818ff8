//! Deterministic link-state simulation of I(FIB)F forwarding.
//!
//! Nodes flood adjacency adverts and prefix adverts carrying encoded names
//! hop by hop in synchronous rounds. Each node then runs Dijkstra over its
//! database and ORs every remote name into the table of the first-hop
//! interface. Interests are encoded once at their source and forwarded by
//! largest match until they reach a node serving the name, hit a dead end, or
//! exceed the hop limit.

mod lsdb;
mod sim;
mod spf;
mod topology;

pub use lsdb::{flood_adverts, flood_into, AdjacencyAdvert, Advert, Flooding, LinkStateDb, PrefixAdvert};
pub use sim::{Network, Outcome, SimConfig, SimReport, TrafficMode};
pub use spf::{build_fibs, shortest_paths, BuiltFibs, PathMetric, ShortestPaths};
pub use topology::{Link, NodeId, Topology};
