//! Iterated Bloom filter forwarding tables (I(FIB)F) for name-based routing.
//!
//! The crate is `no_std` and only needs `alloc`. It contains:
//!
//! - [`filter`]: standard and iterated Bloom filter storage together with the
//!   parameter calculus used to design them (capacity, false-positive rate,
//!   repetition-aware shrinking and rehashing).
//! - [`naming`]: hierarchical names, the per-seed iterated hash chain that turns
//!   them into per-level bit positions, the compact wire form and the naming
//!   cost model.
//! - [`estimation`]: conjugate Gaussian estimation of per-level element counts
//!   from observed request streams, and filter sizing from those estimates.
//! - [`fib`]: one forwarding table per interface and the largest-match
//!   forwarding decision.
//! - [`routing`]: a deterministic link-state simulator that floods hashed
//!   prefix advertisements, builds FIBs by OR-ing names into the first-hop
//!   interface table, and forwards Interests hop by hop.
//!
//! File formats, experiments and the command-line tool live in the `ifibf`
//! companion crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
pub mod estimation;
pub mod fib;
pub mod filter;
pub(crate) mod math;
pub mod naming;
pub mod routing;

pub use error::{Error, Result};
pub use filter::{FilterGeometry, IteratedBloomFilter, LevelDesign, StandardBloomParams};
pub use naming::{EncodedName, HierarchicalName};

#[cfg(test)]
pub(crate) fn iterate_chain_for_tests(name: &str, geometry: &FilterGeometry) -> EncodedName {
    naming::iterate_chain(&name.parse().unwrap(), geometry).unwrap()
}
