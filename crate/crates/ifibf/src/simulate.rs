//! End-to-end simulation runs over a topology file.

use ifibf_core::fib::{ExactTable, TieBreak};
use ifibf_core::routing::{Network, NodeId, Outcome, SimConfig, SimReport, TrafficMode};
use ifibf_core::{FilterGeometry, HierarchicalName, IteratedBloomFilter};
use rand::Rng;

use crate::formats::TopologyFile;
use crate::report::{Cell, Table};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SimulateOptions {
    /// Exact prefix sets instead of filters.
    pub oracle: bool,
    /// Charge plain-text names instead of encoded ones.
    pub hierarchical: bool,
    pub multicast: bool,
    pub hop_limit: Option<usize>,
}

/// Geometry whose positions never collide in practice; exact tables keyed
/// on it behave like sets of names.
pub fn oracle_geometry(depth: usize) -> Result<FilterGeometry> {
    Ok(FilterGeometry::with_default_seeds(vec![1 << 62; depth], 2)?)
}

pub fn run(file: &TopologyFile, interests: &[(NodeId, HierarchicalName)], opts: &SimulateOptions) -> Result<SimReport> {
    let config = SimConfig {
        hop_limit: opts.hop_limit,
        tie_break: if opts.multicast { TieBreak::Multicast } else { TieBreak::LowestId },
        traffic: if opts.hierarchical { TrafficMode::Hierarchical } else { TrafficMode::Encoded },
        record_paths: true,
    };
    let report = if opts.oracle {
        let geometry = file.topology.geometry().clone();
        let topology = ifibf_core::routing::Topology::new(
            oracle_geometry(geometry.depth())?,
            file.topology.nodes().map(|n| file.topology.label(n).to_owned()).collect(),
            file.topology.links().to_vec(),
        )?;
        Network::<ExactTable>::build(topology, &file.registrations)?
            .with_wire_geometry(geometry)
            .run_interests(interests, &config)?
    } else {
        Network::<IteratedBloomFilter>::build(file.topology.clone(), &file.registrations)?
            .run_interests(interests, &config)?
    };
    Ok(report)
}

/// `count` Interests from uniformly chosen sources. A fraction `foreign`
/// ask for fresh names nobody registered; the rest pick a registered name.
pub fn random_interests<R: Rng>(
    file: &TopologyFile,
    count: usize,
    foreign: f64,
    rng: &mut R,
) -> Vec<(NodeId, HierarchicalName)> {
    let nodes = file.topology.node_count() as u32;
    let depth = file.topology.geometry().depth();
    (0..count)
        .map(|_| {
            let source = NodeId(rng.random_range(0..nodes));
            let name = if file.registrations.is_empty() || rng.random_bool(foreign) {
                let fields: Vec<String> = (0..depth)
                    .map(|_| (0..8).map(|_| rng.random_range(b'a'..=b'z') as char).collect())
                    .collect();
                HierarchicalName::new(fields).expect("generated fields are valid")
            } else {
                file.registrations[rng.random_range(0..file.registrations.len())].1.clone()
            };
            (source, name)
        })
        .collect()
}

pub fn summary_table(report: &SimReport) -> Table {
    let mut t = Table::new(&[
        "injected",
        "delivered",
        "misdelivered",
        "dropped",
        "delivery_rate",
        "total_hops",
        "mean_hops",
        "total_bits",
    ]);
    let rate = |x: u64| if report.injected == 0 { 0.0 } else { x as f64 / report.injected as f64 };
    t.push(vec![
        report.injected.into(),
        report.delivered.into(),
        report.misdelivered.into(),
        report.dropped.into(),
        rate(report.delivered).into(),
        report.total_hops().into(),
        rate(report.total_hops()).into(),
        report.total_bits().into(),
    ]);
    t
}

fn outcome_label(o: Outcome) -> &'static str {
    match o {
        Outcome::Delivered => "delivered",
        Outcome::Misdelivered => "misdelivered",
        Outcome::Dropped => "dropped",
    }
}

/// One row per Interest; `path` lists node labels joined by `>`.
pub fn interest_table(file: &TopologyFile, interests: &[(NodeId, HierarchicalName)], report: &SimReport) -> Table {
    let t_ = &file.topology;
    let mut t = Table::new(&["index", "source", "name", "outcome", "hops", "path"]);
    for (i, (src, name)) in interests.iter().enumerate() {
        let path = report.paths.get(i).map(|p| {
            p.iter().map(|n| t_.label(*n)).collect::<Vec<_>>().join(">")
        });
        t.push(vec![
            i.into(),
            t_.label(*src).into(),
            format!("/{name}").into(),
            outcome_label(report.outcomes[i]).into(),
            report.hops[i].into(),
            path.filter(|p| !p.is_empty()).map_or(Cell::Empty, Cell::from),
        ]);
    }
    t
}

pub fn link_table(file: &TopologyFile, report: &SimReport) -> Table {
    let mut t = Table::new(&["from", "to", "bits"]);
    for ((a, b), bits) in &report.link_bits {
        t.push(vec![file.topology.label(*a).into(), file.topology.label(*b).into(), (*bits).into()]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::{parse_interests, parse_topology};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const LINE: &str = "[geometry]\nd=3\nm_ind=4096\nk_i=2\n[nodes]\nA\nB\nC\n[links]\nA B 1\nB C 1\n[prefixes]\nC /data/set\n";

    #[test]
    fn oracle_and_filters_agree_on_a_line() {
        let f = parse_topology(LINE).unwrap();
        let interests = parse_interests("A /data/set/1\nB /data/set\n", &f.topology).unwrap();
        for oracle in [false, true] {
            let r = run(&f, &interests, &SimulateOptions { oracle, ..Default::default() }).unwrap();
            assert_eq!(r.delivered, 2);
            assert_eq!(r.hops, [2, 1]);
            // two hashes x 12 bits per level: three levels over two links, two over one
            assert_eq!(r.total_bits(), 2 * 72 + 48);
            let t = interest_table(&f, &interests, &r);
            assert_eq!(t.get(0, "path"), Some(&Cell::Text("A>B>C".into())));
        }
    }

    #[test]
    fn empty_interest_list() {
        let f = parse_topology(LINE).unwrap();
        let r = run(&f, &[], &SimulateOptions::default()).unwrap();
        let t = summary_table(&r);
        assert_eq!(t.to_csv_string().lines().nth(1), Some("0,0,0,0,0,0,0,0"));
    }

    #[test]
    fn generated_interests_are_reproducible() {
        let f = parse_topology(LINE).unwrap();
        let gen = |seed| random_interests(&f, 50, 0.3, &mut ChaCha8Rng::seed_from_u64(seed));
        assert_eq!(gen(5), gen(5));
        assert_ne!(gen(5), gen(6));
        assert!(gen(5).iter().any(|(_, n)| n.to_string() == "data/set"));
    }
}
