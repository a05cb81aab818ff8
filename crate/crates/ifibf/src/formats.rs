//! Text formats: topology files, Interest lists and request streams.
//!
//! All three are line oriented. `#` starts a comment, surrounding whitespace
//! is ignored and names may be written with a leading `/`.
//!
//! ```text
//! [geometry]
//! d = 4
//! m_ind = 32768        # one value for every level, or one per level
//! k_i = 1
//! seeds = 0            # optional, defaults to 0..k_i
//!
//! [nodes]
//! A
//! B
//!
//! [links]
//! A B 1
//!
//! [prefixes]
//! B /Cambridge/ComputerLab
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use ifibf_core::routing::{Link, NodeId, Topology};
use ifibf_core::{FilterGeometry, HierarchicalName};

use crate::{Error, Result};

/// Reads a whole file, tagging IO errors with the path.
pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| {
        let l = l.split_once('#').map_or(l, |(before, _)| before);
        (i + 1, l.trim())
    })
}

/// Parses a name, accepting one leading `/`.
pub fn parse_name(s: &str, line: usize) -> Result<HierarchicalName> {
    let s = s.strip_prefix('/').unwrap_or(s);
    s.parse().map_err(|e: ifibf_core::Error| Error::syntax(line, e.to_string()))
}

/// A topology with the names each node registers.
#[derive(Debug, Clone, PartialEq)]
pub struct TopologyFile {
    pub topology: Topology,
    pub registrations: Vec<(NodeId, HierarchicalName)>,
}

impl TopologyFile {
    pub fn node(&self, label: &str, line: usize) -> Result<NodeId> {
        self.topology
            .node_by_label(label)
            .ok_or_else(|| Error::syntax(line, format!("unknown node {label:?}")))
    }

    /// Writes the file back in canonical form.
    pub fn render(&self) -> String {
        let t = &self.topology;
        let g = t.geometry();
        let join = |v: &mut dyn Iterator<Item = String>| v.collect::<Vec<_>>().join(" ");
        let mut out = String::from("[geometry]\n");
        let _ = writeln!(out, "d = {}", g.depth());
        let _ = writeln!(out, "m_ind = {}", join(&mut g.level_sizes().iter().map(u64::to_string)));
        let _ = writeln!(out, "k_i = {}", g.hashes());
        let _ = writeln!(out, "seeds = {}", join(&mut g.seeds().iter().map(u64::to_string)));
        out.push_str("\n[nodes]\n");
        for n in t.nodes() {
            let _ = writeln!(out, "{}", t.label(n));
        }
        out.push_str("\n[links]\n");
        for l in t.links() {
            let _ = writeln!(out, "{} {} {}", t.label(l.a), t.label(l.b), l.cost);
        }
        out.push_str("\n[prefixes]\n");
        for (n, name) in &self.registrations {
            let _ = writeln!(out, "{} /{}", t.label(*n), name);
        }
        out
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Geometry,
    Nodes,
    Links,
    Prefixes,
}

fn numbers<T: std::str::FromStr>(value: &str, key: &str, line: usize) -> Result<Vec<T>> {
    value
        .split_whitespace()
        .map(|v| {
            v.parse()
                .map_err(|_| Error::syntax(line, format!("{key}: {v:?} is not a non-negative integer")))
        })
        .collect()
}

pub fn parse_topology(text: &str) -> Result<TopologyFile> {
    let mut section = Section::None;
    let mut geo: BTreeMap<String, (usize, String)> = BTreeMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut raw_links: Vec<(usize, String, String, u64)> = Vec::new();
    let mut raw_prefixes: Vec<(usize, String, String)> = Vec::new();
    for (line, l) in content_lines(text) {
        if l.is_empty() {
            continue;
        }
        if let Some(name) = l.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = match name.trim() {
                "geometry" => Section::Geometry,
                "nodes" => Section::Nodes,
                "links" => Section::Links,
                "prefixes" => Section::Prefixes,
                other => return Err(Error::syntax(line, format!("unknown section [{other}]"))),
            };
            continue;
        }
        match section {
            Section::None => return Err(Error::syntax(line, "content before the first section")),
            Section::Geometry => {
                let (k, v) = l
                    .split_once('=')
                    .ok_or_else(|| Error::syntax(line, "expected key = value"))?;
                let k = k.trim().to_owned();
                if geo.insert(k.clone(), (line, v.trim().to_owned())).is_some() {
                    return Err(Error::syntax(line, format!("{k} given twice")));
                }
            }
            Section::Nodes => {
                if l.split_whitespace().count() != 1 {
                    return Err(Error::syntax(line, "node labels cannot contain spaces"));
                }
                labels.push(l.to_owned());
            }
            Section::Links => {
                let parts: Vec<&str> = l.split_whitespace().collect();
                let [a, b, cost] = parts[..] else {
                    return Err(Error::syntax(line, "expected: a b cost"));
                };
                let cost = cost
                    .parse()
                    .map_err(|_| Error::syntax(line, format!("cost {cost:?} is not a non-negative integer")))?;
                raw_links.push((line, a.to_owned(), b.to_owned(), cost));
            }
            Section::Prefixes => {
                let (node, name) = l
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| Error::syntax(line, "expected: node name"))?;
                raw_prefixes.push((line, node.to_owned(), name.trim().to_owned()));
            }
        }
    }

    let field = |key: &str| geo.get(key).ok_or_else(|| Error::Config(format!("[geometry] is missing {key}")));
    let (line, d) = field("d")?;
    let d: usize = d.parse().map_err(|_| Error::syntax(*line, "d must be a positive integer"))?;
    let (line, m) = field("m_ind")?;
    let mut m_ind: Vec<u64> = numbers(m, "m_ind", *line)?;
    if m_ind.len() == 1 {
        m_ind = vec![m_ind[0]; d];
    }
    if m_ind.len() != d {
        return Err(Error::syntax(*line, format!("m_ind lists {} sizes for d = {d}", m_ind.len())));
    }
    let (line, k) = field("k_i")?;
    let k_i: u32 = k.parse().map_err(|_| Error::syntax(*line, "k_i must be a positive integer"))?;
    let geometry = match geo.get("seeds") {
        Some((line, s)) => FilterGeometry::new(m_ind, k_i, numbers(s, "seeds", *line)?)
            .map_err(|e| Error::syntax(*line, e.to_string()))?,
        None => FilterGeometry::with_default_seeds(m_ind, k_i).map_err(|e| Error::syntax(*line, e.to_string()))?,
    };
    if let Some(extra) = geo.keys().find(|k| !["d", "m_ind", "k_i", "seeds"].contains(&k.as_str())) {
        return Err(Error::syntax(geo[extra].0, format!("unknown geometry key {extra:?}")));
    }

    let index: BTreeMap<&str, NodeId> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), NodeId(i as u32)))
        .collect();
    let lookup = |label: &str, line: usize| {
        index
            .get(label)
            .copied()
            .ok_or_else(|| Error::syntax(line, format!("unknown node {label:?}")))
    };
    let links = raw_links
        .iter()
        .map(|(line, a, b, cost)| {
            Ok(Link {
                a: lookup(a, *line)?,
                b: lookup(b, *line)?,
                cost: *cost,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let registrations = raw_prefixes
        .iter()
        .map(|(line, node, name)| Ok((lookup(node, *line)?, parse_name(name, *line)?)))
        .collect::<Result<Vec<_>>>()?;
    let topology = Topology::new(geometry, labels, links)?;
    Ok(TopologyFile {
        topology,
        registrations,
    })
}

/// Parses `source name` lines.
pub fn parse_interests(text: &str, topology: &Topology) -> Result<Vec<(NodeId, HierarchicalName)>> {
    content_lines(text)
        .filter(|(_, l)| !l.is_empty())
        .map(|(line, l)| {
            let (node, name) = l
                .split_once(char::is_whitespace)
                .ok_or_else(|| Error::syntax(line, "expected: source name"))?;
            let id = topology
                .node_by_label(node)
                .ok_or_else(|| Error::syntax(line, format!("unknown node {node:?}")))?;
            Ok((id, parse_name(name.trim(), line)?))
        })
        .collect()
}

/// Parses a request stream: one name per line, blank lines between epochs.
/// Runs of blank lines count as one separator.
pub fn parse_stream(text: &str) -> Result<Vec<Vec<HierarchicalName>>> {
    let mut epochs = Vec::new();
    let mut current = Vec::new();
    for (line, raw) in text.lines().enumerate() {
        let line = line + 1;
        if raw.trim_start().starts_with('#') {
            continue;
        }
        let l = raw.trim();
        if l.is_empty() {
            if !current.is_empty() {
                epochs.push(std::mem::take(&mut current));
            }
            continue;
        }
        current.push(parse_name(l, line)?);
    }
    if !current.is_empty() {
        epochs.push(current);
    }
    Ok(epochs)
}
