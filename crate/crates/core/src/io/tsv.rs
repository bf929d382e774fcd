//! Whitespace-separated edge lists.
//!
//! ```text
//! # optional comment lines
//! node_a  node_b  emails  posts  comments
//! 1       2       4       4      4
//! ```
//!
//! A first line whose first two fields are not both integers is a header and
//! names the attributes. Files without a header take their arity from the
//! first row. Two-column files carry no weights: every edge gets a single
//! attribute `weight` of 1.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use rand::distributions::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fixtures::{TABLE1_ATTRS, TABLE1_ROWS};
use crate::graph::{AttributeSchema, Edge, EdgeKey, GraphSnapshot, NameTable, NodeId};

const UNWEIGHTED: &str = "weight";

pub fn parse_edge_list(path: &Path) -> Result<GraphSnapshot> {
    parse_edge_list_str(&super::read_to_string(path)?, path)
}

/// Parses edge-list text; `origin` only labels error messages.
pub fn parse_edge_list_str(text: &str, origin: &Path) -> Result<GraphSnapshot> {
    let err = |line: usize, reason: String| Error::Parse { path: origin.to_path_buf(), line, reason };
    let mut names: Option<Vec<String>> = None;
    let mut columns: Option<usize> = None;
    let mut nodes = BTreeSet::new();
    let mut edges: BTreeMap<EdgeKey, Vec<u64>> = BTreeMap::new();
    let mut seen: HashMap<EdgeKey, usize> = HashMap::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if columns.is_none() {
            let numeric = fields.len() >= 2 && fields[..2].iter().all(|f| f.parse::<u32>().is_ok());
            if !numeric {
                if fields.len() < 2 {
                    return Err(err(line_no, "header needs at least two columns".into()));
                }
                let attrs: Vec<String> = fields[2..].iter().map(|s| s.to_string()).collect();
                columns = Some(fields.len());
                names = Some(attrs);
                continue;
            }
            columns = Some(fields.len());
        }
        let width = columns.expect("set above");
        if fields.len() != width {
            return Err(err(line_no, format!("expected {width} columns, found {}", fields.len())));
        }
        if width < 2 {
            return Err(err(line_no, "rows need at least two columns".into()));
        }
        let id = |f: &str| f.parse::<u32>().map_err(|_| err(line_no, format!("invalid node id `{f}`")));
        let (a, b) = (id(fields[0])?, id(fields[1])?);
        if a == b {
            return Err(err(line_no, format!("self-loop on node {a}")));
        }
        let weights = if width == 2 {
            vec![1]
        } else {
            fields[2..]
                .iter()
                .map(|f| f.parse::<u64>().map_err(|_| err(line_no, format!("invalid weight `{f}`"))))
                .collect::<Result<Vec<_>>>()?
        };
        let key = EdgeKey::pair(a, b);
        if seen.insert(key, line_no).is_some() {
            return Err(Error::DuplicateRow { path: origin.to_path_buf(), line: line_no, edge: key });
        }
        nodes.insert(NodeId(a));
        nodes.insert(NodeId(b));
        if weights.iter().any(|w| *w > 0) {
            edges.insert(key, weights);
        }
    }

    let width = columns.unwrap_or(2);
    let names = names.unwrap_or_else(|| default_names(width));
    let names = if names.is_empty() { vec![UNWEIGHTED.to_string()] } else { names };
    let schema = AttributeSchema::new(names).map_err(|e| err(1, e.to_string()))?;
    let edges = edges.into_iter().map(|(key, weights)| Edge { key, weights });
    GraphSnapshot::from_parts(schema, nodes, edges, NameTable::default())
}

fn default_names(width: usize) -> Vec<String> {
    match width.saturating_sub(2) {
        0 | 1 => vec![UNWEIGHTED.to_string()],
        n => (1..=n).map(|i| format!("w{i}")).collect(),
    }
}

/// Renders a snapshot as an edge list, edges in key order. Zero-degree
/// nodes cannot be represented and are dropped.
pub fn format_edge_list(graph: &GraphSnapshot, comment: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(c) = comment {
        writeln!(out, "# {c}").unwrap();
    }
    out.push_str("node_a\tnode_b");
    for name in graph.schema().names() {
        write!(out, "\t{name}").unwrap();
    }
    out.push('\n');
    for (key, weights) in graph.edges() {
        write!(out, "{}\t{}", key.lo(), key.hi()).unwrap();
        for w in weights {
            write!(out, "\t{w}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// The 28-row interaction table, rows in their original order and
/// orientation.
pub fn table1_tsv(comment: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(c) = comment {
        writeln!(out, "# {c}").unwrap();
    }
    writeln!(out, "node_a node_b {}", TABLE1_ATTRS.join(" ")).unwrap();
    for row in TABLE1_ROWS {
        let cells: Vec<String> = row.iter().map(u32::to_string).collect();
        writeln!(out, "{}", cells.join(" ")).unwrap();
    }
    out
}

/// Uniform random simple graph as a bare two-column edge list. Node ids
/// run from 0 to `nodes − 1`.
pub fn random_edge_list(nodes: u32, edges: usize, seed: u64, comment: Option<&str>) -> Result<String> {
    let max_edges = nodes as u64 * nodes.saturating_sub(1) as u64 / 2;
    if edges as u64 > max_edges {
        return Err(Error::ConfigInvalid(format!("{edges} edges do not fit in a simple graph on {nodes} nodes")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut order = Vec::with_capacity(edges);
    while order.len() < edges {
        let (a, b) = (rng.gen_range(0..nodes), rng.gen_range(0..nodes));
        if a != b && seen.insert(EdgeKey::pair(a, b)) {
            order.push((a, b));
        }
    }
    let mut out = String::new();
    if let Some(c) = comment {
        writeln!(out, "# {c}").unwrap();
    }
    for (a, b) in order {
        writeln!(out, "{a}\t{b}").unwrap();
    }
    Ok(out)
}

/// Integer weight distribution for [`assign_random_weights`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum WeightDistribution {
    /// Uniform over `min..=max`.
    Uniform { min: u64, max: u64 },
}

impl Default for WeightDistribution {
    fn default() -> Self {
        WeightDistribution::Uniform { min: 1, max: 5 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Weighted {
    pub text: String,
    pub rows: usize,
    pub dropped: usize,
}

/// Gives every pair of a bare edge list `arity` i.i.d. weights. Rows keep
/// their input order. With `dedupe`, self-loops and repeated undirected pairs
/// are dropped instead of copied through.
pub fn assign_random_weights(
    text: &str,
    origin: &Path,
    arity: usize,
    dist: WeightDistribution,
    seed: u64,
    dedupe: bool,
    comment: Option<&str>,
) -> Result<Weighted> {
    if arity == 0 {
        return Err(Error::ConfigInvalid("arity must be at least 1".into()));
    }
    let WeightDistribution::Uniform { min, max } = dist;
    if min > max || max == 0 {
        return Err(Error::ConfigInvalid(format!("empty or all-zero weight range {min}..{max}")));
    }
    let uniform = Uniform::new_inclusive(min, max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    if let Some(c) = comment {
        writeln!(out, "# {c}").unwrap();
    }
    out.push_str("node_a\tnode_b");
    for name in default_names(arity + 2) {
        write!(out, "\t{name}").unwrap();
    }
    out.push('\n');

    let mut seen = BTreeSet::new();
    let (mut rows, mut dropped) = (0, 0);
    let mut header_seen = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let ids: Option<Vec<u32>> = fields.iter().take(2).map(|f| f.parse().ok()).collect();
        let (a, b) = match (fields.len(), ids.as_deref()) {
            (2, Some(&[a, b])) => (a, b),
            (_, None) if !header_seen && rows + dropped == 0 => {
                header_seen = true;
                continue;
            }
            _ => {
                return Err(Error::Parse {
                    path: origin.to_path_buf(),
                    line: i + 1,
                    reason: "expected a bare `node_a node_b` pair".into(),
                })
            }
        };
        if dedupe && (a == b || !seen.insert(EdgeKey::pair(a, b))) {
            dropped += 1;
            continue;
        }
        write!(out, "{a}\t{b}").unwrap();
        let mut weights: Vec<u64> = (0..arity).map(|_| uniform.sample(&mut rng)).collect();
        if weights.iter().all(|w| *w == 0) {
            // keep every edge active: redraw from the positive part of the range
            weights[0] = Uniform::new_inclusive(min.max(1), max).sample(&mut rng);
        }
        for w in weights {
            write!(out, "\t{w}").unwrap();
        }
        out.push('\n');
        rows += 1;
    }
    Ok(Weighted { text: out, rows, dropped })
}
