//! Graphviz export. One `cluster_i` subgraph per cluster; NoA nodes are
//! filled red, nodes added after the reference snapshot are filled blue, and
//! edges are labelled with their aggregated weight.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::graph::{AttributeView, NodeId};
use crate::partition::Partition;

#[derive(Clone, Debug, Default)]
pub struct Highlight {
    pub noa: BTreeSet<NodeId>,
    pub new_nodes: BTreeSet<NodeId>,
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Renders `partition` over `view`. `header` lines become `//` comments.
pub fn format_dot(partition: &Partition, view: &AttributeView, highlight: &Highlight, header: &[String]) -> String {
    let names = view.base().names();
    let id = |n: NodeId| quote(&names.label(n));
    let mut out = String::new();
    for line in header {
        writeln!(out, "// {line}").unwrap();
    }
    out.push_str("graph partition {\n");
    out.push_str("  node [shape=circle];\n");
    for (i, cluster) in partition.clusters().iter().enumerate() {
        writeln!(out, "  subgraph cluster_{i} {{").unwrap();
        writeln!(out, "    label={};", quote(&format!("C{i}"))).unwrap();
        for node in cluster {
            let style = if highlight.noa.contains(node) {
                " [style=filled, fillcolor=red]"
            } else if highlight.new_nodes.contains(node) {
                " [style=filled, fillcolor=blue, fontcolor=white]"
            } else {
                ""
            };
            writeln!(out, "    {}{style};", id(*node)).unwrap();
        }
        out.push_str("  }\n");
    }
    for e in view.edges() {
        writeln!(out, "  {} -- {} [label=\"{}\"];", id(e.key.lo()), id(e.key.hi()), e.weight).unwrap();
    }
    out.push_str("}\n");
    out
}
