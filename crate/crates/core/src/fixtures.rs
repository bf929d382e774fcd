//! Built-in datasets: the 28-row synthetic interaction table, its dynamic
//! add-X/add-Y scenario, and a few tiny graphs used throughout the tests.

use crate::graph::{AttributeSchema, Edge, EdgeKey, GraphSnapshot, NameTable, NodeId};

pub const TABLE1_ATTRS: [&str; 3] = ["emails", "posts", "comments"];

/// `node_a, node_b, emails, posts, comments`
pub const TABLE1_ROWS: [[u32; 5]; 28] = [
    [1, 2, 4, 4, 4],
    [1, 3, 3, 3, 3],
    [1, 4, 4, 4, 4],
    [1, 5, 4, 5, 5],
    [5, 4, 3, 4, 4],
    [5, 3, 4, 3, 3],
    [2, 3, 3, 3, 3],
    [2, 4, 3, 3, 3],
    [4, 7, 1, 29, 1],
    [8, 14, 2, 1, 30],
    [5, 6, 1, 39, 1],
    [6, 7, 5, 4, 3],
    [6, 8, 3, 5, 4],
    [6, 9, 4, 4, 4],
    [7, 8, 4, 3, 5],
    [7, 9, 3, 4, 4],
    [8, 9, 4, 5, 5],
    [6, 10, 1, 1, 35],
    [10, 11, 4, 4, 3],
    [10, 12, 3, 3, 3],
    [10, 14, 4, 3, 4],
    [11, 12, 2, 4, 5],
    [11, 13, 3, 3, 4],
    [11, 14, 5, 4, 5],
    [12, 13, 4, 5, 4],
    [13, 14, 3, 4, 5],
    [12, 14, 4, 3, 4],
    [14, 15, 3, 4, 5],
];

pub fn table1() -> GraphSnapshot {
    let schema = AttributeSchema::new(TABLE1_ATTRS).expect("static schema");
    let edges = TABLE1_ROWS
        .iter()
        .map(|r| Edge::new(r[0], r[1], r[2..].iter().map(|w| *w as u64).collect()).expect("static row"));
    GraphSnapshot::from_parts(schema, (1..=15).map(NodeId), edges, NameTable::default()).expect("static table")
}

/// Tick at which X joins the second group.
pub const TABLE2_T1: u64 = 1000;
/// Tick at which Y joins and X's ties to 6 and 7 weaken.
pub const TABLE2_T2: u64 = 2000;

/// Labelled event stream for the second-group dynamics over the first
/// attribute: X wired to {6,7,8,9} at weight 10, then Y wired to
/// {6,7,8,9,X} at weight 20 while X's edges to 6 and 7 drop to 1.
pub fn table2_events() -> Vec<LabelledEvent> {
    use LabelledKind::*;
    let mut out = vec![LabelledEvent { tick: TABLE2_T1, kind: AddNode { node: "X".into() } }];
    for n in ["6", "7", "8", "9"] {
        out.push(LabelledEvent {
            tick: TABLE2_T1,
            kind: AddEdge { a: "X".into(), b: n.into(), weights: vec![10, 0, 0] },
        });
    }
    out.push(LabelledEvent { tick: TABLE2_T2, kind: AddNode { node: "Y".into() } });
    for n in ["6", "7"] {
        out.push(LabelledEvent {
            tick: TABLE2_T2,
            kind: UpdateWeight { a: "X".into(), b: n.into(), attr: "emails".into(), value: 1 },
        });
    }
    for n in ["6", "7", "8", "9", "X"] {
        out.push(LabelledEvent {
            tick: TABLE2_T2,
            kind: AddEdge { a: "Y".into(), b: n.into(), weights: vec![20, 0, 0] },
        });
    }
    out
}

pub use crate::io::events::{LabelledEvent, LabelledKind};

/// Triangle {1,2,3}, single attribute, every weight `w`.
pub fn triangle(w: u64) -> GraphSnapshot {
    weighted(&[(1, 2, w), (1, 3, w), (2, 3, w)])
}

/// Triangles {1,2,3} and {4,5,6} at weight 4 joined by the bridge (3,4) at weight 1.
pub fn two_triangles() -> GraphSnapshot {
    weighted(&[(1, 2, 4), (1, 3, 4), (2, 3, 4), (4, 5, 4), (4, 6, 4), (5, 6, 4), (3, 4, 1)])
}

/// Single-attribute graph named `w` from `(a, b, weight)` triples.
pub fn weighted(rows: &[(u32, u32, u64)]) -> GraphSnapshot {
    let schema = AttributeSchema::new(["w"]).expect("static schema");
    let nodes: std::collections::BTreeSet<NodeId> =
        rows.iter().flat_map(|(a, b, _)| [NodeId(*a), NodeId(*b)]).collect();
    let edges = rows.iter().map(|(a, b, w)| Edge::new(*a, *b, vec![*w]).expect("fixture edge"));
    GraphSnapshot::from_parts(schema, nodes, edges, NameTable::default()).expect("fixture graph")
}

/// The four email-light edges joining the three email communities.
pub fn table1_email_bridges() -> Vec<EdgeKey> {
    vec![EdgeKey::pair(4, 7), EdgeKey::pair(5, 6), EdgeKey::pair(8, 14), EdgeKey::pair(6, 10)]
}
