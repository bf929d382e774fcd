//! Event streams as JSON lines.
//!
//! ```text
//! {"tick":1000,"kind":"add_node","node":"X"}
//! {"tick":1000,"kind":"add_edge","a":"X","b":6,"weights":[10,0,0]}
//! {"tick":2000,"kind":"update_weight","a":"X","b":6,"attr":"emails","value":1}
//! {"tick":2500,"kind":"remove_edge","a":14,"b":15}
//! ```
//!
//! Node labels may be integers or strings. Numeric labels are node ids;
//! other labels name nodes created by `add_node`, which receive the next
//! unused id.

use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeKey, EventKind, GraphSnapshot, NodeId, Tick, UpdateEvent};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelledEvent {
    pub tick: Tick,
    #[serde(flatten)]
    pub kind: LabelledKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LabelledKind {
    AddNode {
        #[serde(deserialize_with = "label")]
        node: String,
    },
    AddEdge {
        #[serde(deserialize_with = "label")]
        a: String,
        #[serde(deserialize_with = "label")]
        b: String,
        weights: Vec<u64>,
    },
    UpdateWeight {
        #[serde(deserialize_with = "label")]
        a: String,
        #[serde(deserialize_with = "label")]
        b: String,
        attr: String,
        value: u64,
    },
    RemoveEdge {
        #[serde(deserialize_with = "label")]
        a: String,
        #[serde(deserialize_with = "label")]
        b: String,
    },
}

fn label<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<String, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Label {
        Id(u64),
        Name(String),
    }
    Ok(match Label::deserialize(d)? {
        Label::Id(n) => n.to_string(),
        Label::Name(s) => s,
    })
}

pub fn parse_events(path: &Path) -> Result<Vec<LabelledEvent>> {
    parse_events_str(&super::read_to_string(path)?, path)
}

/// One event per non-blank line; lines starting with `#` are skipped. Ticks
/// must be non-decreasing.
pub fn parse_events_str(text: &str, origin: &Path) -> Result<Vec<LabelledEvent>> {
    let mut out: Vec<LabelledEvent> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let event: LabelledEvent = serde_json::from_str(line).map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            line: i + 1,
            reason: e.to_string(),
        })?;
        if let Some(prev) = out.last().filter(|p| p.tick > event.tick) {
            return Err(Error::TickOrder { tick: event.tick, previous: prev.tick });
        }
        out.push(event);
    }
    Ok(out)
}

pub fn format_events(events: &[LabelledEvent]) -> String {
    events.iter().map(|e| serde_json::to_string(e).expect("events serialize") + "\n").collect()
}

/// Turns labels into node ids against `base`, allocating ids for named
/// nodes in stream order exactly as the snapshot will see them.
pub fn resolve_events(events: &[LabelledEvent], base: &GraphSnapshot) -> Result<Vec<UpdateEvent>> {
    let mut names = base.names().clone();
    let mut next = base.next_free_id().0;
    let schema = base.schema();
    events
        .iter()
        .map(|e| {
            let wrap = |err: Error| Error::Event { tick: e.tick, source: Box::new(err) };
            let find = |label: &str| names.resolve(label).ok_or_else(|| wrap(Error::UnknownLabel(label.into())));
            let kind = match &e.kind {
                LabelledKind::AddNode { node } => match node.parse::<u32>() {
                    Ok(id) => {
                        next = next.max(id + 1);
                        EventKind::AddNode { node: NodeId(id), label: None }
                    }
                    Err(_) => {
                        if let Some(id) = names.resolve(node) {
                            return Err(wrap(Error::DuplicateNode(id)));
                        }
                        let id = NodeId(next);
                        next += 1;
                        names.insert(node.clone(), id);
                        EventKind::AddNode { node: id, label: Some(node.clone()) }
                    }
                },
                LabelledKind::AddEdge { a, b, weights } => {
                    EventKind::AddEdge(Edge::new(find(a)?, find(b)?, weights.clone()).map_err(wrap)?)
                }
                LabelledKind::UpdateWeight { a, b, attr, value } => EventKind::UpdateEdgeWeight {
                    key: EdgeKey::new(find(a)?, find(b)?).map_err(wrap)?,
                    attr: schema.index_of(attr).map_err(wrap)?,
                    value: *value,
                },
                LabelledKind::RemoveEdge { a, b } => {
                    EventKind::RemoveEdge(EdgeKey::new(find(a)?, find(b)?).map_err(wrap)?)
                }
            };
            Ok(UpdateEvent::new(e.tick, kind))
        })
        .collect()
}
