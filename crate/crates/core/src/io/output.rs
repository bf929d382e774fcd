//! Run outputs. Every file starts with a provenance header naming the tool
//! version, the seed and the SHA-256 of the inputs; nothing time-dependent is
//! written, so identical runs produce identical bytes.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::{find_noa, NoaRecord};
use crate::error::{Error, Result};
use crate::fitness::{closeness, FitnessValue};
use crate::ga::Checkpoint;
use crate::graph::{AttributeView, NodeId};
use crate::partition::Partition;

pub const TOOL: &str = "noa";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    pub input_sha256: String,
}

impl Provenance {
    pub fn new(command: &str, seed: Option<u64>, input_sha256: String) -> Self {
        Provenance { tool: TOOL.into(), version: VERSION.into(), command: command.into(), seed, input_sha256 }
    }

    /// Single-line form for `#` and `//` comments.
    pub fn comment(&self) -> String {
        let seed = self.seed.map_or_else(String::new, |s| format!(" seed={s}"));
        format!("{} {} {}{seed} input_sha256={}", self.tool, self.version, self.command, self.input_sha256)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterJson {
    pub members: Vec<NodeId>,
    pub noa: NodeId,
    pub closeness: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionJson {
    pub meta: Provenance,
    pub version: u64,
    pub attrs: Vec<String>,
    /// Display names of named nodes, keyed by id.
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub labels: BTreeMap<NodeId, String>,
    pub clusters: Vec<ClusterJson>,
    pub fitness: FitnessValue,
}

impl PartitionJson {
    pub fn build(meta: Provenance, partition: &Partition, view: &AttributeView, fitness: FitnessValue) -> Result<Self> {
        if partition.source_version() != view.version() {
            return Err(Error::StaleSnapshot { partition: partition.source_version(), live: view.version() });
        }
        let clusters = partition
            .clusters()
            .iter()
            .map(|c| {
                Ok(ClusterJson { members: c.clone(), noa: find_noa(c, view)?.node, closeness: closeness(c, view)? })
            })
            .collect::<Result<_>>()?;
        let labels = view.base().names().iter().map(|(id, name)| (id, name.to_string())).collect();
        Ok(PartitionJson { meta, version: view.version(), attrs: view.attr_names(), labels, clusters, fitness })
    }

    pub fn to_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("partition serializes") + "\n"
    }

    pub fn member_ids(&self) -> Vec<Vec<u32>> {
        self.clusters.iter().map(|c| c.members.iter().map(|n| n.0).collect()).collect()
    }
}

/// One NoA log line: the record plus the NoA's display label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoaLine {
    #[serde(flatten)]
    pub record: NoaRecord,
    pub noa_label: String,
}

fn jsonl<T: Serialize>(meta: &Provenance, items: impl IntoIterator<Item = T>) -> String {
    let mut out = serde_json::to_string(meta).expect("header serializes") + "\n";
    for item in items {
        out.push_str(&serde_json::to_string(&item).expect("record serializes"));
        out.push('\n');
    }
    out
}

pub fn format_checkpoint_log(meta: &Provenance, checkpoints: &[Checkpoint]) -> String {
    jsonl(meta, checkpoints)
}

pub fn format_noa_log(meta: &Provenance, records: &[NoaRecord], view: &AttributeView) -> String {
    let names = view.base().names();
    jsonl(meta, records.iter().map(|r| NoaLine { record: r.clone(), noa_label: names.label(r.noa) }))
}

/// Reads a JSONL log written by this module: header, then one item per line.
pub fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<(Provenance, Vec<T>)> {
    parse_jsonl(&super::read_to_string(path)?, path)
}

pub fn parse_jsonl<T: for<'de> Deserialize<'de>>(text: &str, origin: &Path) -> Result<(Provenance, Vec<T>)> {
    let err =
        |line: usize, e: serde_json::Error| Error::Parse { path: origin.to_path_buf(), line, reason: e.to_string() };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (i, first) = lines.next().ok_or_else(|| Error::Parse {
        path: origin.to_path_buf(),
        line: 1,
        reason: "missing header line".into(),
    })?;
    let meta: Provenance = serde_json::from_str(first).map_err(|e| err(i + 1, e))?;
    let items = lines.map(|(i, l)| serde_json::from_str(l).map_err(|e| err(i + 1, e))).collect::<Result<_>>()?;
    Ok((meta, items))
}
