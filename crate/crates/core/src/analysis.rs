//! Node-of-attraction extraction and the reports built on top of a partition:
//! NoA history, linkage nodes, partition overlay and merge signals.
//!
//! The node of attraction (NoA) of a cluster is the member with the most
//! intra-cluster edges. Ties go to the larger intra-cluster weight, then to
//! the smallest id, so the choice is fully deterministic.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AttributeView, Degree, EdgeKey, EventKind, GraphSnapshot, NodeId, Tick, UpdateEvent};
use crate::partition::Partition;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Attraction {
    pub node: NodeId,
    pub degree: Degree,
}

impl Attraction {
    fn beats(&self, other: &Attraction) -> bool {
        (self.degree.edge_count, self.degree.total_weight, std::cmp::Reverse(self.node))
            > (other.degree.edge_count, other.degree.total_weight, std::cmp::Reverse(other.node))
    }
}

/// The NoA of `cluster`, with its intra-cluster degree.
pub fn find_noa(cluster: &[NodeId], view: &AttributeView) -> Result<Attraction> {
    if cluster.is_empty() {
        return Err(Error::EmptyCluster);
    }
    let within: BTreeSet<NodeId> = cluster.iter().copied().collect();
    let mut best: Option<Attraction> = None;
    for node in &within {
        let candidate = Attraction { node: *node, degree: view.weighted_degree(*node, Some(&within))? };
        if best.is_none_or(|b| candidate.beats(&b)) {
            best = Some(candidate);
        }
    }
    Ok(best.expect("non-empty cluster"))
}

/// NoA of every cluster of a partition, indexed like `partition.clusters()`.
fn all_noas(partition: &Partition, view: &AttributeView) -> Result<Vec<Attraction>> {
    let labels = partition
        .dense_labels(view)
        .ok_or_else(|| Error::InvalidPartition("partition does not cover the view".into()))?;
    let mut intra = vec![Degree::default(); view.node_count()];
    for e in view.edges() {
        if labels[e.u as usize] == labels[e.v as usize] {
            for end in [e.u, e.v] {
                intra[end as usize].edge_count += 1;
                intra[end as usize].total_weight += e.weight;
            }
        }
    }
    partition
        .clusters()
        .iter()
        .map(|cluster| {
            let mut best: Option<Attraction> = None;
            for node in cluster {
                let idx = view.index_of(*node).ok_or(Error::UnknownNode(*node))?;
                let candidate = Attraction { node: *node, degree: intra[idx] };
                if best.is_none_or(|b| candidate.beats(&b)) {
                    best = Some(candidate);
                }
            }
            best.ok_or(Error::EmptyCluster)
        })
        .collect()
}

fn ensure_current(partition: &Partition, view: &AttributeView) -> Result<()> {
    if partition.source_version() != view.version() {
        return Err(Error::StaleSnapshot { partition: partition.source_version(), live: view.version() });
    }
    Ok(())
}

/// One line of the NoA history file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoaRecord {
    pub tick: Tick,
    pub attrs: Vec<String>,
    pub members: Vec<NodeId>,
    pub noa: NodeId,
    pub edges: usize,
    pub weight: u64,
}

/// Append-only, tick-ordered NoA log.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NoaHistory {
    records: Vec<NoaRecord>,
}

impl NoaHistory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn records(&self) -> &[NoaRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last_tick(&self) -> Option<Tick> {
        self.records.last().map(|r| r.tick)
    }

    /// Appends one record per cluster, clusters in partition order.
    /// Returns the number of records added.
    pub fn append(&mut self, partition: &Partition, view: &AttributeView, tick: Tick) -> Result<usize> {
        ensure_current(partition, view)?;
        if let Some(last) = self.last_tick().filter(|last| *last > tick) {
            return Err(Error::TickOrder { tick, previous: last });
        }
        let attrs = view.attr_names();
        let noas = all_noas(partition, view)?;
        for (cluster, noa) in partition.clusters().iter().zip(noas) {
            self.records.push(NoaRecord {
                tick,
                attrs: attrs.clone(),
                members: cluster.clone(),
                noa: noa.node,
                edges: noa.degree.edge_count,
                weight: noa.degree.total_weight,
            });
        }
        Ok(partition.len())
    }

    /// Records of the cluster containing `node`, one per tick at most.
    pub fn timeline(&self, node: NodeId) -> Vec<&NoaRecord> {
        self.records.iter().filter(|r| r.members.binary_search(&node).is_ok()).collect()
    }

    pub fn extend_from(&mut self, records: impl IntoIterator<Item = NoaRecord>) {
        self.records.extend(records);
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinkageEntry {
    pub cluster: usize,
    pub foreign_clusters: Vec<usize>,
    pub bridges: Vec<(NodeId, NodeId)>,
}

/// Nodes with at least one active edge into a different cluster.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LinkageReport {
    pub nodes: BTreeMap<NodeId, LinkageEntry>,
}

impl LinkageReport {
    pub fn linkage_nodes(&self) -> BTreeSet<NodeId> {
        self.nodes.keys().copied().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

pub fn linkage_nodes(partition: &Partition, view: &AttributeView) -> Result<LinkageReport> {
    ensure_current(partition, view)?;
    let labels = partition
        .dense_labels(view)
        .ok_or_else(|| Error::InvalidPartition("partition does not cover the view".into()))?;
    let mut report = LinkageReport::default();
    for e in view.edges() {
        let (lu, lv) = (labels[e.u as usize] as usize, labels[e.v as usize] as usize);
        if lu == lv {
            continue;
        }
        let pair = (e.key.lo(), e.key.hi());
        // view edges keep `u` on the low endpoint
        for (node, own, other) in [(e.key.lo(), lu, lv), (e.key.hi(), lv, lu)] {
            let entry = report.nodes.entry(node).or_insert_with(|| LinkageEntry {
                cluster: own,
                foreign_clusters: Vec::new(),
                bridges: Vec::new(),
            });
            if !entry.foreign_clusters.contains(&other) {
                entry.foreign_clusters.push(other);
            }
            entry.bridges.push(pair);
        }
    }
    for entry in report.nodes.values_mut() {
        entry.foreign_clusters.sort_unstable();
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OverlayRow {
    pub a: usize,
    pub b: usize,
    pub members: Vec<NodeId>,
    /// The whole `a` cluster lies inside the `b` cluster.
    pub a_within_b: bool,
    pub b_within_a: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OverlayReport {
    pub a_clusters: Vec<Vec<NodeId>>,
    pub b_clusters: Vec<Vec<NodeId>>,
    pub rows: Vec<OverlayRow>,
    /// Nodes whose cluster in `a` and cluster in `b` have different members.
    pub overlap_nodes: Vec<NodeId>,
}

/// Intersects the clusters of two partitions. Nodes present in only one of
/// them are treated as singletons in the other.
pub fn overlay(pa: &Partition, pb: &Partition) -> OverlayReport {
    let universe: BTreeSet<NodeId> = pa.clusters().iter().chain(pb.clusters()).flatten().copied().collect();
    let complete = |p: &Partition| -> Vec<Vec<NodeId>> {
        let mut clusters = p.clusters().to_vec();
        let covered: BTreeSet<NodeId> = clusters.iter().flatten().copied().collect();
        clusters.extend(universe.difference(&covered).map(|n| vec![*n]));
        clusters
    };
    let (ac, bc) = (complete(pa), complete(pb));
    let index = |clusters: &[Vec<NodeId>]| -> BTreeMap<NodeId, usize> {
        clusters.iter().enumerate().flat_map(|(i, c)| c.iter().map(move |n| (*n, i))).collect()
    };
    let (ai, bi) = (index(&ac), index(&bc));

    let mut cells: BTreeMap<(usize, usize), Vec<NodeId>> = BTreeMap::new();
    for n in &universe {
        cells.entry((ai[n], bi[n])).or_default().push(*n);
    }
    let rows = cells
        .into_iter()
        .map(|((a, b), members)| OverlayRow {
            a,
            b,
            a_within_b: members.len() == ac[a].len(),
            b_within_a: members.len() == bc[b].len(),
            members,
        })
        .collect();
    let overlap_nodes = universe.iter().filter(|n| ac[ai[n]] != bc[bi[n]]).copied().collect();
    OverlayReport { a_clusters: ac, b_clusters: bc, rows, overlap_nodes }
}

/// Effect of one applied event on one edge, kept for merge detection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeChange {
    pub tick: Tick,
    pub key: EdgeKey,
    pub before: Option<Vec<u64>>,
    pub after: Option<Vec<u64>>,
}

impl EdgeChange {
    /// Describes what `event` does to an edge of `prev`; `None` for node events.
    pub fn observe(prev: &GraphSnapshot, event: &UpdateEvent) -> Option<EdgeChange> {
        let key = match &event.kind {
            EventKind::AddNode { .. } => return None,
            EventKind::AddEdge(edge) => edge.key,
            EventKind::UpdateEdgeWeight { key, .. } | EventKind::RemoveEdge(key) => *key,
        };
        let before = prev.weights(&key).map(<[u64]>::to_vec);
        let after = match &event.kind {
            EventKind::AddEdge(edge) => Some(edge.weights.clone()),
            EventKind::UpdateEdgeWeight { attr, value, .. } => before.clone().and_then(|mut w| {
                *w.get_mut(*attr)? = *value;
                w.iter().any(|x| *x > 0).then_some(w)
            }),
            _ => None,
        };
        Some(EdgeChange { tick: event.tick, key, before, after })
    }

    /// True when the aggregated weight seen through `view` went up.
    pub fn strengthens(&self, view: &AttributeView) -> bool {
        let agg = |w: &Option<Vec<u64>>| w.as_ref().map_or(0, |w| view.aggregation().apply(w, view.attrs()));
        agg(&self.after) > agg(&self.before)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MergeSignal {
    pub source: usize,
    pub target: usize,
    pub target_noa: NodeId,
    pub witnesses: BTreeSet<NodeId>,
    pub window: (Tick, Tick),
    pub strength: usize,
}

/// Flags cluster pairs `(source, target)` where at least `theta` distinct
/// source members gained or strengthened a direct edge to the target's NoA
/// within the last `window` ticks (ending at the view's snapshot tick).
pub fn merge_signals(
    changes: &[EdgeChange],
    partition: &Partition,
    view: &AttributeView,
    theta: usize,
    window: Tick,
) -> Result<Vec<MergeSignal>> {
    if theta == 0 || window == 0 {
        return Err(Error::ConfigInvalid("merge theta and window must both be at least 1".into()));
    }
    ensure_current(partition, view)?;
    let now = view.base().tick();
    let start = (now + 1).saturating_sub(window);
    let membership = partition.membership();
    let noas = all_noas(partition, view)?;
    let noa_cluster: BTreeMap<NodeId, usize> = noas.iter().enumerate().map(|(i, a)| (a.node, i)).collect();

    let mut witnesses: BTreeMap<(usize, usize), BTreeSet<NodeId>> = BTreeMap::new();
    for change in changes.iter().filter(|c| c.tick >= start && c.tick <= now && c.strengthens(view)) {
        for (member, noa) in [(change.key.lo(), change.key.hi()), (change.key.hi(), change.key.lo())] {
            let (Some(&target), Some(&source)) = (noa_cluster.get(&noa), membership.get(&member)) else {
                continue;
            };
            if source != target {
                witnesses.entry((source, target)).or_default().insert(member);
            }
        }
    }
    Ok(witnesses
        .into_iter()
        .filter(|(_, w)| w.len() >= theta)
        .map(|((source, target), w)| MergeSignal {
            source,
            target,
            target_noa: noas[target].node,
            strength: w.len(),
            witnesses: w,
            window: (start, now),
        })
        .collect())
}
