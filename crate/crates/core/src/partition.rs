use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::graph::{AttributeView, NodeId};

/// Disjoint clusters covering a view's active node set.
///
/// Members are sorted within each cluster and clusters are ordered by their
/// smallest member, so two partitions with the same grouping compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    clusters: Vec<Vec<NodeId>>,
    attrs: Vec<String>,
    source_version: u64,
}

impl Partition {
    /// Normalises arbitrary groups into canonical order. Empty groups are dropped.
    pub fn new(clusters: Vec<Vec<NodeId>>, attrs: Vec<String>, source_version: u64) -> Self {
        let mut clusters: Vec<Vec<NodeId>> = clusters
            .into_iter()
            .filter(|c| !c.is_empty())
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        clusters.sort_unstable_by_key(|c| c[0]);
        Partition { clusters, attrs, source_version }
    }

    /// Groups the view's nodes by a per-dense-index label.
    pub fn from_labels(view: &AttributeView, labels: &[u32]) -> Self {
        debug_assert_eq!(labels.len(), view.node_count());
        let mut groups: HashMap<u32, Vec<NodeId>> = HashMap::new();
        // nodes are ascending, so each group comes out sorted
        for (node, label) in view.nodes().iter().zip(labels) {
            groups.entry(*label).or_default().push(*node);
        }
        let mut clusters: Vec<Vec<NodeId>> = groups.into_values().collect();
        clusters.sort_unstable_by_key(|c| c[0]);
        Partition { clusters, attrs: view.attr_names(), source_version: view.version() }
    }

    pub fn clusters(&self) -> &[Vec<NodeId>] {
        &self.clusters
    }

    pub fn attrs(&self) -> &[String] {
        &self.attrs
    }

    pub fn source_version(&self) -> u64 {
        self.source_version
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.clusters.iter().map(Vec::len).sum()
    }

    /// Cluster index of every member.
    pub fn membership(&self) -> BTreeMap<NodeId, usize> {
        self.clusters.iter().enumerate().flat_map(|(i, c)| c.iter().map(move |n| (*n, i))).collect()
    }

    pub fn cluster_of(&self, node: NodeId) -> Option<usize> {
        self.clusters.iter().position(|c| c.binary_search(&node).is_ok())
    }

    pub fn to_ids(&self) -> Vec<Vec<u32>> {
        self.clusters.iter().map(|c| c.iter().map(|n| n.0).collect()).collect()
    }

    /// True when clusters are non-empty, pairwise disjoint and their union is
    /// exactly the view's active node set.
    pub fn is_valid_cover(&self, view: &AttributeView) -> bool {
        let mut seen = BTreeSet::new();
        for c in &self.clusters {
            if c.is_empty() {
                return false;
            }
            for n in c {
                if !seen.insert(*n) {
                    return false;
                }
            }
        }
        seen.len() == view.node_count() && view.nodes().iter().all(|n| seen.contains(n))
    }

    /// Dense cluster label per view node index; `None` when a view node is
    /// not covered.
    pub(crate) fn dense_labels(&self, view: &AttributeView) -> Option<Vec<u32>> {
        let mut labels = vec![u32::MAX; view.node_count()];
        for (i, c) in self.clusters.iter().enumerate() {
            for n in c {
                let idx = view.index_of(*n)?;
                labels[idx] = i as u32;
            }
        }
        labels.iter().all(|l| *l != u32::MAX).then_some(labels)
    }
}
