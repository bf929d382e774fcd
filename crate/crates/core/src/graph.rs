//! Multi-attribute weighted interaction graph.
//!
//! A [`GraphSnapshot`] is an immutable, versioned, undirected simple graph in
//! which every edge carries one non-negative weight per attribute of its
//! [`AttributeSchema`]. Mutations go through [`GraphSnapshot::apply_event`],
//! which returns a successor snapshot and leaves the receiver untouched.
//! Clustering always works on an [`AttributeView`]: the projection of a
//! snapshot onto a subset of attributes, where an edge is active iff its
//! aggregated weight is positive.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::Partition;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for NodeId {
    fn from(id: u32) -> Self {
        NodeId(id)
    }
}

/// Unordered node pair identifying an undirected edge. `(a, b)` and `(b, a)`
/// produce the same key.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeKey {
    lo: NodeId,
    hi: NodeId,
}

impl EdgeKey {
    pub fn new(a: impl Into<NodeId>, b: impl Into<NodeId>) -> Result<Self> {
        let (a, b) = (a.into(), b.into());
        if a == b {
            return Err(Error::SelfLoop(a));
        }
        Ok(if a < b { EdgeKey { lo: a, hi: b } } else { EdgeKey { lo: b, hi: a } })
    }

    /// Panicking constructor for literals in tests and fixtures.
    pub fn pair(a: u32, b: u32) -> Self {
        Self::new(a, b).expect("self-loop edge key")
    }

    pub fn lo(&self) -> NodeId {
        self.lo
    }

    pub fn hi(&self) -> NodeId {
        self.hi
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.lo == node || self.hi == node
    }

    /// The endpoint opposite `node`, if `node` is an endpoint.
    pub fn other(&self, node: NodeId) -> Option<NodeId> {
        if node == self.lo {
            Some(self.hi)
        } else if node == self.hi {
            Some(self.lo)
        } else {
            None
        }
    }
}

impl fmt::Display for EdgeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.lo, self.hi)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttributeSchema {
    names: Vec<String>,
}

impl AttributeSchema {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::Schema("at least one attribute is required".into()));
        }
        let mut seen = HashSet::new();
        for name in &names {
            if name.is_empty() {
                return Err(Error::Schema("empty attribute name".into()));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::Schema(format!("duplicate attribute `{name}`")));
            }
        }
        Ok(AttributeSchema { names })
    }

    pub fn arity(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names.iter().position(|n| n == name).ok_or_else(|| Error::UnknownAttribute(name.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub key: EdgeKey,
    pub weights: Vec<u64>,
}

impl Edge {
    pub fn new(a: impl Into<NodeId>, b: impl Into<NodeId>, weights: Vec<u64>) -> Result<Self> {
        Ok(Edge { key: EdgeKey::new(a, b)?, weights })
    }
}

/// Maps external node labels to ids. Numeric labels are their own id; other
/// labels ("X", "Y") are registered here with an allocated id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NameTable {
    by_label: BTreeMap<String, NodeId>,
    by_id: BTreeMap<NodeId, String>,
}

impl NameTable {
    pub fn resolve(&self, label: &str) -> Option<NodeId> {
        match label.parse::<u32>() {
            Ok(id) => Some(NodeId(id)),
            Err(_) => self.by_label.get(label).copied(),
        }
    }

    pub fn insert(&mut self, label: impl Into<String>, id: NodeId) {
        let label = label.into();
        self.by_id.insert(id, label.clone());
        self.by_label.insert(label, id);
    }

    /// Named label of `id`, if it has one.
    pub fn name_of(&self, id: NodeId) -> Option<&str> {
        self.by_id.get(&id).map(String::as_str)
    }

    /// Display label: the registered name or the numeric id.
    pub fn label(&self, id: NodeId) -> String {
        self.name_of(id).map_or_else(|| id.to_string(), str::to_string)
    }

    pub fn is_empty(&self) -> bool {
        self.by_id.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, &str)> {
        self.by_id.iter().map(|(id, name)| (*id, name.as_str()))
    }
}

pub type Tick = u64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EventKind {
    AddNode { node: NodeId, label: Option<String> },
    AddEdge(Edge),
    UpdateEdgeWeight { key: EdgeKey, attr: usize, value: u64 },
    RemoveEdge(EdgeKey),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpdateEvent {
    pub tick: Tick,
    pub kind: EventKind,
}

impl UpdateEvent {
    pub fn new(tick: Tick, kind: EventKind) -> Self {
        UpdateEvent { tick, kind }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphSnapshot {
    schema: Arc<AttributeSchema>,
    nodes: BTreeSet<NodeId>,
    edges: BTreeMap<EdgeKey, Vec<u64>>,
    names: NameTable,
    version: u64,
    tick: Tick,
}

impl GraphSnapshot {
    pub fn empty(schema: AttributeSchema) -> Self {
        GraphSnapshot {
            schema: Arc::new(schema),
            nodes: BTreeSet::new(),
            edges: BTreeMap::new(),
            names: NameTable::default(),
            version: 0,
            tick: 0,
        }
    }

    /// Builds version 0 from a node set and edge list, validating every edge.
    pub fn from_parts(
        schema: AttributeSchema,
        nodes: impl IntoIterator<Item = NodeId>,
        edges: impl IntoIterator<Item = Edge>,
        names: NameTable,
    ) -> Result<Self> {
        let mut g = GraphSnapshot::empty(schema);
        g.names = names;
        g.nodes.extend(nodes);
        for edge in edges {
            g.check_new_edge(&edge)?;
            g.edges.insert(edge.key, edge.weights);
        }
        Ok(g)
    }

    pub fn schema(&self) -> &AttributeSchema {
        &self.schema
    }

    pub fn nodes(&self) -> &BTreeSet<NodeId> {
        &self.nodes
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeKey, &[u64])> + '_ {
        self.edges.iter().map(|(k, w)| (*k, w.as_slice()))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn weights(&self, key: &EdgeKey) -> Option<&[u64]> {
        self.edges.get(key).map(Vec::as_slice)
    }

    pub fn names(&self) -> &NameTable {
        &self.names
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn tick(&self) -> Tick {
        self.tick
    }

    pub fn contains_node(&self, node: NodeId) -> bool {
        self.nodes.contains(&node)
    }

    /// Same nodes, edges, weights and names; version and tick are ignored.
    pub fn same_content(&self, other: &GraphSnapshot) -> bool {
        self.schema == other.schema
            && self.nodes == other.nodes
            && self.edges == other.edges
            && self.names == other.names
    }

    /// Smallest id strictly above every id in use.
    pub fn next_free_id(&self) -> NodeId {
        let max = self.nodes.iter().next_back().map_or(0, |n| n.0 + 1);
        let named = self.names.by_id.keys().next_back().map_or(0, |n| n.0 + 1);
        NodeId(max.max(named))
    }

    fn check_new_edge(&self, edge: &Edge) -> Result<()> {
        for end in [edge.key.lo, edge.key.hi] {
            if !self.nodes.contains(&end) {
                return Err(Error::UnknownNode(end));
            }
        }
        if self.edges.contains_key(&edge.key) {
            return Err(Error::DuplicateEdge(edge.key));
        }
        if edge.weights.len() != self.schema.arity() {
            return Err(Error::ArityMismatch {
                edge: edge.key,
                expected: self.schema.arity(),
                got: edge.weights.len(),
            });
        }
        if edge.weights.iter().all(|w| *w == 0) {
            return Err(Error::ZeroEdge(edge.key));
        }
        Ok(())
    }

    /// Returns the successor snapshot with `event` applied and the version
    /// bumped by one.
    pub fn apply_event(&self, event: &UpdateEvent) -> Result<GraphSnapshot> {
        if event.tick < self.tick {
            return Err(Error::TickOrder { tick: event.tick, previous: self.tick });
        }
        let mut next = self.clone();
        match &event.kind {
            EventKind::AddNode { node, label } => {
                if !next.nodes.insert(*node) {
                    return Err(Error::DuplicateNode(*node));
                }
                if let Some(label) = label {
                    next.names.insert(label.clone(), *node);
                }
            }
            EventKind::AddEdge(edge) => {
                next.check_new_edge(edge)?;
                next.edges.insert(edge.key, edge.weights.clone());
            }
            EventKind::UpdateEdgeWeight { key, attr, value } => {
                if *attr >= self.schema.arity() {
                    return Err(Error::UnknownAttribute(format!("#{attr}")));
                }
                let weights = next.edges.get_mut(key).ok_or(Error::UnknownEdge(*key))?;
                weights[*attr] = *value;
                if weights.iter().all(|w| *w == 0) {
                    next.edges.remove(key);
                }
            }
            EventKind::RemoveEdge(key) => {
                if next.edges.remove(key).is_none() {
                    return Err(Error::UnknownEdge(*key));
                }
            }
        }
        next.version = self.version + 1;
        next.tick = event.tick;
        Ok(next)
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    #[default]
    Sum,
    Max,
}

impl Aggregation {
    pub fn apply(self, weights: &[u64], attrs: &[usize]) -> u64 {
        let picked = attrs.iter().map(|&a| weights[a]);
        match self {
            Aggregation::Sum => picked.sum(),
            Aggregation::Max => picked.max().unwrap_or(0),
        }
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct Degree {
    pub edge_count: usize,
    pub total_weight: u64,
}

#[derive(Clone, Debug)]
pub struct ViewEdge {
    pub key: EdgeKey,
    pub u: u32,
    pub v: u32,
    pub weight: u64,
}

/// Projection of a snapshot onto a non-empty attribute subset.
///
/// Nodes are held in ascending id order and addressed internally by their
/// dense index in that order; edges are held in ascending key order.
#[derive(Clone, Debug)]
pub struct AttributeView {
    base: Arc<GraphSnapshot>,
    attrs: Vec<usize>,
    aggregation: Aggregation,
    nodes: Vec<NodeId>,
    index: HashMap<NodeId, u32>,
    edges: Vec<ViewEdge>,
    edge_index: HashMap<EdgeKey, u32>,
    adjacency: Vec<Vec<(u32, u32)>>,
    total_weight: u64,
}

impl AttributeView {
    pub fn new(base: Arc<GraphSnapshot>, attrs: Vec<usize>, aggregation: Aggregation) -> Result<Self> {
        if attrs.is_empty() {
            return Err(Error::EmptyView);
        }
        let arity = base.schema().arity();
        if let Some(bad) = attrs.iter().find(|a| **a >= arity) {
            return Err(Error::UnknownAttribute(format!("#{bad}")));
        }
        let mut attrs = attrs;
        attrs.sort_unstable();
        attrs.dedup();

        let mut touched = HashSet::new();
        let mut active = Vec::new();
        for (key, weights) in base.edges() {
            touched.insert(key.lo);
            touched.insert(key.hi);
            let w = aggregation.apply(weights, &attrs);
            if w > 0 {
                active.push((key, w));
            }
        }
        let mut node_set: BTreeSet<NodeId> = base.nodes().iter().filter(|n| !touched.contains(n)).copied().collect();
        for (key, _) in &active {
            node_set.insert(key.lo);
            node_set.insert(key.hi);
        }
        let nodes: Vec<NodeId> = node_set.into_iter().collect();
        let index: HashMap<NodeId, u32> = nodes.iter().enumerate().map(|(i, n)| (*n, i as u32)).collect();

        let mut adjacency = vec![Vec::new(); nodes.len()];
        let mut edges = Vec::with_capacity(active.len());
        let mut edge_index = HashMap::with_capacity(active.len());
        let mut total_weight = 0;
        for (i, (key, weight)) in active.into_iter().enumerate() {
            let (u, v) = (index[&key.lo], index[&key.hi]);
            adjacency[u as usize].push((v, i as u32));
            adjacency[v as usize].push((u, i as u32));
            edge_index.insert(key, i as u32);
            edges.push(ViewEdge { key, u, v, weight });
            total_weight += weight;
        }
        Ok(AttributeView { base, attrs, aggregation, nodes, index, edges, edge_index, adjacency, total_weight })
    }

    /// View over attributes selected by name.
    pub fn by_names<S: AsRef<str>>(base: Arc<GraphSnapshot>, names: &[S], aggregation: Aggregation) -> Result<Self> {
        let attrs = names.iter().map(|n| base.schema().index_of(n.as_ref())).collect::<Result<Vec<_>>>()?;
        Self::new(base, attrs, aggregation)
    }

    /// Same attribute selection over a different snapshot.
    pub fn rebase(&self, base: Arc<GraphSnapshot>) -> Result<Self> {
        Self::new(base, self.attrs.clone(), self.aggregation)
    }

    pub fn base(&self) -> &Arc<GraphSnapshot> {
        &self.base
    }

    pub fn version(&self) -> u64 {
        self.base.version()
    }

    pub fn attrs(&self) -> &[usize] {
        &self.attrs
    }

    pub fn attr_names(&self) -> Vec<String> {
        self.attrs.iter().map(|a| self.base.schema().names()[*a].clone()).collect()
    }

    pub fn aggregation(&self) -> Aggregation {
        self.aggregation
    }

    /// Active nodes in ascending id order.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn index_of(&self, node: NodeId) -> Option<usize> {
        self.index.get(&node).map(|i| *i as usize)
    }

    pub fn contains_node(&self, node: NodeId) -> bool {
        self.index.contains_key(&node)
    }

    /// Active edges in ascending key order.
    pub fn edges(&self) -> &[ViewEdge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_position(&self, key: &EdgeKey) -> Option<usize> {
        self.edge_index.get(key).map(|i| *i as usize)
    }

    pub fn is_active(&self, key: &EdgeKey) -> bool {
        self.edge_index.contains_key(key)
    }

    /// Aggregated weight of an active edge.
    pub fn weight(&self, key: &EdgeKey) -> Option<u64> {
        self.edge_position(key).map(|i| self.edges[i].weight)
    }

    pub fn total_weight(&self) -> u64 {
        self.total_weight
    }

    /// `(neighbour index, edge position)` pairs of the node at dense index `idx`.
    pub fn neighbours(&self, idx: usize) -> &[(u32, u32)] {
        &self.adjacency[idx]
    }

    /// Number and total aggregated weight of the active edges at `node`,
    /// optionally restricted to edges whose other endpoint is in `within`.
    pub fn weighted_degree(&self, node: NodeId, within: Option<&BTreeSet<NodeId>>) -> Result<Degree> {
        let idx = self.index_of(node).ok_or(Error::UnknownNode(node))?;
        let mut degree = Degree::default();
        for &(nbr, e) in &self.adjacency[idx] {
            if within.is_none_or(|set| set.contains(&self.nodes[nbr as usize])) {
                degree.edge_count += 1;
                degree.total_weight += self.edges[e as usize].weight;
            }
        }
        Ok(degree)
    }

    /// Maximal connected components after deleting `removed` from the active
    /// edges. Every pair in `removed` must be active in this view.
    pub fn connected_components<'a, I>(&self, removed: I) -> Result<Partition>
    where
        I: IntoIterator<Item = &'a EdgeKey>,
    {
        let mut cut = vec![false; self.edges.len()];
        for key in removed {
            let pos = self.edge_position(key).ok_or(Error::ForeignEdge(*key))?;
            cut[pos] = true;
        }
        Ok(Partition::from_labels(self, &self.component_labels(&cut)))
    }

    /// Component label per dense node index, for an edge mask where `true`
    /// marks a deleted edge.
    pub(crate) fn component_labels(&self, cut: &[bool]) -> Vec<u32> {
        let mut sets = DisjointSets::new(self.nodes.len());
        for (e, edge) in self.edges.iter().enumerate() {
            if !cut[e] {
                sets.union(edge.u as usize, edge.v as usize);
            }
        }
        (0..self.nodes.len()).map(|i| sets.find(i) as u32).collect()
    }
}

/// Union-find with path halving and union by size.
struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}
