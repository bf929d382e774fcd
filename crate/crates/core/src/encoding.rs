//! Chromosome encodings and their decoders.
//!
//! Two schemes are supported:
//!
//! * [`EdgeRemovalChromosome`]: a variable-length list of active edges to
//!   delete; the clusters are the connected components of what remains.
//!   Any components-of-a-subgraph partition is expressible.
//! * [`SeparatorChromosome`]: a group count `k` plus `k − 1` cut positions
//!   over the ascending-id node list; clusters are the contiguous runs
//!   between cuts. Only partitions into id-contiguous runs are expressible.

use std::collections::HashSet;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AttributeView, EdgeKey};
use crate::partition::Partition;

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    #[default]
    EdgeRemoval,
    Separator,
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "edge-removal" | "1" => Ok(Scheme::EdgeRemoval),
            "separator" | "2" => Ok(Scheme::Separator),
            other => Err(format!("unknown scheme `{other}` (expected edge-removal or separator)")),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeRemovalChromosome {
    pub removed: Vec<EdgeKey>,
}

impl EdgeRemovalChromosome {
    pub fn new(removed: Vec<EdgeKey>) -> Self {
        EdgeRemovalChromosome { removed }
    }

    /// No duplicate keys and every key active in `view`.
    pub fn is_repaired(&self, view: &AttributeView) -> bool {
        let mut seen = HashSet::with_capacity(self.removed.len());
        self.removed.iter().all(|k| view.is_active(k) && seen.insert(*k))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatorChromosome {
    pub k: usize,
    pub separators: Vec<usize>,
}

impl SeparatorChromosome {
    pub fn new(k: usize, separators: Vec<usize>) -> Self {
        SeparatorChromosome { k, separators }
    }

    pub fn is_repaired(&self, n: usize) -> bool {
        self.k == self.separators.len() + 1
            && self.separators.windows(2).all(|w| w[0] < w[1])
            && self.separators.iter().all(|s| *s >= 1 && *s < n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Chromosome {
    EdgeRemoval(EdgeRemovalChromosome),
    Separator(SeparatorChromosome),
}

impl Chromosome {
    pub fn scheme(&self) -> Scheme {
        match self {
            Chromosome::EdgeRemoval(_) => Scheme::EdgeRemoval,
            Chromosome::Separator(_) => Scheme::Separator,
        }
    }

    pub fn is_repaired(&self, view: &AttributeView) -> bool {
        match self {
            Chromosome::EdgeRemoval(c) => c.is_repaired(view),
            Chromosome::Separator(c) => c.is_repaired(view.node_count()),
        }
    }

    pub fn repair(&self, view: &AttributeView) -> Chromosome {
        match self {
            Chromosome::EdgeRemoval(c) => Chromosome::EdgeRemoval(repair_edge_removal(c, view)),
            Chromosome::Separator(c) => Chromosome::Separator(repair_separator(c, view.node_count())),
        }
    }

    pub fn decode(&self, view: &AttributeView) -> Result<Partition> {
        let (labels, _) = self.decode_labels(view)?;
        Ok(Partition::from_labels(view, &labels))
    }

    /// Dense cluster label per view node, labels numbered `0..k` in order of
    /// first appearance, plus `k`.
    pub(crate) fn decode_labels(&self, view: &AttributeView) -> Result<(Vec<u32>, usize)> {
        match self {
            Chromosome::EdgeRemoval(c) => edge_removal_labels(c, view),
            Chromosome::Separator(c) => separator_labels(c, view.node_count()),
        }
    }
}

fn edge_removal_labels(chrom: &EdgeRemovalChromosome, view: &AttributeView) -> Result<(Vec<u32>, usize)> {
    let mut cut = vec![false; view.edge_count()];
    for key in &chrom.removed {
        let pos =
            view.edge_position(key).ok_or_else(|| Error::UnrepairedChromosome(format!("edge {key} is not active")))?;
        if std::mem::replace(&mut cut[pos], true) {
            return Err(Error::UnrepairedChromosome(format!("edge {key} listed twice")));
        }
    }
    let roots = view.component_labels(&cut);
    Ok(compact(&roots))
}

fn separator_labels(chrom: &SeparatorChromosome, n: usize) -> Result<(Vec<u32>, usize)> {
    if !chrom.is_repaired(n) {
        return Err(Error::UnrepairedChromosome(format!(
            "k={} separators={:?} for {n} nodes",
            chrom.k, chrom.separators
        )));
    }
    let mut labels = Vec::with_capacity(n);
    let mut cuts = chrom.separators.iter().peekable();
    let mut group = 0u32;
    for pos in 0..n {
        if cuts.peek().is_some_and(|c| **c == pos) {
            cuts.next();
            group += 1;
        }
        labels.push(group);
    }
    let k = if n == 0 { 0 } else { group as usize + 1 };
    Ok((labels, k))
}

/// Renumbers arbitrary labels to `0..k` by first appearance.
fn compact(raw: &[u32]) -> (Vec<u32>, usize) {
    let mut map = std::collections::HashMap::new();
    let labels = raw
        .iter()
        .map(|r| {
            let next = map.len() as u32;
            *map.entry(*r).or_insert(next)
        })
        .collect();
    (labels, map.len())
}

pub fn decode_edge_removal(chrom: &EdgeRemovalChromosome, view: &AttributeView) -> Result<Partition> {
    let (labels, _) = edge_removal_labels(chrom, view)?;
    Ok(Partition::from_labels(view, &labels))
}

/// Drops repeated keys (first occurrence wins) and keys that are not active
/// in `view`, preserving order.
pub fn repair_edge_removal(chrom: &EdgeRemovalChromosome, view: &AttributeView) -> EdgeRemovalChromosome {
    let mut seen = HashSet::with_capacity(chrom.removed.len());
    let removed = chrom.removed.iter().filter(|k| view.is_active(k) && seen.insert(**k)).copied().collect();
    EdgeRemovalChromosome { removed }
}

pub fn decode_separator(chrom: &SeparatorChromosome, view: &AttributeView) -> Result<Partition> {
    let (labels, _) = separator_labels(chrom, view.node_count())?;
    Ok(Partition::from_labels(view, &labels))
}

/// Clamps cuts into `[1, n−1]`, sorts and dedups them, and resets `k` to the
/// cut count plus one.
pub fn repair_separator(chrom: &SeparatorChromosome, n: usize) -> SeparatorChromosome {
    let mut separators: Vec<usize> =
        if n < 2 { Vec::new() } else { chrom.separators.iter().map(|s| (*s).clamp(1, n - 1)).collect() };
    separators.sort_unstable();
    separators.dedup();
    SeparatorChromosome { k: separators.len() + 1, separators }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitParams {
    /// Probability that an active edge starts in a removal list.
    pub p_init: f64,
    /// Upper bound on the initial group count of separator chromosomes.
    pub k_max: usize,
}

impl Default for InitParams {
    fn default() -> Self {
        InitParams { p_init: 0.1, k_max: 32 }
    }
}

pub fn random_chromosome<R: Rng + ?Sized>(
    view: &AttributeView,
    scheme: Scheme,
    init: &InitParams,
    rng: &mut R,
) -> Chromosome {
    match scheme {
        Scheme::EdgeRemoval => {
            let removed = view.edges().iter().filter(|_| rng.gen_bool(init.p_init)).map(|e| e.key).collect();
            Chromosome::EdgeRemoval(EdgeRemovalChromosome { removed })
        }
        Scheme::Separator => {
            let n = view.node_count();
            let k_hi = n.min(init.k_max).max(1);
            let k = rng.gen_range(1..=k_hi);
            let separators =
                if n < 2 { Vec::new() } else { index::sample(rng, n - 1, k - 1).into_iter().map(|i| i + 1).collect() };
            Chromosome::Separator(repair_separator(&SeparatorChromosome { k, separators }, n))
        }
    }
}
