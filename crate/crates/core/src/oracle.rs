//! Exhaustive reference solver for small graphs.

use crate::error::{Error, Result};
use crate::fitness::{score_labels, FitnessParams, FitnessValue};
use crate::graph::{AttributeView, NodeId};
use crate::partition::Partition;

/// Largest node count the oracle accepts. Bell(10) = 115 975.
pub const MAX_NODES: usize = 10;

/// Every set partition of `0..n` as a restricted growth string: `a[0] = 0`
/// and `a[i] <= 1 + max(a[..i])`.
#[derive(Clone, Debug)]
pub struct PartitionIterator {
    labels: Vec<u32>,
    // running prefix maximum, prefix_max[i] = max(labels[..=i])
    prefix_max: Vec<u32>,
    done: bool,
}

impl PartitionIterator {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_NODES {
            return Err(Error::TooLarge { n, max: MAX_NODES });
        }
        Ok(PartitionIterator { labels: vec![0; n], prefix_max: vec![0; n], done: false })
    }
}

impl Iterator for PartitionIterator {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if self.done {
            return None;
        }
        let out = self.labels.clone();
        let n = self.labels.len();
        // advance the rightmost position that can still grow, reset the rest
        let mut i = n;
        loop {
            if i <= 1 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.labels[i] <= self.prefix_max[i - 1] {
                self.labels[i] += 1;
                self.prefix_max[i] = self.prefix_max[i - 1].max(self.labels[i]);
                for j in i + 1..n {
                    self.labels[j] = 0;
                    self.prefix_max[j] = self.prefix_max[i];
                }
                break;
            }
        }
        Some(out)
    }
}

/// All partitions of `nodes` (at most [`MAX_NODES`]).
pub fn enumerate_partitions(nodes: &[NodeId]) -> Result<Vec<Vec<Vec<NodeId>>>> {
    Ok(PartitionIterator::new(nodes.len())?
        .map(|labels| {
            let k = labels.iter().max().map_or(0, |m| *m as usize + 1);
            let mut groups = vec![Vec::new(); k];
            for (node, l) in nodes.iter().zip(&labels) {
                groups[*l as usize].push(*node);
            }
            groups
        })
        .collect())
}

/// Global optimum of the fitness over every partition of the view's nodes.
/// Ties go to fewer clusters, then to the lexicographically smallest
/// canonical partition.
pub fn optimal_partition(view: &AttributeView, params: &FitnessParams) -> Result<(Partition, FitnessValue)> {
    params.validate()?;
    let n = view.node_count();
    if n == 0 {
        return Err(Error::EmptyView);
    }
    let mut best: Option<(Partition, FitnessValue)> = None;
    for labels in PartitionIterator::new(n)? {
        let k = *labels.iter().max().expect("n > 0") as usize + 1;
        let value = score_labels(view, &labels, k, params);
        let better = match &best {
            None => true,
            Some((_, v)) if value.total != v.total => value.total > v.total,
            Some((p, _)) if k != p.len() => k < p.len(),
            Some((p, _)) => Partition::from_labels(view, &labels).clusters() < p.clusters(),
        };
        if better {
            best = Some((Partition::from_labels(view, &labels), value));
        }
    }
    Ok(best.expect("at least one partition"))
}
