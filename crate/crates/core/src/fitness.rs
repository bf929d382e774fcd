//! Partition quality.
//!
//! `total = closeness_mean − lambda_cut · cut_fraction − mu_small · small_count / clusters`
//!
//! * closeness of a cluster is its tie density: the share of member pairs
//!   joined by an active edge, `2·E_in / (|C|·(|C|−1))`, and 0 for singletons;
//! * cut_fraction is the share of the view's total aggregated weight that
//!   falls on edges between clusters;
//! * small_count is the number of clusters with fewer than `sigma_small` members.
//!
//! Edge counts reward clusters with many internal ties, while the interaction
//! weights decide which ties are expensive to cut. Higher is better.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AttributeView, NodeId};
use crate::partition::Partition;

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitnessParams {
    pub lambda_cut: f64,
    pub mu_small: f64,
    pub sigma_small: usize,
}

impl Default for FitnessParams {
    fn default() -> Self {
        FitnessParams { lambda_cut: 4.0, mu_small: 0.5, sigma_small: 2 }
    }
}

impl FitnessParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("lambda_cut", self.lambda_cut), ("mu_small", self.mu_small)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::ConfigInvalid(format!("{name} must be finite and non-negative, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitnessValue {
    pub total: f64,
    pub closeness_mean: f64,
    pub cut_fraction: f64,
    pub small_count: usize,
}

fn density(size: usize, internal_edges: usize) -> f64 {
    if size < 2 {
        0.0
    } else {
        2.0 * internal_edges as f64 / (size as f64 * (size as f64 - 1.0))
    }
}

/// Tie density of `cluster` in `view`.
pub fn closeness(cluster: &[NodeId], view: &AttributeView) -> Result<f64> {
    if cluster.is_empty() {
        return Err(Error::EmptyCluster);
    }
    let mut member = vec![false; view.node_count()];
    for n in cluster {
        let idx = view.index_of(*n).ok_or(Error::UnknownNode(*n))?;
        member[idx] = true;
    }
    let size = member.iter().filter(|m| **m).count();
    let internal = view.edges().iter().filter(|e| member[e.u as usize] && member[e.v as usize]).count();
    Ok(density(size, internal))
}

/// Scores `partition` against the live `view`. The partition must have been
/// decoded against the same snapshot version.
pub fn fitness(partition: &Partition, view: &AttributeView, params: &FitnessParams) -> Result<FitnessValue> {
    if partition.source_version() != view.version() {
        return Err(Error::StaleSnapshot { partition: partition.source_version(), live: view.version() });
    }
    if partition.is_empty() {
        return Err(Error::EmptyPartition);
    }
    let labels = partition
        .dense_labels(view)
        .filter(|_| partition.node_count() == view.node_count())
        .ok_or_else(|| Error::InvalidPartition("clusters do not cover the view's active nodes exactly".into()))?;
    Ok(score_labels(view, &labels, partition.len(), params))
}

/// Fitness of a dense labelling whose labels are exactly `0..cluster_count`.
pub(crate) fn score_labels(
    view: &AttributeView,
    labels: &[u32],
    cluster_count: usize,
    params: &FitnessParams,
) -> FitnessValue {
    let mut size = vec![0usize; cluster_count];
    let mut ties = vec![0usize; cluster_count];
    for l in labels {
        size[*l as usize] += 1;
    }
    let mut internal_weight = 0u64;
    for e in view.edges() {
        let (lu, lv) = (labels[e.u as usize], labels[e.v as usize]);
        if lu == lv {
            ties[lu as usize] += 1;
            internal_weight += e.weight;
        }
    }
    let closeness_sum: f64 = size.iter().zip(&ties).map(|(s, t)| density(*s, *t)).sum();
    let closeness_mean = closeness_sum / cluster_count as f64;
    let total_weight = view.total_weight();
    let cut_fraction =
        if total_weight == 0 { 0.0 } else { (total_weight - internal_weight) as f64 / total_weight as f64 };
    let small_count = size.iter().filter(|s| **s < params.sigma_small).count();
    let total = closeness_mean
        - params.lambda_cut * cut_fraction
        - params.mu_small * (small_count as f64 / cluster_count as f64);
    FitnessValue { total, closeness_mean, cut_fraction, small_count }
}
