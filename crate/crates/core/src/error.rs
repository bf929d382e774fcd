use std::path::PathBuf;

use thiserror::Error;

use crate::graph::{EdgeKey, NodeId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("node {0} already exists")]
    DuplicateNode(NodeId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeKey),
    #[error("edge {0} already exists")]
    DuplicateEdge(EdgeKey),
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("unknown node label `{0}`")]
    UnknownLabel(String),
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("attribute schema: {0}")]
    Schema(String),
    #[error("edge {edge} carries {got} weights, schema arity is {expected}")]
    ArityMismatch { edge: EdgeKey, expected: usize, got: usize },
    #[error("edge {0} has no positive weight")]
    ZeroEdge(EdgeKey),
    #[error("edge {0} is not active in this view")]
    ForeignEdge(EdgeKey),
    #[error("attribute view must select at least one attribute")]
    EmptyView,
    #[error("chromosome is not repaired: {0}")]
    UnrepairedChromosome(String),
    #[error("cluster is empty")]
    EmptyCluster,
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("partition has no clusters")]
    EmptyPartition,
    #[error("partition decoded at version {partition}, live snapshot is version {live}")]
    StaleSnapshot { partition: u64, live: u64 },
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("evaluation budget of {0} is spent")]
    Exhausted(usize),
    #[error("{n} nodes exceeds the enumeration limit of {max}")]
    TooLarge { n: usize, max: usize },
    #[error("event at tick {tick}: {source}")]
    Event {
        tick: u64,
        #[source]
        source: Box<Error>,
    },
    #[error("event ticks must be non-decreasing (tick {tick} after {previous})")]
    TickOrder { tick: u64, previous: u64 },
    #[error("{path}:{line}: {reason}")]
    Parse { path: PathBuf, line: usize, reason: String },
    #[error("{path}:{line}: duplicate edge {edge}")]
    DuplicateRow { path: PathBuf, line: usize, edge: EdgeKey },
    #[error("{0}: {1}")]
    Io(PathBuf, #[source] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, err: std::io::Error) -> Self {
        Error::Io(path.into(), err)
    }
}
