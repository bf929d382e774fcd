//! Community detection on multi-attribute interaction graphs with a
//! steady-state genetic algorithm, plus node-of-attraction (NoA) tracking as
//! the graph changes.
//!
//! A [`GraphSnapshot`] holds nodes and edges carrying one weight per
//! interaction attribute. An [`AttributeView`] selects the attributes of
//! interest; the GA in [`ga`] searches for the [`Partition`] of the view that
//! maximises [`fitness::fitness`], and [`analysis`] reports each cluster's
//! NoA, the nodes linking clusters, and merge signals from graph events.

pub mod analysis;
pub mod encoding;
pub mod error;
pub mod fitness;
pub mod fixtures;
pub mod ga;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod partition;

pub use analysis::{find_noa, linkage_nodes, merge_signals, overlay, EdgeChange, NoaHistory, NoaRecord};
pub use encoding::{Chromosome, EdgeRemovalChromosome, InitParams, Scheme, SeparatorChromosome};
pub use error::{Error, Result};
pub use fitness::{fitness, FitnessParams, FitnessValue};
pub use ga::{run, Checkpoint, GaConfig, GaState, RunOutcome};
pub use graph::{
    Aggregation, AttributeSchema, AttributeView, Edge, EdgeKey, EventKind, GraphSnapshot, NodeId, Tick, UpdateEvent,
};
pub use oracle::optimal_partition;
pub use partition::Partition;
