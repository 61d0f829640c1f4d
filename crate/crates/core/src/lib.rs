//! Seeded simulation of trust-weighted rumor spreading on graphs, with graph
//! generators, spectral and community tools, countermeasures and a replication
//! harness.

pub mod community;
pub mod countermeasures;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod generators;
pub mod graph;
pub mod io;
pub mod spectral;

pub use community::{louvain, modularity, Partition};
pub use countermeasures::Countermeasure;
pub use dynamics::{
    spreads, Color, ColorCounts, Network, ProcessConfig, RunResult, Seeding, Simulation,
};
pub use error::{Error, Result};
pub use experiments::{run_experiment, ExperimentSpec, GraphSource, RunAggregate};
pub use generators::GenSpec;
pub use graph::{Graph, NodeId, NodeSet};
pub use spectral::{estimate_lambda, SpectralEstimate};
