//! Graph generation, experiment batches, reports, and broadcast by
//! reduction to leader election.

pub mod experiment;
pub mod generators;
pub mod reduction;
pub mod report;

pub use experiment::{run_experiment, ExperimentConfig, GraphSource, ResultRecord};
pub use generators::{generate_graph, two_copies, GraphKind};
pub use reduction::{bc_from_le, BroadcastOutcome};
pub use report::{emit_report, Format};
