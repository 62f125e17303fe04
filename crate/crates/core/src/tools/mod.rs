//! Input preparation: synthetic power-law graphs, eulerization, partitioning
//! and dataset statistics.

mod eulerize;
mod generate;
mod partitioner;
mod stats;

pub use eulerize::{eulerize, EulerizeReport};
pub use generate::{generate_power_law, GeneratorConfig, DEFAULT_RMAT};
pub use partitioner::partition_graph;
pub use stats::{degree_histogram, DatasetStats};
