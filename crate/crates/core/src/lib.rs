//! Euler circuits of large undirected graphs, computed partition by
//! partition.
//!
//! Each partition first reduces its local edges to paths between odd
//! boundary vertices and closed cycles ([`phase1`]). Partitions are then
//! merged pairwise along a static tree ([`planner`], [`runtime`]) with the
//! paths standing in as single coarse edges, until one partition remains.
//! Finally the coarse cycles are expanded back into original edges
//! ([`unroll`]). [`oracle`] is a plain sequential Hierholzer for reference.

pub mod circuit;
pub mod error;
pub mod exec;
pub mod fixtures;
pub mod graph;
pub mod io;
pub mod meta;
pub mod oracle;
pub mod partition;
pub mod path;
pub mod phase1;
pub mod pipeline;
pub mod planner;
pub mod report;
pub mod runtime;
pub mod spill;
pub mod tools;
pub mod unroll;

pub use error::{Error, Result};
