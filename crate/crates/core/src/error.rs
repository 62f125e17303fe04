use std::path::PathBuf;

use crate::graph::VertexId;
use crate::partition::PartitionId;
use crate::path::PathId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("self-loop at vertex {vertex} is not allowed")]
    SelfLoop { vertex: u64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("generator cannot satisfy request: {0}")]
    Unsatisfiable(String),

    #[error("graph is not Eulerian: {0}")]
    NotEulerian(String),

    #[error("partition {partition}: vertex {vertex} has odd total degree")]
    OddDegree {
        partition: PartitionId,
        vertex: VertexId,
    },

    #[error("vertex {vertex} is not in partition {partition}")]
    UnknownVertex {
        partition: PartitionId,
        vertex: VertexId,
    },

    #[error("structural inconsistency: {0}")]
    Structural(String),

    #[error("internal cycle shares no vertex with any recorded entry")]
    NoIntersection,

    #[error("level {level}, partition {partition}: {source}")]
    AtPartition {
        level: usize,
        partition: PartitionId,
        #[source]
        source: Box<Error>,
    },

    #[error("unroll left {} entries unconsumed (first: {:?})", .0.len(), .0.first())]
    Coverage(Vec<PathId>),

    #[error("spill storage: {0}")]
    Spill(String),

    #[error("run fingerprints differ: {0} vs {1}")]
    FingerprintMismatch(String, String),

    #[error("malformed metrics: {0}")]
    Metrics(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn at(self, level: usize, partition: PartitionId) -> Self {
        Error::AtPartition {
            level,
            partition,
            source: Box::new(self),
        }
    }

    /// Short machine-readable tag used in structured CLI errors.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
            Error::SelfLoop { .. } => "self_loop",
            Error::InvalidConfig(_) => "invalid_config",
            Error::Unsatisfiable(_) => "unsatisfiable",
            Error::NotEulerian(_) | Error::OddDegree { .. } => "not_eulerian",
            Error::UnknownVertex { .. } => "unknown_vertex",
            Error::Structural(_) | Error::NoIntersection => "structural",
            Error::AtPartition { source, .. } => source.kind(),
            Error::Coverage(_) => "coverage",
            Error::Spill(_) => "spill",
            Error::FingerprintMismatch(..) => "fingerprint_mismatch",
            Error::Metrics(_) => "metrics",
        }
    }

    /// Process exit code: 2 for validation failures, 3 for structural errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::AtPartition { source, .. } => source.exit_code(),
            Error::Parse { .. }
            | Error::SelfLoop { .. }
            | Error::InvalidConfig(_)
            | Error::Unsatisfiable(_)
            | Error::NotEulerian(_)
            | Error::OddDegree { .. }
            | Error::Metrics(_)
            | Error::FingerprintMismatch(..) => 2,
            _ => 3,
        }
    }
}
