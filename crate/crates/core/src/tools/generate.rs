use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};

pub const DEFAULT_RMAT: [f64; 4] = [0.57, 0.19, 0.19, 0.05];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GeneratorConfig {
    pub vertex_count: usize,
    /// Average undirected degree; the graph gets `round(n * d / 2)` edges.
    pub average_degree: f64,
    pub rmat_probabilities: [f64; 4],
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn new(vertex_count: usize, average_degree: f64, seed: u64) -> Self {
        GeneratorConfig {
            vertex_count,
            average_degree,
            rmat_probabilities: DEFAULT_RMAT,
            seed,
        }
    }

    pub fn edge_target(&self) -> usize {
        (self.vertex_count as f64 * self.average_degree / 2.0).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.rmat_probabilities;
        if p.iter().any(|&x| !(0.0..=1.0).contains(&x)) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "R-MAT probabilities {p:?} must be non-negative and sum to 1"
            )));
        }
        if self.vertex_count < 3 {
            return Err(Error::InvalidConfig("need at least 3 vertices".into()));
        }
        if self.vertex_count > VertexId::MAX as usize {
            return Err(Error::InvalidConfig("vertex count exceeds u32 range".into()));
        }
        if !(self.average_degree >= 2.0) || !self.average_degree.is_finite() {
            return Err(Error::InvalidConfig("average degree must be at least 2".into()));
        }
        Ok(())
    }
}

/// Recursive-quadrant (R-MAT) sampling of a simple undirected graph.
///
/// Samples landing outside `0..n`, self-loops and repeats are discarded and
/// redrawn.
pub fn generate_power_law(cfg: &GeneratorConfig) -> Result<Graph> {
    cfg.validate()?;
    let n = cfg.vertex_count;
    let m = cfg.edge_target();
    let capacity = n * (n - 1) / 2;
    if m > capacity {
        return Err(Error::Unsatisfiable(format!(
            "{m} edges requested but a simple graph on {n} vertices holds at most {capacity}"
        )));
    }
    let scale = usize::BITS - (n - 1).leading_zeros();
    let [a, b, c, _] = cfg.rmat_probabilities;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut seen = HashSet::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    let max_attempts = 200 * m as u64 + 10_000;
    let mut attempts = 0u64;
    while edges.len() < m {
        attempts += 1;
        if attempts > max_attempts {
            return Err(Error::Unsatisfiable(format!(
                "only {} of {m} distinct edges found after {max_attempts} samples",
                edges.len()
            )));
        }
        let (mut u, mut v) = (0usize, 0usize);
        for _ in 0..scale {
            let r: f64 = rng.gen();
            let (du, dv) = if r < a {
                (0, 0)
            } else if r < a + b {
                (0, 1)
            } else if r < a + b + c {
                (1, 0)
            } else {
                (1, 1)
            };
            u = 2 * u + du;
            v = 2 * v + dv;
        }
        if u >= n || v >= n || u == v {
            continue;
        }
        let key = (u.min(v) as VertexId, u.max(v) as VertexId);
        if seen.insert(key) {
            edges.push(key);
        }
    }
    Graph::from_edges(n, &edges)
}
