//! Seeded synthetic graphs and edge-weight schemes.
//!
//! Generated graphs carry unit weights and costs; [`assign_weights`] replaces
//! them. All randomness comes from one `ChaCha8Rng` seeded per call.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, NodeId};

/// Default stochastic Kronecker initiator `[[a, b], [b, c]]`.
pub const KRONECKER_INITIATOR: [[f64; 2]; 2] = [[0.9, 0.5], [0.5, 0.1]];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeneratorError {
    #[error("invalid generator parameter: {0}")]
    Invalid(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, GeneratorError> {
    Err(GeneratorError::Invalid(msg.into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    /// Erdős–Rényi `G(n, p)`.
    Er {
        n: usize,
        p: f64,
    },
    /// Barabási–Albert preferential attachment, `m` edges per arriving node.
    Ba {
        n: usize,
        m: usize,
    },
    /// Stochastic Kronecker graph on `2^iterations` nodes whose expected
    /// edge count is `density * C(n, 2)`.
    Kronecker {
        iterations: u32,
        density: f64,
        #[serde(default = "default_initiator")]
        initiator: [[f64; 2]; 2],
    },
    Lattice {
        rows: usize,
        cols: usize,
    },
    Complete {
        n: usize,
    },
}

fn default_initiator() -> [[f64; 2]; 2] {
    KRONECKER_INITIATOR
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default)]
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(family: Family, seed: u64) -> Self {
        GeneratorSpec { family, seed }
    }

    pub fn validate(&self) -> Result<(), GeneratorError> {
        match self.family {
            Family::Er { n, p } => {
                if n == 0 {
                    return invalid("er needs n >= 1");
                }
                if !(0.0..=1.0).contains(&p) {
                    return invalid(format!("er probability {p} outside [0, 1]"));
                }
            }
            Family::Ba { n, m } => {
                if m == 0 || n < m {
                    return invalid(format!("ba needs 1 <= m <= n, got n={n}, m={m}"));
                }
            }
            Family::Kronecker {
                iterations,
                density,
                initiator,
            } => {
                if iterations == 0 || iterations > 20 {
                    return invalid(format!("kronecker iterations {iterations} outside 1..=20"));
                }
                if !(density > 0.0 && density <= 1.0) {
                    return invalid(format!("kronecker density {density} outside (0, 1]"));
                }
                let flat = initiator.iter().flatten();
                if initiator[0][1] != initiator[1][0]
                    || flat.clone().any(|x| !x.is_finite() || *x < 0.0)
                    || flat.sum::<f64>() == 0.0
                {
                    return invalid(
                        "kronecker initiator must be symmetric, non-negative, non-zero",
                    );
                }
            }
            Family::Lattice { rows, cols } => {
                if rows == 0 || cols == 0 {
                    return invalid("lattice needs positive rows and cols");
                }
            }
            Family::Complete { n } => {
                if n == 0 {
                    return invalid("complete needs n >= 1");
                }
            }
        }
        Ok(())
    }
}

/// Builds the graph described by `spec`, with unit weights and costs.
pub fn generate(spec: &GeneratorSpec) -> Result<Graph, GeneratorError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (n, pairs) = match spec.family {
        Family::Er { n, p } => (n, erdos_renyi(n, p, &mut rng)),
        Family::Ba { n, m } => (n, barabasi_albert(n, m, &mut rng)),
        Family::Kronecker {
            iterations,
            density,
            initiator,
        } => (
            1usize << iterations,
            kronecker(iterations, density, initiator, &mut rng),
        ),
        Family::Lattice { rows, cols } => (rows * cols, lattice(rows, cols)),
        Family::Complete { n } => (n, complete(n)),
    };
    Ok(Graph::with_costs_as_weights(
        n,
        pairs.into_iter().map(|(u, v)| (u, v, 1.0)),
    )?)
}

/// Pairs `u < v` in row-major order, visiting only the successes via
/// geometric skips.
fn erdos_renyi<R: Rng>(n: usize, p: f64, rng: &mut R) -> Vec<(NodeId, NodeId)> {
    if p <= 0.0 || n < 2 {
        return Vec::new();
    }
    if p >= 1.0 {
        return complete(n);
    }
    let log_q = (1.0 - p).ln();
    let mut out = Vec::new();
    let (mut v, mut w): (usize, i64) = (1, -1);
    while v < n {
        let r: f64 = rng.random();
        let skip = ((1.0 - r).ln() / log_q).floor() as i64;
        w = w.saturating_add(skip).saturating_add(1);
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            out.push((w as usize, v));
        }
    }
    out
}

fn barabasi_albert<R: Rng>(n: usize, m: usize, rng: &mut R) -> Vec<(NodeId, NodeId)> {
    let mut out = complete(m);
    // node u appears deg(u) times
    let mut repeated: Vec<NodeId> = out.iter().flat_map(|&(u, v)| [u, v]).collect();
    for v in m..n {
        let mut targets: Vec<NodeId> = Vec::with_capacity(m);
        while targets.len() < m {
            let u = if repeated.is_empty() {
                rng.random_range(0..v)
            } else {
                repeated[rng.random_range(0..repeated.len())]
            };
            if !targets.contains(&u) {
                targets.push(u);
            }
        }
        for u in targets {
            out.push((u, v));
            repeated.push(u);
            repeated.push(v);
        }
    }
    out
}

/// Expected edge count `sum_{u<v} P(u, v)` of an unscaled Kronecker graph.
pub fn kronecker_expected_edges(initiator: [[f64; 2]; 2], iterations: u32) -> f64 {
    let [[a, b], [_, c]] = initiator;
    let k = iterations as i32;
    ((a + 2.0 * b + c).powi(k) - (a + c).powi(k)) / 2.0
}

fn kronecker<R: Rng>(
    iterations: u32,
    density: f64,
    initiator: [[f64; 2]; 2],
    rng: &mut R,
) -> Vec<(NodeId, NodeId)> {
    let n = 1usize << iterations;
    let pairs = (n * (n - 1) / 2) as f64;
    let scale = density * pairs / kronecker_expected_edges(initiator, iterations);
    let mut out = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let mut p = scale;
            for bit in 0..iterations {
                p *= initiator[(u >> bit) & 1][(v >> bit) & 1];
            }
            if rng.random::<f64>() < p {
                out.push((u, v));
            }
        }
    }
    out
}

fn lattice(rows: usize, cols: usize) -> Vec<(NodeId, NodeId)> {
    let mut out = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let id = r * cols + c;
            if c + 1 < cols {
                out.push((id, id + 1));
            }
            if r + 1 < rows {
                out.push((id, id + cols));
            }
        }
    }
    out
}

fn complete(n: usize) -> Vec<(NodeId, NodeId)> {
    (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WeightKind {
    /// `1 + Poisson(rate)`.
    Poisson {
        #[serde(default = "default_rate")]
        rate: f64,
    },
    /// Integers uniform on `1..=upper`.
    Uniform {
        #[serde(default = "default_upper")]
        upper: u32,
    },
    Equal {
        #[serde(default = "default_value")]
        value: f64,
    },
}

fn default_rate() -> f64 {
    20.0
}

fn default_upper() -> u32 {
    41
}

fn default_value() -> f64 {
    1.0
}

impl WeightKind {
    pub fn poisson() -> Self {
        WeightKind::Poisson {
            rate: default_rate(),
        }
    }

    pub fn uniform() -> Self {
        WeightKind::Uniform {
            upper: default_upper(),
        }
    }

    pub fn equal() -> Self {
        WeightKind::Equal {
            value: default_value(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            WeightKind::Poisson { .. } => "poisson",
            WeightKind::Uniform { .. } => "uniform",
            WeightKind::Equal { .. } => "equal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightScheme {
    #[serde(flatten)]
    pub kind: WeightKind,
    #[serde(default)]
    pub seed: u64,
}

impl WeightScheme {
    pub fn new(kind: WeightKind, seed: u64) -> Self {
        WeightScheme { kind, seed }
    }
}

/// Draws an independent weight per edge (in edge-key order) and sets each
/// cost equal to its weight.
pub fn assign_weights(g: &Graph, scheme: &WeightScheme) -> Result<Graph, GeneratorError> {
    let mut rng = ChaCha8Rng::seed_from_u64(scheme.seed);
    match scheme.kind {
        WeightKind::Poisson { rate } => {
            let dist = Poisson::new(rate)
                .map_err(|e| GeneratorError::Invalid(format!("poisson rate {rate}: {e}")))?;
            Ok(g.map_edges(|_| {
                let w = 1.0 + dist.sample(&mut rng);
                (w, w)
            })?)
        }
        WeightKind::Uniform { upper } => {
            if upper == 0 {
                return invalid("uniform upper bound must be >= 1");
            }
            Ok(g.map_edges(|_| {
                let w = rng.random_range(1..=upper) as f64;
                (w, w)
            })?)
        }
        WeightKind::Equal { value } => {
            if !(value.is_finite() && value > 0.0) {
                return invalid(format!("equal weight {value} must be positive"));
            }
            Ok(g.map_edges(|_| (value, value))?)
        }
    }
}
