//! Force Path Cut: remove a cheapest set of edges so that a chosen path
//! becomes the unique shortest path between its endpoints.
//!
//! The attack alternates between a path oracle (the shortest competitor of
//! the target path in the residual graph) and a path cover solver, either
//! greedy weighted set cover or an LP relaxation with randomized rounding.

pub mod attack;
pub mod cover;
pub mod generators;
pub mod graph;
pub mod harness;
pub mod lp;
pub mod paths;
pub mod reduction;

pub use attack::{run, AttackConfig, AttackError, Method};
pub use cover::{greedy_path_cover, lp_path_cover, CoverError, RoundedCover};
pub use generators::{assign_weights, generate, Family, GeneratorSpec, WeightKind, WeightScheme};
pub use graph::{
    path_length, shortest_path, CutPlan, Edge, EdgeKey, Graph, GraphError, NodeId, Path,
    Restriction, LENGTH_TOL,
};
pub use harness::{run_experiments, ExperimentConfig, ExperimentRecord, HarnessError};
pub use lp::{is_integral, solve_relaxed, LPSolution, LpError, LpStatus, RelaxedCutLP};
pub use paths::{k_shortest_paths, next_shortest_excluding, PathIterator};
