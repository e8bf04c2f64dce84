use serde::{Deserialize, Serialize};

use super::{EdgeId, EdgeKey, Graph, GraphError, Path};

/// Summary of the last relaxed LP solved while building a plan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpCertificate {
    pub objective: f64,
    pub integral: bool,
}

/// An edge-removal plan protecting a target path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutPlan {
    pub method: String,
    /// Sorted canonical keys of the edges to remove.
    pub removed_edges: Vec<EdgeKey>,
    pub total_cost: f64,
    pub protected_path: Path,
    pub iterations: usize,
    pub constraints_generated: usize,
    pub rounding_retries: usize,
    pub rng_seed: Option<u64>,
    /// Relaxed LP of the final round (LP-driven methods only).
    pub final_lp: Option<LpCertificate>,
    /// Length of the best competitor left after the cut; `None` if no other
    /// path survives.
    pub runner_up_length: Option<f64>,
    /// Whether `total_cost` fits the configured budget, when one was given.
    pub within_budget: Option<bool>,
}

impl CutPlan {
    pub(crate) fn from_ids(
        g: &Graph,
        method: impl Into<String>,
        ids: &[EdgeId],
        protected_path: Path,
    ) -> Self {
        let mut removed_edges: Vec<EdgeKey> = ids.iter().map(|&id| g.edge(id).key).collect();
        removed_edges.sort_unstable();
        removed_edges.dedup();
        let total_cost = removed_edges
            .iter()
            .map(|k| g.edge_between(k.lo, k.hi).unwrap().cost)
            .fold(0.0, |a, c| a + c);
        CutPlan {
            method: method.into(),
            removed_edges,
            total_cost,
            protected_path,
            iterations: 0,
            constraints_generated: 0,
            rounding_retries: 0,
            rng_seed: None,
            final_lp: None,
            runner_up_length: None,
            within_budget: None,
        }
    }

    /// The graph left after applying the plan.
    pub fn residual(&self, g: &Graph) -> Result<Graph, GraphError> {
        g.remove_edges(&self.removed_edges)
    }

    /// Removal mask over `g`'s edge ids.
    pub fn removal_mask(&self, g: &Graph) -> Result<Vec<bool>, GraphError> {
        let mut mask = vec![false; g.edge_count()];
        for k in &self.removed_edges {
            let id = g
                .edge_id(k.lo, k.hi)
                .ok_or(GraphError::MissingEdge(k.lo, k.hi))?;
            mask[id] = true;
        }
        Ok(mask)
    }

    /// Recomputes the cost from `g`.
    pub fn cost_under(&self, g: &Graph) -> Result<f64, GraphError> {
        self.removed_edges.iter().try_fold(0.0, |acc, k| {
            g.edge_between(k.lo, k.hi)
                .map(|e| acc + e.cost)
                .ok_or(GraphError::MissingEdge(k.lo, k.hi))
        })
    }

    /// True when no removed edge lies on the protected path.
    pub fn spares_protected_path(&self) -> bool {
        self.protected_path.nodes().windows(2).all(|w| {
            self.removed_edges
                .binary_search(&EdgeKey::new(w[0], w[1]))
                .is_err()
        })
    }
}
