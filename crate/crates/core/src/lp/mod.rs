//! Relaxed cut LP: minimise total removal cost over fractional cut
//! indicators, subject to every generated competitor path being cut.

mod format;
mod simplex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeId, EdgeKey, Graph, GraphError, Path};

pub use format::write_lp;
pub(crate) use simplex::{CoverSimplex, Outcome};

/// Feasibility tolerance on constraint rows.
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Default tolerance for classifying a solution as integral.
pub const INTEGRALITY_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("constraint row {0} is empty")]
    EmptyRow(usize),
    #[error("row {row} references variable {var}, but only {count} exist")]
    VariableOutOfRange {
        row: usize,
        var: usize,
        count: usize,
    },
    #[error("objective coefficient {value} of variable {var} is negative or not finite")]
    BadCost { var: usize, value: f64 },
    #[error("path {0} lies entirely on the protected path and cannot be cut")]
    Uncuttable(usize),
    #[error("simplex hit its iteration limit of {0}")]
    IterationLimit(usize),
    #[error("basis matrix became singular")]
    Singular,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

/// `min c'x` subject to one covering row per path and `0 <= x <= 1`.
///
/// Variable `j` stands for edge `edges[j]`; edges of the protected path get
/// no variable at all.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedCutLP {
    edges: Vec<EdgeId>,
    keys: Vec<Option<EdgeKey>>,
    costs: Vec<f64>,
    rows: Vec<Vec<usize>>,
}

impl RelaxedCutLP {
    /// A bare covering LP; variable `j` is labelled as edge `j`.
    pub fn new(costs: Vec<f64>, rows: Vec<Vec<usize>>) -> Result<Self, LpError> {
        let mut lp = RelaxedCutLP {
            edges: (0..costs.len()).collect(),
            keys: vec![None; costs.len()],
            costs,
            rows: Vec::new(),
        };
        for (var, &value) in lp.costs.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(LpError::BadCost { var, value });
            }
        }
        for row in rows {
            lp.add_row(row)?;
        }
        Ok(lp)
    }

    /// One variable per edge off `p_star`, one row per path in `paths`.
    pub fn for_paths(g: &Graph, p_star: &Path, paths: &[Path]) -> Result<Self, LpError> {
        let on_star = protected_mask(g, p_star)?;
        let mut var_of = vec![usize::MAX; g.edge_count()];
        let mut edges = Vec::new();
        for id in 0..g.edge_count() {
            if !on_star[id] {
                var_of[id] = edges.len();
                edges.push(id);
            }
        }
        let mut lp = RelaxedCutLP {
            keys: edges.iter().map(|&id| Some(g.edge(id).key)).collect(),
            costs: edges.iter().map(|&id| g.cost(id)).collect(),
            edges,
            rows: Vec::new(),
        };
        for (i, p) in paths.iter().enumerate() {
            let row: Vec<usize> = p
                .edge_ids(g)?
                .into_iter()
                .filter(|&id| !on_star[id])
                .map(|id| var_of[id])
                .collect();
            if row.is_empty() {
                return Err(LpError::Uncuttable(i));
            }
            lp.add_row(row)?;
        }
        Ok(lp)
    }

    pub fn add_row(&mut self, mut row: Vec<usize>) -> Result<(), LpError> {
        let idx = self.rows.len();
        if row.is_empty() {
            return Err(LpError::EmptyRow(idx));
        }
        row.sort_unstable();
        row.dedup();
        if let Some(&var) = row.iter().find(|&&v| v >= self.costs.len()) {
            return Err(LpError::VariableOutOfRange {
                row: idx,
                var,
                count: self.costs.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn variable_count(&self) -> usize {
        self.costs.len()
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    /// Edge id behind variable `var`.
    pub fn edge(&self, var: usize) -> EdgeId {
        self.edges[var]
    }

    pub(crate) fn key(&self, var: usize) -> Option<EdgeKey> {
        self.keys[var]
    }

    pub fn objective(&self, values: &[f64]) -> f64 {
        self.costs
            .iter()
            .zip(values)
            .fold(0.0, |a, (c, x)| a + c * x)
    }

    /// Smallest left-hand side over all rows, or `None` without rows.
    pub fn min_row_activity(&self, values: &[f64]) -> Option<f64> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&v| values[v]).sum::<f64>())
            .min_by(f64::total_cmp)
    }
}

pub(crate) fn protected_mask(g: &Graph, p_star: &Path) -> Result<Vec<bool>, GraphError> {
    let mut mask = vec![false; g.edge_count()];
    for id in p_star.edge_ids(g)? {
        mask[id] = true;
    }
    Ok(mask)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LPSolution {
    pub values: Vec<f64>,
    pub objective: f64,
    pub status: LpStatus,
}

/// Solves the relaxation to an optimal basic solution.
pub fn solve_relaxed(lp: &RelaxedCutLP) -> Result<LPSolution, LpError> {
    let mut simplex = CoverSimplex::new();
    for row in &lp.rows {
        simplex.add_row(row, |v| lp.costs[v]);
    }
    let outcome = simplex.solve()?;
    let mut values = vec![0.0; lp.costs.len()];
    if outcome == Outcome::Optimal {
        for (var, x) in simplex.values()? {
            values[var] = x;
        }
    }
    let status = match outcome {
        Outcome::Optimal => LpStatus::Optimal,
        Outcome::Infeasible => LpStatus::Infeasible,
    };
    let objective = lp.objective(&values);
    if status == LpStatus::Optimal {
        debug_assert!(lp
            .min_row_activity(&values)
            .is_none_or(|a| a >= 1.0 - FEASIBILITY_TOL));
    }
    Ok(LPSolution {
        values,
        objective,
        status,
    })
}

/// Every value within `tol` of 0 or 1.
pub fn is_integral(sol: &LPSolution, tol: f64) -> bool {
    sol.values
        .iter()
        .all(|&x| x.abs() <= tol || (x - 1.0).abs() <= tol)
}
