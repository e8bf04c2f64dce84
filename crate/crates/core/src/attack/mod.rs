//! Force Path Cut attacks: the constraint-generation loop over a path cover
//! subroutine, and two greedy baselines.

mod baselines;
mod eigen;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cover::{greedy_cover_rows, round_relaxed, CoverError};
use crate::graph::{
    not_longer, CutPlan, EdgeId, Graph, GraphError, LpCertificate, Path, Restriction, LENGTH_TOL,
};
use crate::lp::{
    is_integral, protected_mask, CoverSimplex, LPSolution, LpError, LpStatus, Outcome,
    RelaxedCutLP, INTEGRALITY_TOL,
};
use crate::paths::next_shortest_excluding_restricted;

pub use baselines::{greedy_cost, greedy_eigenscore};
pub use eigen::{eigenscores, principal_eigenvector, principal_eigenvector_masked};

/// Defaults for [`principal_eigenvector`] as used by the eigenscore baseline.
pub const EIGEN_TOL: f64 = 1e-9;
pub const EIGEN_MAX_ITER: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    PathattackLp,
    PathattackGreedy,
    GreedyCost,
    GreedyEigenscore,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::PathattackLp,
        Method::PathattackGreedy,
        Method::GreedyCost,
        Method::GreedyEigenscore,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::PathattackLp => "pathattack-lp",
            Method::PathattackGreedy => "pathattack-greedy",
            Method::GreedyCost => "greedy-cost",
            Method::GreedyEigenscore => "greedy-eigenscore",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("unknown method `{0}` (expected pathattack-lp, pathattack-greedy, greedy-cost or greedy-eigenscore)")]
pub struct UnknownMethod(pub String);

impl FromStr for Method {
    type Err = UnknownMethod;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| UnknownMethod(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackConfig {
    pub method: Method,
    pub rng_seed: u64,
    /// Only compared with the final cost.
    pub budget: Option<f64>,
    /// Defaults to `10 * M`.
    pub iteration_cap: Option<usize>,
    /// Recompute eigenscores on the residual graph after every cut.
    pub recompute_eigenscores: bool,
}

impl AttackConfig {
    pub fn new(method: Method) -> Self {
        AttackConfig {
            method,
            rng_seed: 0,
            budget: None,
            iteration_cap: None,
            recompute_eigenscores: false,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub(crate) fn cap_for(&self, g: &Graph) -> usize {
        self.iteration_cap.unwrap_or(10 * g.edge_count()).max(1)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AttackError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("iteration cap {cap} reached with {} edges removed", partial.removed_edges.len())]
    IterationCap { cap: usize, partial: Box<CutPlan> },
    #[error("power iteration did not converge in {iterations} steps (residual {residual:e})")]
    EigenNonConvergence { iterations: usize, residual: f64 },
    #[error("the relaxed cut LP became infeasible")]
    Infeasible,
}

/// Runs `cfg.method` against `p_star`.
pub fn run(g: &Graph, p_star: &Path, cfg: &AttackConfig) -> Result<CutPlan, AttackError> {
    let mut plan = match cfg.method {
        Method::PathattackLp | Method::PathattackGreedy => pathattack(g, p_star, cfg)?,
        Method::GreedyCost => greedy_cost(g, p_star, cfg)?,
        Method::GreedyEigenscore => greedy_eigenscore(g, p_star, cfg)?,
    };
    plan.within_budget = cfg.budget.map(|b| plan.total_cost <= b + LENGTH_TOL);
    Ok(plan)
}

/// Rebuilds `p_star` against `g`, rejecting anything but a simple path
/// between two distinct nodes.
pub(crate) fn checked_target(g: &Graph, p_star: &Path) -> Result<Path, GraphError> {
    let p = Path::new(g, p_star.nodes().to_vec())?;
    if p.source() == p.target() {
        return Err(GraphError::SameEndpoints(p.source()));
    }
    Ok(p)
}

/// Shortest competitor of `p_star` once `removed` is cut, if it still
/// violates exclusivity. `Err` carries the surviving runner-up length.
pub(crate) fn violated(
    g: &Graph,
    p_star: &Path,
    removed: &[bool],
) -> Result<Result<Path, Option<f64>>, GraphError> {
    let competitor = next_shortest_excluding_restricted(
        g,
        p_star.source(),
        p_star.target(),
        p_star,
        Restriction::without_edges(removed),
    )?;
    Ok(match competitor {
        Some(p) if not_longer(p.length(), p_star.length()) => Ok(p),
        other => Err(other.map(|p| p.length())),
    })
}

fn mask_of(g: &Graph, ids: &[EdgeId]) -> Vec<bool> {
    let mut mask = vec![false; g.edge_count()];
    for &id in ids {
        mask[id] = true;
    }
    mask
}

/// Incremental relaxed LP: the bookkeeping copy used for rounding plus the
/// warm-started solver.
struct LpState {
    lp: RelaxedCutLP,
    var_of: Vec<Option<usize>>,
    simplex: CoverSimplex,
}

impl LpState {
    fn new(g: &Graph, p_star: &Path) -> Result<Self, AttackError> {
        let lp = RelaxedCutLP::for_paths(g, p_star, &[])?;
        let mut var_of = vec![None; g.edge_count()];
        for j in 0..lp.variable_count() {
            var_of[lp.edge(j)] = Some(j);
        }
        Ok(LpState {
            lp,
            var_of,
            simplex: CoverSimplex::new(),
        })
    }

    fn add_path(&mut self, row: &[EdgeId]) -> Result<(), AttackError> {
        let vars: Vec<usize> = row.iter().filter_map(|&e| self.var_of[e]).collect();
        self.lp.add_row(vars.clone())?;
        let costs = self.lp.costs();
        self.simplex.add_row(&vars, |v| costs[v]);
        Ok(())
    }

    fn solve(&mut self) -> Result<LPSolution, AttackError> {
        if self.simplex.solve()? == Outcome::Infeasible {
            return Err(AttackError::Infeasible);
        }
        let mut values = vec![0.0; self.lp.variable_count()];
        for (var, x) in self.simplex.values()? {
            values[var] = x;
        }
        Ok(LPSolution {
            objective: self.lp.objective(&values),
            values,
            status: LpStatus::Optimal,
        })
    }
}

/// Constraint generation: ask the oracle for the shortest competitor of
/// `p_star` in the residual graph, add it to the path set while it is not
/// strictly longer, and re-solve the path cover from scratch each round.
pub fn pathattack(g: &Graph, p_star: &Path, cfg: &AttackConfig) -> Result<CutPlan, AttackError> {
    pathattack_with_paths(g, p_star, cfg).map(|(plan, _)| plan)
}

/// As [`pathattack`], also returning the generated competitor paths in
/// order of discovery.
pub fn pathattack_with_paths(
    g: &Graph,
    p_star: &Path,
    cfg: &AttackConfig,
) -> Result<(CutPlan, Vec<Path>), AttackError> {
    let p_star = checked_target(g, p_star)?;
    // anything but the LP variant runs the greedy cover
    let use_lp = cfg.method == Method::PathattackLp;
    let method = if use_lp {
        Method::PathattackLp
    } else {
        Method::PathattackGreedy
    };
    let cap = cfg.cap_for(g);
    let on_star = protected_mask(g, &p_star)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut lp_state = if use_lp {
        Some(LpState::new(g, &p_star)?)
    } else {
        None
    };
    let mut rows: Vec<Vec<EdgeId>> = Vec::new();
    let mut found: Vec<Path> = Vec::new();
    let mut cut: Vec<EdgeId> = Vec::new();
    let mut removed = vec![false; g.edge_count()];
    let mut retries = 0;
    let mut last_lp: Option<LPSolution> = None;

    let finish = |cut: &[EdgeId],
                  rows: usize,
                  retries: usize,
                  last_lp: &Option<LPSolution>,
                  runner_up: Option<f64>| {
        let mut plan = CutPlan::from_ids(g, method.name(), cut, p_star.clone());
        plan.iterations = rows;
        plan.constraints_generated = rows;
        plan.runner_up_length = runner_up;
        if use_lp {
            plan.rounding_retries = retries;
            plan.rng_seed = Some(cfg.rng_seed);
            plan.final_lp = Some(match last_lp {
                Some(sol) => LpCertificate {
                    objective: sol.objective,
                    integral: is_integral(sol, INTEGRALITY_TOL),
                },
                None => LpCertificate {
                    objective: 0.0,
                    integral: true,
                },
            });
        }
        plan
    };

    loop {
        let competitor = match violated(g, &p_star, &removed)? {
            Ok(p) => p,
            Err(runner_up) => {
                let plan = finish(&cut, rows.len(), retries, &last_lp, runner_up);
                debug_assert!(plan.spares_protected_path());
                return Ok((plan, found));
            }
        };
        if rows.len() == cap {
            let partial = finish(
                &cut,
                rows.len(),
                retries,
                &last_lp,
                Some(competitor.length()),
            );
            return Err(AttackError::IterationCap {
                cap,
                partial: Box::new(partial),
            });
        }
        log::trace!("constraint {}: {:?}", rows.len(), competitor.nodes());
        let row: Vec<EdgeId> = competitor
            .edge_ids(g)?
            .into_iter()
            .filter(|&e| !on_star[e])
            .collect();
        if row.is_empty() {
            return Err(CoverError::Uncuttable(rows.len()).into());
        }
        rows.push(row);
        found.push(competitor);
        cut = match lp_state.as_mut() {
            Some(state) => {
                state.add_path(rows.last().unwrap())?;
                let sol = state.solve()?;
                let rounded = round_relaxed(&state.lp, &sol, &mut rng)?;
                retries += rounded.retries();
                last_lp = Some(sol);
                rounded.edges
            }
            None => greedy_cover_rows(g, &rows),
        };
        removed = mask_of(g, &cut);
    }
}
