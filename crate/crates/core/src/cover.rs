//! Path cover subroutines: pick edges so that every generated path loses at
//! least one edge. Paths are the universe, edges are the sets.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{EdgeId, Graph, GraphError, Path, LENGTH_TOL};
use crate::lp::{protected_mask, solve_relaxed, LPSolution, LpError, LpStatus, RelaxedCutLP};

/// Rounding gives up after this many draws.
pub const MAX_ROUNDING_ATTEMPTS: usize = 64;

/// Values this close to 0 or 1 are snapped before rounding.
const SNAP_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoverError {
    #[error("path {0} has no edge off the protected path")]
    Uncuttable(usize),
    #[error("relaxed cut LP is infeasible")]
    Infeasible,
    #[error("randomized rounding failed {attempts} times (fractional cost {})", fractional.objective)]
    RetryCapExceeded {
        attempts: usize,
        fractional: Box<LPSolution>,
    },
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// The cuttable edges of each path (edges of `p_star` dropped).
pub fn cuttable_rows(
    g: &Graph,
    p_star: &Path,
    paths: &[Path],
) -> Result<Vec<Vec<EdgeId>>, CoverError> {
    let on_star = protected_mask(g, p_star)?;
    paths
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let row: Vec<EdgeId> = p
                .edge_ids(g)?
                .into_iter()
                .filter(|&e| !on_star[e])
                .collect();
            if row.is_empty() {
                Err(CoverError::Uncuttable(i))
            } else {
                Ok(row)
            }
        })
        .collect()
}

#[derive(Clone, Copy, PartialEq)]
struct HeapEntry {
    free: bool,
    ratio: f64,
    edge: EdgeId,
    count: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.free
            .cmp(&other.free)
            .then_with(|| self.ratio.total_cmp(&other.ratio))
            .then_with(|| other.edge.cmp(&self.edge))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Bookkeeping for the greedy cover: which live paths run through each edge
/// and which live edges each path still has.
///
/// Only edges that occur on some path ever get table entries.
#[derive(Debug, Default)]
pub struct CoverState {
    paths_of_edge: HashMap<EdgeId, HashSet<usize>>,
    edges_of_path: Vec<Vec<EdgeId>>,
    live_count: HashMap<EdgeId, usize>,
}

impl CoverState {
    pub fn new(rows: &[Vec<EdgeId>]) -> Self {
        let mut state = CoverState {
            edges_of_path: Vec::with_capacity(rows.len()),
            ..Default::default()
        };
        for (p, row) in rows.iter().enumerate() {
            let mut edges = row.clone();
            edges.sort_unstable();
            edges.dedup();
            for &e in &edges {
                state.paths_of_edge.entry(e).or_default().insert(p);
                *state.live_count.entry(e).or_insert(0) += 1;
            }
            state.edges_of_path.push(edges);
        }
        state
    }

    pub fn live_count(&self, e: EdgeId) -> usize {
        self.live_count.get(&e).copied().unwrap_or(0)
    }

    /// Removes every path through `e`; returns the edges whose counts dropped.
    fn cut(&mut self, e: EdgeId) -> Vec<EdgeId> {
        let mut touched = Vec::new();
        let paths: Vec<usize> = self
            .paths_of_edge
            .get_mut(&e)
            .map(|s| s.drain().collect())
            .unwrap_or_default();
        for p in paths {
            for e1 in std::mem::take(&mut self.edges_of_path[p]) {
                *self.live_count.get_mut(&e1).unwrap() -= 1;
                if e1 != e {
                    self.paths_of_edge.get_mut(&e1).unwrap().remove(&p);
                    touched.push(e1);
                }
            }
        }
        touched
    }

    /// Table consistency, used by tests.
    pub fn is_consistent(&self) -> bool {
        let counts_match = self
            .live_count
            .iter()
            .all(|(e, &n)| self.paths_of_edge.get(e).map_or(0, HashSet::len) == n);
        let symmetric = self
            .paths_of_edge
            .iter()
            .all(|(e, ps)| ps.iter().all(|&p| self.edges_of_path[p].contains(e)))
            && self.edges_of_path.iter().enumerate().all(|(p, es)| {
                es.iter()
                    .all(|e| self.paths_of_edge.get(e).is_some_and(|s| s.contains(&p)))
            });
        counts_match && symmetric
    }
}

/// Greedy weighted set cover over pre-filtered rows.
///
/// Repeatedly takes the edge with the most live paths per unit cost. Free
/// edges go first; ties fall to the smallest edge id (= smallest key).
pub fn greedy_cover_rows(g: &Graph, rows: &[Vec<EdgeId>]) -> Vec<EdgeId> {
    let mut state = CoverState::new(rows);
    let entry = |e: EdgeId, count: usize| {
        let c = g.cost(e);
        HeapEntry {
            free: c == 0.0,
            ratio: if c == 0.0 { 0.0 } else { count as f64 / c },
            edge: e,
            count,
        }
    };
    let mut heap: BinaryHeap<HeapEntry> = state
        .live_count
        .iter()
        .map(|(&e, &n)| entry(e, n))
        .collect();
    let mut chosen = Vec::new();
    while let Some(top) = heap.pop() {
        let current = state.live_count(top.edge);
        if current == 0 || current != top.count {
            continue;
        }
        chosen.push(top.edge);
        let mut touched = state.cut(top.edge);
        touched.sort_unstable();
        touched.dedup();
        for e in touched {
            let n = state.live_count(e);
            if n > 0 {
                heap.push(entry(e, n));
            }
        }
    }
    debug_assert!(state.live_count.values().all(|&n| n == 0));
    chosen
}

/// GreedyPathCover: a cut hitting every path in `paths`, never touching `p_star`.
pub fn greedy_path_cover(
    g: &Graph,
    p_star: &Path,
    paths: &[Path],
) -> Result<Vec<EdgeId>, CoverError> {
    let rows = cuttable_rows(g, p_star, paths)?;
    Ok(greedy_cover_rows(g, &rows))
}

/// Result of rounding a fractional cut.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundedCover {
    pub edges: Vec<EdgeId>,
    /// Number of draws made, including the accepted one.
    pub attempts: usize,
    pub relaxed: LPSolution,
    /// `4 ln(4|P|)` times the fractional cost.
    pub cost_bound: f64,
}

impl RoundedCover {
    pub fn retries(&self) -> usize {
        self.attempts - 1
    }
}

/// Number of Bernoulli draws per edge for `paths` constraints.
pub fn rounding_draws(paths: usize) -> usize {
    (4.0 * paths as f64).ln().ceil() as usize
}

/// Approximation factor `4 ln(4|P|)` guarded by the rounding loop.
pub fn rounding_factor(paths: usize) -> f64 {
    4.0 * (4.0 * paths as f64).ln()
}

/// Randomized rounding of an optimal relaxed solution.
///
/// Each variable is drawn `ceil(ln 4|P|)` times with its fractional value as
/// probability and kept if any draw hits. Draws that leave a row uncovered or
/// cost more than `4 ln(4|P|)` times the fractional optimum are redrawn.
pub fn round_relaxed<R: Rng>(
    lp: &RelaxedCutLP,
    sol: &LPSolution,
    rng: &mut R,
) -> Result<RoundedCover, CoverError> {
    let rows = lp.rows();
    let n_paths = rows.len().max(1);
    let draws = rounding_draws(n_paths);
    let cost_bound = rounding_factor(n_paths) * sol.objective;
    let probs: Vec<f64> = sol
        .values
        .iter()
        .map(|&x| {
            if x <= SNAP_TOL {
                0.0
            } else if x >= 1.0 - SNAP_TOL {
                1.0
            } else {
                x
            }
        })
        .collect();
    let mut picked = vec![false; probs.len()];
    for attempt in 1..=MAX_ROUNDING_ATTEMPTS {
        for (j, &prob) in probs.iter().enumerate() {
            picked[j] = prob > 0.0 && (0..draws).any(|_| rng.random::<f64>() < prob);
        }
        let covered = rows.iter().all(|r| r.iter().any(|&v| picked[v]));
        let cost: f64 = lp
            .costs()
            .iter()
            .zip(&picked)
            .filter(|(_, &p)| p)
            .map(|(c, _)| c)
            .sum();
        if covered && cost <= cost_bound + LENGTH_TOL {
            let edges = (0..picked.len())
                .filter(|&j| picked[j])
                .map(|j| lp.edge(j))
                .collect();
            return Ok(RoundedCover {
                edges,
                attempts: attempt,
                relaxed: sol.clone(),
                cost_bound,
            });
        }
    }
    Err(CoverError::RetryCapExceeded {
        attempts: MAX_ROUNDING_ATTEMPTS,
        fractional: Box::new(sol.clone()),
    })
}

/// LP-PathCover: solve the relaxation over `paths`, then round it.
pub fn lp_path_cover(
    g: &Graph,
    p_star: &Path,
    paths: &[Path],
    rng_seed: u64,
) -> Result<RoundedCover, CoverError> {
    let lp = RelaxedCutLP::for_paths(g, p_star, paths).map_err(|e| match e {
        LpError::Uncuttable(i) => CoverError::Uncuttable(i),
        other => other.into(),
    })?;
    let sol = solve_relaxed(&lp)?;
    if sol.status == LpStatus::Infeasible {
        return Err(CoverError::Infeasible);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    round_relaxed(&lp, &sol, &mut rng)
}
