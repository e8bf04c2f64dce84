//! 3-Terminal Cut to Force Path Cut, and exact brute-force solvers for both
//! problems at small scale.

use thiserror::Error;

use crate::attack::{checked_target, violated};
use crate::graph::{CutPlan, Edge, EdgeId, Graph, GraphError, NodeId, Path, LENGTH_TOL};
use crate::lp::protected_mask;

/// Default cap on cuttable (resp. total) edges for the brute-force solvers.
pub const BRUTE_FORCE_LIMIT: usize = 22;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReductionError {
    #[error("terminals {0:?} must be three distinct nodes of the graph")]
    BadTerminals([NodeId; 3]),
    #[error("budget {0} must be finite and non-negative")]
    BadBudget(f64),
    #[error("epsilon {0} must be finite and positive")]
    BadEpsilon(f64),
    #[error("{edges} edges exceed the brute-force limit of {limit}")]
    TooLarge { edges: usize, limit: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TerminalCutInstance {
    /// Weights double as removal costs; the graph's own costs are ignored.
    pub graph: Graph,
    pub budget: f64,
    pub terminals: [NodeId; 3],
}

impl TerminalCutInstance {
    pub fn new(graph: Graph, budget: f64, terminals: [NodeId; 3]) -> Result<Self, ReductionError> {
        let [a, b, c] = terminals;
        let n = graph.node_count();
        if a == b || b == c || a == c || terminals.iter().any(|&x| x >= n) {
            return Err(ReductionError::BadTerminals(terminals));
        }
        if !budget.is_finite() || budget < 0.0 {
            return Err(ReductionError::BadBudget(budget));
        }
        Ok(TerminalCutInstance {
            graph,
            budget,
            terminals,
        })
    }

    pub fn total_weight(&self) -> f64 {
        self.graph.edges().iter().map(|e| e.weight).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForcePathInstance {
    /// Costs equal weights on every edge.
    pub graph: Graph,
    /// The single heavy edge `(s1, s3)`.
    pub p_star: Path,
    /// May be negative, in which case no cut can fit.
    pub budget: f64,
    /// Original edges between terminals, removed up front.
    pub pre_removed: Vec<Edge>,
}

/// Builds the Force Path Cut instance for `inst`.
///
/// Edges between terminals are taken out and replaced by
/// `w(s1,s2) = w(s2,s3) = w_all + 2 eps` and `w(s1,s3) = 2 w_all + 3 eps`,
/// where `w_all` is the total original weight. The budget drops by the
/// weight taken out.
pub fn create_force_path_input(
    inst: &TerminalCutInstance,
    eps: f64,
) -> Result<ForcePathInstance, ReductionError> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(ReductionError::BadEpsilon(eps));
    }
    let [s1, s2, s3] = inst.terminals;
    let is_terminal = |v: NodeId| inst.terminals.contains(&v);
    let w_all = inst.total_weight();
    let (pre_removed, kept): (Vec<Edge>, Vec<Edge>) = inst
        .graph
        .edges()
        .iter()
        .partition(|e| is_terminal(e.key.lo) && is_terminal(e.key.hi));
    let heavy = w_all + 2.0 * eps;
    let edges = kept.iter().map(|e| (e.key.lo, e.key.hi, e.weight)).chain([
        (s1, s2, heavy),
        (s2, s3, heavy),
        (s1, s3, 2.0 * w_all + 3.0 * eps),
    ]);
    let graph = Graph::with_costs_as_weights(inst.graph.node_count(), edges)?;
    let p_star = Path::new(&graph, vec![s1, s3])?;
    let removed_weight: f64 = pre_removed.iter().map(|e| e.weight).sum();
    Ok(ForcePathInstance {
        graph,
        p_star,
        budget: inst.budget - removed_weight,
        pre_removed,
    })
}

/// Decides 3-Terminal Cut through an exact Force Path Cut decision oracle:
/// `fpc_decides(fpi)` must answer whether `fpi` has a cut of cost at most
/// `fpi.budget`.
pub fn solve_3tc_via_fpc<F>(
    inst: &TerminalCutInstance,
    eps: f64,
    mut fpc_decides: F,
) -> Result<bool, ReductionError>
where
    F: FnMut(&ForcePathInstance) -> Result<bool, ReductionError>,
{
    let fpi = create_force_path_input(inst, eps)?;
    if fpi.budget < -LENGTH_TOL {
        return Ok(false);
    }
    fpc_decides(&fpi)
}

/// The brute-force decision oracle for [`solve_3tc_via_fpc`].
pub fn brute_force_fpc_decision(fpi: &ForcePathInstance) -> Result<bool, ReductionError> {
    let plan = brute_force_force_path_cut(&fpi.graph, &fpi.p_star, BRUTE_FORCE_LIMIT)?;
    Ok(plan.total_cost <= fpi.budget + cost_tol(fpi.budget))
}

fn cost_tol(x: f64) -> f64 {
    LENGTH_TOL * x.abs().max(1.0)
}

struct Search<'a> {
    g: &'a Graph,
    p_star: &'a Path,
    on_star: Vec<bool>,
    removed: Vec<bool>,
    kept: Vec<bool>,
    cut: Vec<EdgeId>,
    best: Option<(f64, Vec<EdgeId>, Option<f64>)>,
    nodes: usize,
}

impl Search<'_> {
    fn improves(&self, cost: f64, set: &[EdgeId]) -> bool {
        match &self.best {
            None => true,
            Some((best, best_set, _)) => {
                if (cost - best).abs() <= cost_tol(*best) {
                    set < best_set.as_slice()
                } else {
                    cost < *best
                }
            }
        }
    }

    fn explore(&mut self, cost: f64) -> Result<(), GraphError> {
        self.nodes += 1;
        if let Some((best, _, _)) = &self.best {
            if cost > best + cost_tol(*best) {
                return Ok(());
            }
        }
        let competitor = match violated(self.g, self.p_star, &self.removed)? {
            Ok(p) => p,
            Err(runner_up) => {
                let mut set = self.cut.clone();
                set.sort_unstable();
                if self.improves(cost, &set) {
                    self.best = Some((cost, set, runner_up));
                }
                return Ok(());
            }
        };
        let options: Vec<EdgeId> = competitor
            .edge_ids(self.g)?
            .into_iter()
            .filter(|&e| !self.on_star[e] && !self.kept[e])
            .collect();
        // branch i cuts options[i] and keeps options[..i]
        let mut newly_kept = Vec::new();
        for &e in &options {
            self.removed[e] = true;
            self.cut.push(e);
            self.explore(cost + self.g.cost(e))?;
            self.cut.pop();
            self.removed[e] = false;
            self.kept[e] = true;
            newly_kept.push(e);
        }
        for e in newly_kept {
            self.kept[e] = false;
        }
        Ok(())
    }
}

/// Exact minimum-cost Force Path Cut by branch and bound.
///
/// Every node of the search cuts one edge of the current shortest competitor;
/// sibling branches keep the edges earlier siblings cut, so no edge set is
/// visited twice. Among optimal inclusion-minimal cuts the lexicographically
/// smallest key set wins (edge ids follow key order).
pub fn brute_force_force_path_cut(
    g: &Graph,
    p_star: &Path,
    limit: usize,
) -> Result<CutPlan, ReductionError> {
    let p_star = checked_target(g, p_star)?;
    let on_star = protected_mask(g, &p_star)?;
    let cuttable = on_star.iter().filter(|&&x| !x).count();
    if cuttable > limit {
        return Err(ReductionError::TooLarge {
            edges: cuttable,
            limit,
        });
    }
    let mut search = Search {
        g,
        p_star: &p_star,
        on_star,
        removed: vec![false; g.edge_count()],
        kept: vec![false; g.edge_count()],
        cut: Vec::new(),
        best: None,
        nodes: 0,
    };
    search.explore(0.0)?;
    // cutting every edge off p* always works, so the search found something
    let (_, set, runner_up) = search.best.expect("cutting all other edges is feasible");
    let mut plan = CutPlan::from_ids(g, "brute-force", &set, p_star.clone());
    plan.iterations = search.nodes;
    plan.runner_up_length = runner_up;
    Ok(plan)
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra] = rb;
        }
    }
}

/// Minimum weight of an edge set whose removal separates all three
/// terminals pairwise, by enumerating every set of kept edges.
pub fn min_terminal_cut_cost(
    g: &Graph,
    terminals: [NodeId; 3],
    limit: usize,
) -> Result<f64, ReductionError> {
    let m = g.edge_count();
    if m > limit {
        return Err(ReductionError::TooLarge { edges: m, limit });
    }
    let total: f64 = g.edges().iter().map(|e| e.weight).sum();
    let mut best_kept = 0.0f64;
    for mask in 0u64..(1u64 << m) {
        let mut dsu = Dsu((0..g.node_count()).collect());
        let mut kept = 0.0;
        for (i, e) in g.edges().iter().enumerate() {
            if mask >> i & 1 == 1 {
                dsu.union(e.key.lo, e.key.hi);
                kept += e.weight;
            }
        }
        if kept <= best_kept {
            continue;
        }
        let [a, b, c] = terminals.map(|t| dsu.find(t));
        if a != b && b != c && a != c {
            best_kept = kept;
        }
    }
    Ok(total - best_kept)
}

/// Exact 3-Terminal Cut decision: can the terminals be pairwise separated
/// within the budget?
pub fn brute_force_3tc(inst: &TerminalCutInstance) -> Result<bool, ReductionError> {
    let cost = min_terminal_cut_cost(&inst.graph, inst.terminals, BRUTE_FORCE_LIMIT)?;
    Ok(cost <= inst.budget + cost_tol(inst.budget))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::EdgeKey;

    fn inst(n: usize, edges: &[(usize, usize, f64)], budget: f64) -> TerminalCutInstance {
        let g = Graph::with_costs_as_weights(n, edges.iter().copied()).unwrap();
        TerminalCutInstance::new(g, budget, [0, 1, 2]).unwrap()
    }

    #[test]
    fn path_instance_weights() {
        // s1=0, a=3, s2=1, b=4, s3=2
        let t = inst(
            5,
            &[(0, 3, 1.0), (3, 1, 1.0), (1, 4, 1.0), (4, 2, 1.0)],
            1.0,
        );
        let f = create_force_path_input(&t, 1.0).unwrap();
        assert!(f.pre_removed.is_empty());
        assert_eq!(f.budget, 1.0);
        assert_eq!(f.graph.edge_between(0, 1).unwrap().weight, 6.0);
        assert_eq!(f.graph.edge_between(1, 2).unwrap().weight, 6.0);
        assert_eq!(f.graph.edge_between(0, 2).unwrap().weight, 11.0);
        assert!(f.graph.edges().iter().all(|e| e.cost == e.weight));
        assert_eq!(f.p_star.nodes(), &[0, 2]);
    }

    #[test]
    fn terminal_edge_is_pre_removed() {
        let t = inst(4, &[(0, 1, 3.0), (1, 3, 1.0), (3, 2, 1.0)], 10.0);
        let f = create_force_path_input(&t, 1.0).unwrap();
        assert_eq!(f.pre_removed.len(), 1);
        assert_eq!(f.pre_removed[0].key, EdgeKey::new(0, 1));
        assert_eq!(f.budget, 7.0);
        assert_eq!(f.graph.edge_between(0, 1).unwrap().weight, 5.0 + 2.0);
    }

    #[test]
    fn empty_graph_gets_bare_heavy_edges() {
        let t = inst(3, &[], 0.0);
        let f = create_force_path_input(&t, 0.5).unwrap();
        let w: Vec<f64> = f.graph.edges().iter().map(|e| e.weight).collect();
        assert_eq!(w, vec![1.0, 1.5, 1.0]);
        assert!(solve_3tc_via_fpc(&t, 0.5, brute_force_fpc_decision).unwrap());
    }

    #[test]
    fn terminal_triangle() {
        let tri = [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)];
        assert!(solve_3tc_via_fpc(&inst(3, &tri, 3.0), 1.0, brute_force_fpc_decision).unwrap());
        assert!(!solve_3tc_via_fpc(&inst(3, &tri, 2.0), 1.0, brute_force_fpc_decision).unwrap());
        assert!(brute_force_3tc(&inst(3, &tri, 3.0)).unwrap());
        assert!(!brute_force_3tc(&inst(3, &tri, 2.0)).unwrap());
    }

    #[test]
    fn star_of_terminals() {
        let star = [(3, 0, 1.0), (3, 1, 1.0), (3, 2, 1.0)];
        assert!(brute_force_3tc(&inst(4, &star, 2.0)).unwrap());
        assert!(!brute_force_3tc(&inst(4, &star, 1.0)).unwrap());
        assert_eq!(
            min_terminal_cut_cost(&inst(4, &star, 0.0).graph, [0, 1, 2], 22).unwrap(),
            2.0
        );
    }

    #[test]
    fn already_separated() {
        let t = inst(5, &[(0, 3, 1.0), (1, 4, 2.0)], 0.0);
        assert!(brute_force_3tc(&t).unwrap());
        assert!(solve_3tc_via_fpc(&t, 1.0, brute_force_fpc_decision).unwrap());
    }

    #[test]
    fn invalid_inputs() {
        let g = Graph::with_costs_as_weights(3, [(0, 1, 1.0)]).unwrap();
        assert!(TerminalCutInstance::new(g.clone(), 1.0, [0, 0, 2]).is_err());
        assert!(TerminalCutInstance::new(g.clone(), 1.0, [0, 1, 5]).is_err());
        assert!(TerminalCutInstance::new(g.clone(), -1.0, [0, 1, 2]).is_err());
        let t = TerminalCutInstance::new(g, 1.0, [0, 1, 2]).unwrap();
        assert_eq!(
            create_force_path_input(&t, 0.0),
            Err(ReductionError::BadEpsilon(0.0))
        );
    }

    #[test]
    fn brute_force_on_clique() {
        let n = 5;
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v, if (u, v) == (0, 4) { 5.0 } else { 1.0 }));
            }
        }
        let g = Graph::with_costs_as_weights(n, edges).unwrap();
        let p = Path::new(&g, vec![0, 4]).unwrap();
        let plan = brute_force_force_path_cut(&g, &p, 22).unwrap();
        assert_eq!(plan.total_cost, 3.0);
        // lexicographically first optimum: the source-side edges
        assert_eq!(
            plan.removed_edges,
            vec![EdgeKey::new(0, 1), EdgeKey::new(0, 2), EdgeKey::new(0, 3)]
        );
        assert!(matches!(
            brute_force_force_path_cut(&g, &p, 5),
            Err(ReductionError::TooLarge { edges: 9, limit: 5 })
        ));
    }
}
