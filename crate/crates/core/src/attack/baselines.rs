//! One-edge-at-a-time baselines: cut a single edge of the current shortest
//! competitor, chosen by cost or by eigenscore per unit cost.

use crate::graph::{CutPlan, EdgeId, Graph, Path};
use crate::lp::protected_mask;

use super::eigen::eigenscores;
use super::{checked_target, violated, AttackConfig, AttackError, Method};

/// Relative tolerance when comparing eigenscore ratios.
const RATIO_TIE: f64 = 1e-9;

fn greedy_loop<F>(
    g: &Graph,
    p_star: &Path,
    cfg: &AttackConfig,
    mut pick: F,
) -> Result<CutPlan, AttackError>
where
    F: FnMut(&[EdgeId], &[bool]) -> Result<EdgeId, AttackError>,
{
    let p_star = checked_target(g, p_star)?;
    let on_star = protected_mask(g, &p_star)?;
    let cap = cfg.cap_for(g);
    let mut removed = vec![false; g.edge_count()];
    let mut cut = Vec::new();
    loop {
        let competitor = match violated(g, &p_star, &removed)? {
            Ok(p) => p,
            Err(runner_up) => {
                let mut plan = CutPlan::from_ids(g, cfg.method.name(), &cut, p_star);
                plan.iterations = cut.len();
                plan.constraints_generated = cut.len();
                plan.runner_up_length = runner_up;
                return Ok(plan);
            }
        };
        if cut.len() == cap {
            let mut partial = CutPlan::from_ids(g, cfg.method.name(), &cut, p_star);
            partial.iterations = cut.len();
            partial.constraints_generated = cut.len();
            partial.runner_up_length = Some(competitor.length());
            return Err(AttackError::IterationCap {
                cap,
                partial: Box::new(partial),
            });
        }
        let candidates: Vec<EdgeId> = competitor
            .edge_ids(g)?
            .into_iter()
            .filter(|&e| !on_star[e])
            .collect();
        // a simple s-t path other than p* always leaves p* somewhere
        debug_assert!(!candidates.is_empty());
        let e = pick(&candidates, &removed)?;
        removed[e] = true;
        cut.push(e);
    }
}

/// GreedyCost: cut the cheapest non-target edge of the shortest competitor.
/// Ties go to the smallest edge key.
pub fn greedy_cost(g: &Graph, p_star: &Path, cfg: &AttackConfig) -> Result<CutPlan, AttackError> {
    let cfg = AttackConfig {
        method: Method::GreedyCost,
        ..cfg.clone()
    };
    greedy_loop(g, p_star, &cfg, |cands, _| {
        Ok(*cands
            .iter()
            .min_by(|&&a, &&b| g.cost(a).total_cmp(&g.cost(b)).then(a.cmp(&b)))
            .unwrap())
    })
}

fn better_ratio(g: &Graph, scores: &[f64], a: EdgeId, b: EdgeId) -> bool {
    let (ca, cb) = (g.cost(a), g.cost(b));
    match (ca == 0.0, cb == 0.0) {
        (true, false) => true,
        (false, true) => false,
        (true, true) => a < b,
        (false, false) => {
            let (ra, rb) = (scores[a] / ca, scores[b] / cb);
            if (ra - rb).abs() <= RATIO_TIE * ra.abs().max(rb.abs()) {
                a < b
            } else {
                ra > rb
            }
        }
    }
}

/// GreedyEigenscore: cut the competitor edge with the largest eigenscore per
/// unit cost. Scores come from the input graph unless
/// `cfg.recompute_eigenscores` asks for the residual graph after every cut.
pub fn greedy_eigenscore(
    g: &Graph,
    p_star: &Path,
    cfg: &AttackConfig,
) -> Result<CutPlan, AttackError> {
    let cfg = AttackConfig {
        method: Method::GreedyEigenscore,
        ..cfg.clone()
    };
    let mut scores = eigenscores(g, None)?;
    let recompute = cfg.recompute_eigenscores;
    let mut fresh = true;
    greedy_loop(g, p_star, &cfg, |cands, removed| {
        if recompute && !fresh {
            scores = eigenscores(g, Some(removed))?;
        }
        fresh = false;
        let mut best = cands[0];
        for &e in &cands[1..] {
            if better_ratio(g, &scores, e, best) {
                best = e;
            }
        }
        Ok(best)
    })
}
