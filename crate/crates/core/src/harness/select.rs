//! Terminal and target-path selection for experiments.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{Graph, NodeId, Path};
use crate::paths::{hop_neighborhood, PathIterator};

use super::{HarnessError, SkipReason};

/// Resampling budget for terminal selection.
pub const MAX_TERMINAL_DRAWS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum TerminalMode {
    /// `s` and `t` uniform over all nodes, redrawn until `t` is reachable.
    Uniform,
    /// `t` exactly `hops` BFS hops from `s`; the attack then runs on the
    /// subgraph induced by the `neighborhood`-hop ball around `s`.
    Hops {
        #[serde(default = "default_hops")]
        hops: usize,
        #[serde(default = "default_neighborhood")]
        neighborhood: usize,
    },
}

fn default_hops() -> usize {
    50
}

fn default_neighborhood() -> usize {
    60
}

impl TerminalMode {
    pub fn hops() -> Self {
        TerminalMode::Hops {
            hops: default_hops(),
            neighborhood: default_neighborhood(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Terminals {
    pub s: NodeId,
    pub t: NodeId,
    /// Nodes the attack may use, if restricted.
    pub allowed: Option<Vec<bool>>,
}

pub fn select_terminals<R: Rng>(
    g: &Graph,
    mode: TerminalMode,
    rng: &mut R,
) -> Result<Terminals, HarnessError> {
    let n = g.node_count();
    if n < 2 {
        return Err(HarnessError::Skip(SkipReason::NoTerminals));
    }
    for _ in 0..MAX_TERMINAL_DRAWS {
        let s = rng.random_range(0..n);
        match mode {
            TerminalMode::Uniform => {
                let t = rng.random_range(0..n - 1);
                let t = if t >= s { t + 1 } else { t };
                if g.hop_distances(s, None)[t].is_some() {
                    return Ok(Terminals {
                        s,
                        t,
                        allowed: None,
                    });
                }
            }
            TerminalMode::Hops { hops, neighborhood } => {
                let dist = g.hop_distances(s, None);
                let at: Vec<NodeId> = (0..n).filter(|&v| dist[v] == Some(hops)).collect();
                if hops > 0 && !at.is_empty() {
                    let t = at[rng.random_range(0..at.len())];
                    let allowed = hop_neighborhood(g, s, neighborhood.max(hops));
                    return Ok(Terminals {
                        s,
                        t,
                        allowed: Some(allowed),
                    });
                }
            }
        }
    }
    Err(HarnessError::Skip(SkipReason::NoTerminals))
}

/// The `k`-th shortest simple `s`-`t` path (1-based) in rank order.
pub fn select_p_star(g: &Graph, s: NodeId, t: NodeId, k: usize) -> Result<Path, HarnessError> {
    if k == 0 {
        return Err(HarnessError::Config("path rank must be at least 1".into()));
    }
    PathIterator::new(g, s, t)?
        .nth(k - 1)
        .ok_or(HarnessError::Skip(SkipReason::TooFewPaths { rank: k }))
}
