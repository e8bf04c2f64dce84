//! Ranked enumeration of simple `s`-`t` paths.
//!
//! Paths come out ordered by length, equal lengths (within
//! [`LENGTH_TOL`](crate::graph::LENGTH_TOL)) by node sequence. The iterator is
//! lazy: each `next` expands only the path returned by the previous call.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use crate::graph::{
    distances_to, lex_walk, path_length, EdgeId, Graph, GraphError, NodeId, Path, Restriction,
    LENGTH_TOL,
};

/// Total order used for ranking: length first, then node sequence.
pub fn rank_cmp(a: &Path, b: &Path) -> Ordering {
    if (a.length() - b.length()).abs() <= LENGTH_TOL {
        a.nodes().cmp(b.nodes())
    } else {
        a.length().total_cmp(&b.length())
    }
}

struct Candidate {
    path: Path,
    /// Index of the first node where this path leaves its parent.
    deviation: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        rank_cmp(&other.path, &self.path)
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lazily yields simple `s`-`t` paths in rank order.
pub struct PathIterator<'a> {
    graph: &'a Graph,
    source: NodeId,
    target: NodeId,
    restriction: Restriction<'a>,
    found: Vec<Path>,
    last_deviation: usize,
    candidates: BinaryHeap<Candidate>,
    queued: HashSet<Vec<NodeId>>,
    started: bool,
}

impl<'a> PathIterator<'a> {
    pub fn new(graph: &'a Graph, source: NodeId, target: NodeId) -> Result<Self, GraphError> {
        Self::restricted(graph, source, target, Restriction::none())
    }

    pub fn restricted(
        graph: &'a Graph,
        source: NodeId,
        target: NodeId,
        restriction: Restriction<'a>,
    ) -> Result<Self, GraphError> {
        graph.check_node(source)?;
        graph.check_node(target)?;
        if source == target {
            return Err(GraphError::SameEndpoints(source));
        }
        Ok(PathIterator {
            graph,
            source,
            target,
            restriction,
            found: Vec::new(),
            last_deviation: 0,
            candidates: BinaryHeap::new(),
            queued: HashSet::new(),
            started: false,
        })
    }

    fn edge_ok(&self, id: EdgeId) -> bool {
        self.restriction.edge_ok(id)
    }

    fn first(&mut self) -> Option<Path> {
        let r = self.restriction;
        if !r.node_ok(self.source) || !r.node_ok(self.target) {
            return None;
        }
        let dist = distances_to(
            self.graph,
            self.target,
            |id| r.edge_ok(id),
            |v| r.node_ok(v),
            Some(self.source),
        );
        lex_walk(
            self.graph,
            self.source,
            self.target,
            &dist,
            |id| r.edge_ok(id),
            |v| r.node_ok(v),
        )
    }

    /// Queues the best deviation of the last yielded path at each spur node.
    fn expand_last(&mut self) {
        let g = self.graph;
        let last = self.found.last().unwrap().nodes().to_vec();
        let mut in_root = vec![false; g.node_count()];
        for &v in &last[..self.last_deviation] {
            in_root[v] = true;
        }
        for i in self.last_deviation..last.len() - 1 {
            let spur = last[i];
            let root = &last[..=i];
            let blocked: Vec<EdgeId> = self
                .found
                .iter()
                .filter(|p| p.nodes().len() > i + 1 && &p.nodes()[..=i] == root)
                .filter_map(|p| g.edge_id(p.nodes()[i], p.nodes()[i + 1]))
                .collect();
            let r = self.restriction;
            let edge_ok = |id: EdgeId| r.edge_ok(id) && !blocked.contains(&id);
            let node_ok = |v: NodeId| r.node_ok(v) && !in_root[v];
            let dist = distances_to(g, self.target, edge_ok, node_ok, Some(spur));
            if let Some(tail) = lex_walk(g, spur, self.target, &dist, edge_ok, node_ok) {
                let mut nodes = root.to_vec();
                nodes.extend_from_slice(&tail.nodes()[1..]);
                if self.queued.insert(nodes.clone()) {
                    let length = path_length(g, &nodes).expect("walk uses graph edges");
                    self.candidates.push(Candidate {
                        path: Path::from_parts(nodes, length),
                        deviation: i,
                    });
                }
            }
            in_root[spur] = true;
        }
    }
}

impl Iterator for PathIterator<'_> {
    type Item = Path;

    fn next(&mut self) -> Option<Path> {
        if !self.started {
            self.started = true;
            let p = self.first()?;
            debug_assert!(p.nodes().windows(2).all(|w| self
                .graph
                .edge_id(w[0], w[1])
                .is_some_and(|id| self.edge_ok(id))));
            self.queued.insert(p.nodes().to_vec());
            self.found.push(p.clone());
            self.last_deviation = 0;
            return Some(p);
        }
        if self.found.is_empty() {
            return None;
        }
        self.expand_last();
        let Candidate { path, deviation } = self.candidates.pop()?;
        self.found.push(path.clone());
        self.last_deviation = deviation;
        Some(path)
    }
}

/// The first `min(k, total)` simple `s`-`t` paths in rank order.
pub fn k_shortest_paths(
    g: &Graph,
    s: NodeId,
    t: NodeId,
    k: usize,
) -> Result<Vec<Path>, GraphError> {
    k_shortest_paths_restricted(g, s, t, k, Restriction::none())
}

pub fn k_shortest_paths_restricted(
    g: &Graph,
    s: NodeId,
    t: NodeId,
    k: usize,
    restriction: Restriction<'_>,
) -> Result<Vec<Path>, GraphError> {
    Ok(PathIterator::restricted(g, s, t, restriction)?
        .take(k)
        .collect())
}

/// Shortest simple `s`-`t` path whose node sequence differs from `p_star`.
///
/// This is the violated-constraint oracle: the target path is the exclusive
/// shortest path exactly when the returned path is absent or strictly longer.
pub fn next_shortest_excluding(
    g: &Graph,
    s: NodeId,
    t: NodeId,
    p_star: &Path,
) -> Result<Option<Path>, GraphError> {
    next_shortest_excluding_restricted(g, s, t, p_star, Restriction::none())
}

pub fn next_shortest_excluding_restricted(
    g: &Graph,
    s: NodeId,
    t: NodeId,
    p_star: &Path,
    restriction: Restriction<'_>,
) -> Result<Option<Path>, GraphError> {
    Ok(PathIterator::restricted(g, s, t, restriction)?.find(|p| p.nodes() != p_star.nodes()))
}

/// Nodes within `hops` unweighted hops of `source`.
pub fn hop_neighborhood(g: &Graph, source: NodeId, hops: usize) -> Vec<bool> {
    g.hop_distances(source, None)
        .into_iter()
        .map(|d| d.is_some_and(|d| d <= hops))
        .collect()
}
