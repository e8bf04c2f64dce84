//! Dijkstra toward a target followed by a lexicographic walk over tight edges.
//!
//! Running the search backwards from `t` gives every node its distance to
//! `t`. A shortest `s`-`t` path is exactly a walk along tight edges
//! (`w(u,v) + d(v) == d(u)`), so picking the smallest admissible neighbour at
//! every step yields the lexicographically smallest shortest path.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use super::{EdgeId, Graph, GraphError, NodeId, Path, Restriction, LENGTH_TOL};

/// Beyond this drop in distance a step cannot lead back into the prefix.
const DESCENT_MARGIN: f64 = 1e-6;

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    node: NodeId,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Distances from every node to `target`.
///
/// With `stop_at`, the search ends once every node no farther than `stop_at`
/// is settled; entries beyond that are upper bounds larger than `d(stop_at)`.
pub(crate) fn distances_to<E, N>(
    g: &Graph,
    target: NodeId,
    edge_ok: E,
    node_ok: N,
    stop_at: Option<NodeId>,
) -> Vec<f64>
where
    E: Fn(EdgeId) -> bool,
    N: Fn(NodeId) -> bool,
{
    let mut dist = vec![f64::INFINITY; g.node_count()];
    let mut done = vec![false; g.node_count()];
    let mut heap = BinaryHeap::new();
    if !node_ok(target) {
        return dist;
    }
    dist[target] = 0.0;
    heap.push(Entry {
        dist: 0.0,
        node: target,
    });
    let mut horizon = f64::INFINITY;
    while let Some(Entry { dist: d, node: u }) = heap.pop() {
        if d > horizon {
            break;
        }
        if done[u] {
            continue;
        }
        done[u] = true;
        if Some(u) == stop_at {
            horizon = d + LENGTH_TOL;
        }
        for &(v, id) in g.neighbors(u) {
            if done[v] || !edge_ok(id) || !node_ok(v) {
                continue;
            }
            let nd = d + g.weight(id);
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Entry { dist: nd, node: v });
            }
        }
    }
    dist
}

#[inline]
fn tight(g: &Graph, dist: &[f64], from: NodeId, to: NodeId, id: EdgeId) -> bool {
    dist[to].is_finite() && g.weight(id) + dist[to] <= dist[from] + LENGTH_TOL
}

/// Can `target` be reached from `start` over tight edges without touching
/// nodes already on the path?
fn tight_reachable<E, N>(
    g: &Graph,
    dist: &[f64],
    start: NodeId,
    target: NodeId,
    on_path: &[bool],
    edge_ok: &E,
    node_ok: &N,
) -> bool
where
    E: Fn(EdgeId) -> bool,
    N: Fn(NodeId) -> bool,
{
    let mut seen = vec![false; g.node_count()];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(x) = queue.pop_front() {
        if x == target {
            return true;
        }
        for &(y, id) in g.neighbors(x) {
            if seen[y] || on_path[y] || !edge_ok(id) || !node_ok(y) || !tight(g, dist, x, y, id) {
                continue;
            }
            seen[y] = true;
            queue.push_back(y);
        }
    }
    false
}

/// Lexicographically smallest shortest path from `source` to the target the
/// distances were computed for.
pub(crate) fn lex_walk<E, N>(
    g: &Graph,
    source: NodeId,
    target: NodeId,
    dist: &[f64],
    edge_ok: E,
    node_ok: N,
) -> Option<Path>
where
    E: Fn(EdgeId) -> bool,
    N: Fn(NodeId) -> bool,
{
    if !dist[source].is_finite() {
        return None;
    }
    walk(g, source, target, dist, &edge_ok, &node_ok, false)
        .or_else(|| walk(g, source, target, dist, &edge_ok, &node_ok, true))
}

fn walk<E, N>(
    g: &Graph,
    source: NodeId,
    target: NodeId,
    dist: &[f64],
    edge_ok: &E,
    node_ok: &N,
    always_check: bool,
) -> Option<Path>
where
    E: Fn(EdgeId) -> bool,
    N: Fn(NodeId) -> bool,
{
    let mut on_path = vec![false; g.node_count()];
    let mut nodes = vec![source];
    let mut length = 0.0;
    on_path[source] = true;
    let mut u = source;
    while u != target {
        let mut next = None;
        for &(v, id) in g.neighbors(u) {
            if on_path[v] || !edge_ok(id) || !node_ok(v) || !tight(g, dist, u, v, id) {
                continue;
            }
            let descends = dist[v] < dist[u] - DESCENT_MARGIN;
            if (always_check || !descends)
                && !tight_reachable(g, dist, v, target, &on_path, edge_ok, node_ok)
            {
                continue;
            }
            next = Some((v, id));
            break;
        }
        let (v, id) = next?;
        length += g.weight(id);
        on_path[v] = true;
        nodes.push(v);
        u = v;
    }
    Some(Path::from_parts(nodes, length))
}

/// Minimum-length simple `s`-`t` path, ties broken by the lexicographically
/// smallest node sequence. `None` when `t` is unreachable.
pub fn shortest_path(g: &Graph, s: NodeId, t: NodeId) -> Result<Option<Path>, GraphError> {
    shortest_path_restricted(g, s, t, Restriction::none())
}

pub fn shortest_path_restricted(
    g: &Graph,
    s: NodeId,
    t: NodeId,
    restriction: Restriction<'_>,
) -> Result<Option<Path>, GraphError> {
    g.check_node(s)?;
    g.check_node(t)?;
    if !restriction.node_ok(s) || !restriction.node_ok(t) {
        return Ok(None);
    }
    let edge_ok = |id| restriction.edge_ok(id);
    let node_ok = |v| restriction.node_ok(v);
    let dist = distances_to(g, t, edge_ok, node_ok, Some(s));
    Ok(lex_walk(g, s, t, &dist, edge_ok, node_ok))
}
