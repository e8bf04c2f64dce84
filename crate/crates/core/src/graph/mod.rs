//! Undirected graphs carrying a traversal weight and a removal cost per edge.

mod dijkstra;
mod path;
mod plan;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub(crate) use dijkstra::{distances_to, lex_walk};
pub use dijkstra::{shortest_path, shortest_path_restricted};
pub use path::{path_length, Path};
pub use plan::{CutPlan, LpCertificate};

pub type NodeId = usize;
/// Dense index into [`Graph::edges`]. Ids follow canonical key order.
pub type EdgeId = usize;

/// Absolute tolerance used for every path-length and cost comparison.
pub const LENGTH_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("node {node} out of range for graph with {node_count} nodes")]
    InvalidNode { node: NodeId, node_count: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge {0}")]
    DuplicateEdge(EdgeKey),
    #[error("edge {key} has invalid {what} {value}")]
    InvalidValue {
        key: EdgeKey,
        what: &'static str,
        value: f64,
    },
    #[error("no edge between {0} and {1}")]
    MissingEdge(NodeId, NodeId),
    #[error("path is not simple: node {0} repeats")]
    NotSimple(NodeId),
    #[error("path is empty")]
    EmptyPath,
    #[error("source and target coincide at node {0}")]
    SameEndpoints(NodeId),
}

/// Canonical undirected edge key, always stored with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeKey {
    pub lo: NodeId,
    pub hi: NodeId,
}

impl EdgeKey {
    pub fn new(u: NodeId, v: NodeId) -> Self {
        if u <= v {
            EdgeKey { lo: u, hi: v }
        } else {
            EdgeKey { lo: v, hi: u }
        }
    }

    pub fn other(&self, node: NodeId) -> NodeId {
        if node == self.lo {
            self.hi
        } else {
            self.lo
        }
    }
}

impl fmt::Display for EdgeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub key: EdgeKey,
    pub weight: f64,
    pub cost: f64,
}

/// Immutable undirected graph on nodes `0..node_count`.
///
/// Edges are stored sorted by canonical key, so an [`EdgeId`] order is the
/// key order. Adjacency lists are sorted by neighbour id.
#[derive(Debug, Clone)]
pub struct Graph {
    node_count: usize,
    edges: Vec<Edge>,
    index: HashMap<EdgeKey, EdgeId>,
    adjacency: Vec<Vec<(NodeId, EdgeId)>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.node_count == other.node_count && self.edges == other.edges
    }
}

impl Graph {
    /// Builds a graph from `(u, v, weight, cost)` records.
    pub fn new<I>(node_count: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId, f64, f64)>,
    {
        let mut list = Vec::new();
        for (u, v, weight, cost) in edges {
            for node in [u, v] {
                if node >= node_count {
                    return Err(GraphError::InvalidNode { node, node_count });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            let key = EdgeKey::new(u, v);
            for (what, value) in [("weight", weight), ("cost", cost)] {
                if !value.is_finite() || value < 0.0 {
                    return Err(GraphError::InvalidValue { key, what, value });
                }
            }
            list.push(Edge { key, weight, cost });
        }
        list.sort_by_key(|e| e.key);
        if let Some(pair) = list.windows(2).find(|w| w[0].key == w[1].key) {
            return Err(GraphError::DuplicateEdge(pair[0].key));
        }
        Ok(Self::from_sorted(node_count, list))
    }

    /// Convenience constructor where every cost equals the weight.
    pub fn with_costs_as_weights<I>(node_count: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId, f64)>,
    {
        Self::new(node_count, edges.into_iter().map(|(u, v, w)| (u, v, w, w)))
    }

    fn from_sorted(node_count: usize, edges: Vec<Edge>) -> Self {
        let mut adjacency = vec![Vec::new(); node_count];
        let mut index = HashMap::with_capacity(edges.len());
        for (id, e) in edges.iter().enumerate() {
            adjacency[e.key.lo].push((e.key.hi, id));
            adjacency[e.key.hi].push((e.key.lo, id));
            index.insert(e.key, id);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Graph {
            node_count,
            edges,
            index,
            adjacency,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    /// Order-insensitive lookup.
    pub fn edge_id(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        self.index.get(&EdgeKey::new(u, v)).copied()
    }

    pub fn edge_between(&self, u: NodeId, v: NodeId) -> Option<&Edge> {
        self.edge_id(u, v).map(|id| &self.edges[id])
    }

    pub fn neighbors(&self, node: NodeId) -> &[(NodeId, EdgeId)] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.adjacency[node].len()
    }

    pub fn weight(&self, id: EdgeId) -> f64 {
        self.edges[id].weight
    }

    pub fn cost(&self, id: EdgeId) -> f64 {
        self.edges[id].cost
    }

    pub fn check_node(&self, node: NodeId) -> Result<(), GraphError> {
        if node < self.node_count {
            Ok(())
        } else {
            Err(GraphError::InvalidNode {
                node,
                node_count: self.node_count,
            })
        }
    }

    /// Total removal cost of a set of edges.
    pub fn total_cost<'a, I: IntoIterator<Item = &'a EdgeId>>(&self, ids: I) -> f64 {
        ids.into_iter()
            .map(|&id| self.edges[id].cost)
            .fold(0.0, |a, c| a + c)
    }

    /// Returns the graph with `removed` deleted; survivors keep weight and cost.
    pub fn remove_edges(&self, removed: &[EdgeKey]) -> Result<Graph, GraphError> {
        let mut drop = vec![false; self.edges.len()];
        for key in removed {
            let id = self
                .index
                .get(key)
                .ok_or(GraphError::MissingEdge(key.lo, key.hi))?;
            drop[*id] = true;
        }
        let kept = self
            .edges
            .iter()
            .zip(&drop)
            .filter(|(_, &d)| !d)
            .map(|(e, _)| *e)
            .collect();
        Ok(Self::from_sorted(self.node_count, kept))
    }

    /// Same topology with weights and costs rewritten per edge.
    pub fn map_edges<F: FnMut(&Edge) -> (f64, f64)>(&self, mut f: F) -> Result<Graph, GraphError> {
        Graph::new(
            self.node_count,
            self.edges.iter().map(|e| {
                let (w, c) = f(e);
                (e.key.lo, e.key.hi, w, c)
            }),
        )
    }

    /// Subgraph induced by the nodes with `keep[v]` set, renumbered in id
    /// order. Also returns the original id of every new node.
    pub fn induced(&self, keep: &[bool]) -> (Graph, Vec<NodeId>) {
        let old_ids: Vec<NodeId> = (0..self.node_count).filter(|&v| keep[v]).collect();
        let mut new_id = vec![usize::MAX; self.node_count];
        for (i, &v) in old_ids.iter().enumerate() {
            new_id[v] = i;
        }
        // renumbering is monotone, so key order survives
        let edges = self
            .edges
            .iter()
            .filter(|e| keep[e.key.lo] && keep[e.key.hi])
            .map(|e| Edge {
                key: EdgeKey::new(new_id[e.key.lo], new_id[e.key.hi]),
                ..*e
            })
            .collect();
        (Self::from_sorted(old_ids.len(), edges), old_ids)
    }

    /// Nodes reachable from `source` by unweighted BFS, with hop counts.
    pub fn hop_distances(&self, source: NodeId, removed: Option<&[bool]>) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.node_count];
        let mut queue = std::collections::VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &(v, id) in &self.adjacency[u] {
                if removed.is_some_and(|r| r[id]) || dist[v].is_some() {
                    continue;
                }
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
        dist
    }
}

/// Edge and node filters applied on top of a [`Graph`] without rebuilding it.
#[derive(Debug, Clone, Copy, Default)]
pub struct Restriction<'a> {
    /// `removed_edges[id]` set means the edge is absent.
    pub removed_edges: Option<&'a [bool]>,
    /// When present, only nodes with `allowed_nodes[v]` set may be visited.
    pub allowed_nodes: Option<&'a [bool]>,
}

impl<'a> Restriction<'a> {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn without_edges(removed: &'a [bool]) -> Self {
        Restriction {
            removed_edges: Some(removed),
            allowed_nodes: None,
        }
    }

    #[inline]
    pub fn edge_ok(&self, id: EdgeId) -> bool {
        self.removed_edges.is_none_or(|r| !r[id])
    }

    #[inline]
    pub fn node_ok(&self, node: NodeId) -> bool {
        self.allowed_nodes.is_none_or(|a| a[node])
    }
}

/// `a <= b` up to [`LENGTH_TOL`].
#[inline]
pub fn not_longer(a: f64, b: f64) -> bool {
    a <= b + LENGTH_TOL
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::new(3, [(0, 1, 1.0, 2.0), (1, 2, 3.0, 4.0), (2, 0, 5.0, 6.0)]).unwrap()
    }

    #[test]
    fn lookup_is_order_insensitive() {
        let g = triangle();
        assert_eq!(g.edge_id(0, 2), g.edge_id(2, 0));
        assert_eq!(g.edge_between(2, 0).unwrap().weight, 5.0);
        assert!(g.edge_id(0, 0).is_none());
    }

    #[test]
    fn rejects_bad_edges() {
        assert_eq!(
            Graph::new(2, [(1, 1, 1.0, 1.0)]),
            Err(GraphError::SelfLoop(1))
        );
        assert!(matches!(
            Graph::new(2, [(0, 1, 1.0, 1.0), (1, 0, 2.0, 2.0)]),
            Err(GraphError::DuplicateEdge(_))
        ));
        assert!(matches!(
            Graph::new(2, [(0, 1, -1.0, 1.0)]),
            Err(GraphError::InvalidValue { what: "weight", .. })
        ));
        assert!(matches!(
            Graph::new(2, [(0, 2, 1.0, 1.0)]),
            Err(GraphError::InvalidNode { node: 2, .. })
        ));
    }

    #[test]
    fn remove_nothing_is_identity() {
        let g = triangle();
        assert_eq!(g.remove_edges(&[]).unwrap(), g);
    }

    #[test]
    fn remove_everything_keeps_nodes() {
        let g = triangle();
        let keys: Vec<_> = g.edges().iter().map(|e| e.key).collect();
        let h = g.remove_edges(&keys).unwrap();
        assert_eq!(h.node_count(), 3);
        assert_eq!(h.edge_count(), 0);
    }

    #[test]
    fn triangle_minus_edge_is_path() {
        let g = triangle();
        let h = g.remove_edges(&[EdgeKey::new(2, 0)]).unwrap();
        assert_eq!(h.edge_count(), 2);
        assert_eq!(h.degree(1), 2);
        assert_eq!(h.edge_between(1, 2).unwrap().cost, 4.0);
        assert_eq!(
            g.remove_edges(&[EdgeKey::new(5, 6)]),
            Err(GraphError::MissingEdge(5, 6))
        );
    }

    #[test]
    fn induced_renumbers() {
        let g = Graph::with_costs_as_weights(4, [(0, 1, 1.0), (1, 3, 2.0), (2, 3, 3.0)]).unwrap();
        let (h, old) = g.induced(&[false, true, true, true]);
        assert_eq!(old, vec![1, 2, 3]);
        assert_eq!(h.node_count(), 3);
        assert_eq!(h.edge_between(0, 2).unwrap().weight, 2.0);
        assert_eq!(h.edge_between(1, 2).unwrap().weight, 3.0);
        assert_eq!(h.edge_count(), 2);
    }
}
