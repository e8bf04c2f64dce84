use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{EdgeId, Graph, GraphError, NodeId};

/// A simple path, stored as its node sequence together with its length
/// under the graph it was validated against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    nodes: Vec<NodeId>,
    length: f64,
}

impl Path {
    /// Validates simplicity and edge membership, and computes the length.
    pub fn new(g: &Graph, nodes: Vec<NodeId>) -> Result<Self, GraphError> {
        if nodes.is_empty() {
            return Err(GraphError::EmptyPath);
        }
        let mut seen = HashSet::with_capacity(nodes.len());
        for &v in &nodes {
            g.check_node(v)?;
            if !seen.insert(v) {
                return Err(GraphError::NotSimple(v));
            }
        }
        let length = path_length(g, &nodes)?;
        Ok(Path { nodes, length })
    }

    /// Used by the search routines, which only ever walk existing edges.
    pub(crate) fn from_parts(nodes: Vec<NodeId>, length: f64) -> Self {
        Path { nodes, length }
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn source(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn target(&self) -> NodeId {
        *self.nodes.last().unwrap()
    }

    pub fn hop_count(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Edge ids in traversal order.
    pub fn edge_ids(&self, g: &Graph) -> Result<Vec<EdgeId>, GraphError> {
        self.nodes
            .windows(2)
            .map(|w| {
                g.edge_id(w[0], w[1])
                    .ok_or(GraphError::MissingEdge(w[0], w[1]))
            })
            .collect()
    }

    pub fn reversed(&self) -> Path {
        let mut nodes = self.nodes.clone();
        nodes.reverse();
        Path {
            nodes,
            length: self.length,
        }
    }
}

/// Sum of edge weights along a node sequence; 0 for a single node.
pub fn path_length(g: &Graph, nodes: &[NodeId]) -> Result<f64, GraphError> {
    nodes.windows(2).try_fold(0.0, |acc, w| {
        g.edge_between(w[0], w[1])
            .map(|e| acc + e.weight)
            .ok_or(GraphError::MissingEdge(w[0], w[1]))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_node_has_zero_length() {
        let g = Graph::new(1, []).unwrap();
        assert_eq!(path_length(&g, &[0]).unwrap(), 0.0);
        assert_eq!(Path::new(&g, vec![0]).unwrap().hop_count(), 0);
    }

    #[test]
    fn two_term_sum() {
        let g = Graph::with_costs_as_weights(3, [(0, 1, 2.0), (1, 2, 5.0)]).unwrap();
        assert_eq!(path_length(&g, &[0, 1, 2]).unwrap(), 7.0);
    }

    #[test]
    fn unit_path_of_fifty_edges() {
        let g = Graph::with_costs_as_weights(51, (0..50).map(|i| (i, i + 1, 1.0))).unwrap();
        let nodes: Vec<_> = (0..51).collect();
        assert_eq!(path_length(&g, &nodes).unwrap(), 50.0);
    }

    #[test]
    fn missing_edge_and_repeats_are_errors() {
        let g = Graph::with_costs_as_weights(3, [(0, 1, 1.0)]).unwrap();
        assert_eq!(path_length(&g, &[0, 2]), Err(GraphError::MissingEdge(0, 2)));
        assert_eq!(Path::new(&g, vec![0, 1, 0]), Err(GraphError::NotSimple(0)));
        assert_eq!(Path::new(&g, vec![]), Err(GraphError::EmptyPath));
    }
}
