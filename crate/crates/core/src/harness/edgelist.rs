//! Plain-text edge lists.
//!
//! One edge per line, `u v weight [cost]`, whitespace separated; the cost
//! defaults to the weight. Labels are arbitrary tokens mapped to dense ids in
//! order of first appearance. `#` starts a comment, except that a line
//! `#! node <label>` declares a node, so isolated nodes and the id order
//! survive a save/load round trip. Repeated edges keep their first
//! occurrence and self-loops are dropped, both with a warning.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path as FsPath;

use crate::graph::{EdgeKey, Graph, NodeId};

use super::HarnessError;

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedGraph {
    pub graph: Graph,
    /// `labels[id]` is the token used for node `id` in the file.
    pub labels: Vec<String>,
    pub warnings: Vec<String>,
}

impl LoadedGraph {
    /// Labels `"0"`, `"1"`, ... for a graph built in memory.
    pub fn unlabeled(graph: Graph) -> Self {
        LoadedGraph {
            labels: (0..graph.node_count()).map(|v| v.to_string()).collect(),
            graph,
            warnings: Vec::new(),
        }
    }

    pub fn id_of(&self, label: &str) -> Option<NodeId> {
        self.labels.iter().position(|l| l == label)
    }
}

#[derive(Default)]
struct Labels {
    ids: HashMap<String, NodeId>,
    names: Vec<String>,
}

impl Labels {
    fn id(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.ids.get(label) {
            return id;
        }
        let id = self.names.len();
        self.ids.insert(label.to_string(), id);
        self.names.push(label.to_string());
        id
    }
}

fn parse_value(token: &str, what: &str, line: usize) -> Result<f64, HarnessError> {
    let value: f64 = token.parse().map_err(|_| HarnessError::Parse {
        line,
        message: format!("{what} `{token}` is not a number"),
    })?;
    if !value.is_finite() || value < 0.0 {
        return Err(HarnessError::Parse {
            line,
            message: format!("{what} {value} must be finite and non-negative"),
        });
    }
    Ok(value)
}

pub fn parse_edge_list(text: &str) -> Result<LoadedGraph, HarnessError> {
    let mut labels = Labels::default();
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    let mut warnings = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if let Some(rest) = raw.trim_start().strip_prefix("#!") {
            let fields: Vec<&str> = rest.split_whitespace().collect();
            match fields.as_slice() {
                ["node", label] => {
                    labels.id(label);
                }
                _ => {
                    return Err(HarnessError::Parse {
                        line,
                        message: format!("unknown directive `{}`", rest.trim()),
                    })
                }
            }
            continue;
        }
        let content = raw.split('#').next().unwrap_or("");
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if !(3..=4).contains(&fields.len()) {
            return Err(HarnessError::Parse {
                line,
                message: format!(
                    "expected `u v weight [cost]`, found {} fields",
                    fields.len()
                ),
            });
        }
        let weight = parse_value(fields[2], "weight", line)?;
        let cost = match fields.get(3) {
            Some(tok) => parse_value(tok, "cost", line)?,
            None => weight,
        };
        let (u, v) = (labels.id(fields[0]), labels.id(fields[1]));
        if u == v {
            let msg = format!("line {line}: self-loop at `{}` dropped", fields[0]);
            log::warn!("{msg}");
            warnings.push(msg);
            continue;
        }
        if !seen.insert(EdgeKey::new(u, v)) {
            let msg = format!(
                "line {line}: duplicate edge `{}`-`{}` ignored, first occurrence kept",
                fields[0], fields[1]
            );
            log::warn!("{msg}");
            warnings.push(msg);
            continue;
        }
        edges.push((u, v, weight, cost));
    }
    let graph = Graph::new(labels.names.len(), edges)?;
    Ok(LoadedGraph {
        graph,
        labels: labels.names,
        warnings,
    })
}

pub fn load_edge_list(path: &FsPath) -> Result<LoadedGraph, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_edge_list(&text)
}

/// Serializes with node declarations first, then edges in key order.
pub fn format_edge_list(loaded: &LoadedGraph) -> String {
    let g = &loaded.graph;
    let mut out = String::new();
    writeln!(
        out,
        "# {} nodes, {} edges: u v weight cost",
        g.node_count(),
        g.edge_count()
    )
    .unwrap();
    for label in &loaded.labels {
        writeln!(out, "#! node {label}").unwrap();
    }
    for e in g.edges() {
        writeln!(
            out,
            "{} {} {} {}",
            loaded.labels[e.key.lo], loaded.labels[e.key.hi], e.weight, e.cost
        )
        .unwrap();
    }
    out
}

pub fn save_edge_list(loaded: &LoadedGraph, path: &FsPath) -> Result<(), HarnessError> {
    fs::write(path, format_edge_list(loaded)).map_err(|e| HarnessError::io(path, e))
}
