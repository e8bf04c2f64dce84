//! Independent oracles shared by the integration and acceptance suites.
//! Nothing here calls into the library's own path or cover code.

#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use forcepath::{CutPlan, EdgeKey, Graph, NodeId, Path};
use rand::Rng;

pub const TOL: f64 = 1e-9;

/// Every simple `s`-`t` path by DFS, as `(length, nodes)`, sorted by length
/// then node sequence. Only meant for integer weights.
pub fn all_simple_paths(g: &Graph, s: NodeId, t: NodeId) -> Vec<(f64, Vec<NodeId>)> {
    fn dfs(
        g: &Graph,
        t: NodeId,
        stack: &mut Vec<NodeId>,
        on: &mut [bool],
        len: f64,
        out: &mut Vec<(f64, Vec<NodeId>)>,
    ) {
        let u = *stack.last().unwrap();
        if u == t {
            out.push((len, stack.clone()));
            return;
        }
        for &(v, id) in g.neighbors(u) {
            if !on[v] {
                on[v] = true;
                stack.push(v);
                dfs(g, t, stack, on, len + g.weight(id), out);
                stack.pop();
                on[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    if s == t {
        return out;
    }
    let mut on = vec![false; g.node_count()];
    on[s] = true;
    dfs(g, t, &mut vec![s], &mut on, 0.0, &mut out);
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    out
}

/// Textbook Dijkstra distances over edges not in `removed`.
pub fn distances(g: &Graph, src: NodeId, removed: &[bool]) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; g.node_count()];
    let mut heap = BinaryHeap::new();
    dist[src] = 0.0;
    heap.push(Reverse((0u64, src)));
    // f64 bits order like the values for non-negative floats
    while let Some(Reverse((bits, u))) = heap.pop() {
        let d = f64::from_bits(bits);
        if d > dist[u] {
            continue;
        }
        for &(v, id) in g.neighbors(u) {
            if removed[id] {
                continue;
            }
            let nd = d + g.weight(id);
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Reverse((nd.to_bits(), v)));
            }
        }
    }
    dist
}

/// With positive weights, `p` is the strict unique shortest path of the
/// residual graph iff `d(s,t)` equals its length and no off-path edge lies on
/// an `s`-`t` walk that is not strictly longer.
pub fn is_exclusive_shortest(g: &Graph, p: &Path, removed: &[bool]) -> bool {
    let on_p: Vec<EdgeKey> = p
        .nodes()
        .windows(2)
        .map(|w| EdgeKey::new(w[0], w[1]))
        .collect();
    for k in &on_p {
        match g.edge_id(k.lo, k.hi) {
            Some(id) if !removed[id] => {}
            _ => return false,
        }
    }
    let len = p.length();
    let ds = distances(g, p.source(), removed);
    let dt = distances(g, p.target(), removed);
    if (ds[p.target()] - len).abs() > TOL {
        return false;
    }
    g.edges().iter().enumerate().all(|(id, e)| {
        removed[id]
            || on_p.contains(&e.key)
            || (ds[e.key.lo] + e.weight + dt[e.key.hi] > len + TOL
                && ds[e.key.hi] + e.weight + dt[e.key.lo] > len + TOL)
    })
}

pub fn removal_mask(g: &Graph, keys: &[EdgeKey]) -> Vec<bool> {
    let mut mask = vec![false; g.edge_count()];
    for k in keys {
        mask[g.edge_id(k.lo, k.hi).expect("plan edge exists")] = true;
    }
    mask
}

pub fn plan_is_valid(g: &Graph, plan: &CutPlan) -> bool {
    let mask = removal_mask(g, &plan.removed_edges);
    let cost: f64 = plan
        .removed_edges
        .iter()
        .map(|k| g.edge_between(k.lo, k.hi).unwrap().cost)
        .sum();
    (cost - plan.total_cost).abs() <= 1e-6 && is_exclusive_shortest(g, &plan.protected_path, &mask)
}

/// Minimum cost hitting set by branching on the first unhit row.
pub fn min_hitting_set(rows: &[Vec<usize>], costs: &[f64]) -> f64 {
    fn go(rows: &[Vec<usize>], costs: &[f64], chosen: &mut Vec<bool>, spent: f64, best: &mut f64) {
        if spent >= *best {
            return;
        }
        let Some(row) = rows.iter().find(|r| !r.iter().any(|&e| chosen[e])) else {
            *best = spent;
            return;
        };
        for &e in row {
            chosen[e] = true;
            go(rows, costs, chosen, spent + costs[e], best);
            chosen[e] = false;
        }
    }
    let mut best = f64::INFINITY;
    go(rows, costs, &mut vec![false; costs.len()], 0.0, &mut best);
    best
}

/// Competing paths that must be hit, as edge-id rows over cuttable edges.
pub fn competitor_rows(g: &Graph, p: &Path) -> Vec<Vec<usize>> {
    let on_p: Vec<usize> = p
        .nodes()
        .windows(2)
        .map(|w| g.edge_id(w[0], w[1]).unwrap())
        .collect();
    all_simple_paths(g, p.source(), p.target())
        .into_iter()
        .filter(|(len, nodes)| nodes != p.nodes() && *len <= p.length() + TOL)
        .map(|(_, nodes)| {
            nodes
                .windows(2)
                .map(|w| g.edge_id(w[0], w[1]).unwrap())
                .filter(|e| !on_p.contains(e))
                .collect()
        })
        .collect()
}

/// Optimal Force Path Cut cost via path enumeration and exact hitting set.
pub fn optimal_cut_cost(g: &Graph, p: &Path) -> f64 {
    let costs: Vec<f64> = g.edges().iter().map(|e| e.cost).collect();
    min_hitting_set(&competitor_rows(g, p), &costs)
}

/// Optimal cost by trying every subset of off-path edges (no pruning).
pub fn unpruned_optimal_cut_cost(g: &Graph, p: &Path) -> f64 {
    let on_p: Vec<usize> = p
        .nodes()
        .windows(2)
        .map(|w| g.edge_id(w[0], w[1]).unwrap())
        .collect();
    let free: Vec<usize> = (0..g.edge_count()).filter(|e| !on_p.contains(e)).collect();
    assert!(free.len() <= 16, "too many edges for full enumeration");
    let mut best = f64::INFINITY;
    for mask in 0u32..1 << free.len() {
        let mut removed = vec![false; g.edge_count()];
        let mut cost = 0.0;
        for (i, &e) in free.iter().enumerate() {
            if mask >> i & 1 == 1 {
                removed[e] = true;
                cost += g.cost(e);
            }
        }
        if cost < best && is_exclusive_shortest(g, p, &removed) {
            best = cost;
        }
    }
    best
}

/// Random graph on `n` nodes: a random spanning tree plus `extra` chords,
/// integer weights in `1..=wmax`, costs equal to weights.
pub fn random_connected<R: Rng>(rng: &mut R, n: usize, extra: usize, wmax: u32) -> Graph {
    let mut keys = Vec::new();
    for v in 1..n {
        keys.push(EdgeKey::new(rng.random_range(0..v), v));
    }
    let mut attempts = 0;
    while keys.len() < n - 1 + extra && attempts < 1000 {
        attempts += 1;
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u != v && !keys.contains(&EdgeKey::new(u, v)) {
            keys.push(EdgeKey::new(u, v));
        }
    }
    let edges: Vec<_> = keys
        .into_iter()
        .map(|k| (k.lo, k.hi, rng.random_range(1..=wmax) as f64))
        .collect();
    Graph::with_costs_as_weights(n, edges).unwrap()
}

/// Unit clique on `n` nodes except `w(0, n-1) = n`; the target is that edge.
pub fn heavy_clique(n: usize) -> (Graph, Path) {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let w = if (u, v) == (0, n - 1) { n as f64 } else { 1.0 };
            edges.push((u, v, w));
        }
    }
    let g = Graph::with_costs_as_weights(n, edges).unwrap();
    let p = Path::new(&g, vec![0, n - 1]).unwrap();
    (g, p)
}

pub fn harmonic(m: usize) -> f64 {
    (1..=m).map(|i| 1.0 / i as f64).sum()
}
