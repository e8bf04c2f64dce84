//! Principal eigenvector of the unweighted adjacency matrix by power
//! iteration.

use crate::graph::{EdgeId, Graph};

use super::{AttackError, EIGEN_MAX_ITER, EIGEN_TOL};

fn multiply(g: &Graph, removed: Option<&[bool]>, v: &[f64], out: &mut [f64]) {
    out.fill(0.0);
    for (id, e) in g.edges().iter().enumerate() {
        if removed.is_some_and(|r| r[id]) {
            continue;
        }
        out[e.key.lo] += v[e.key.hi];
        out[e.key.hi] += v[e.key.lo];
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

/// Unit-norm, nonnegative `v` with `|Av - lambda v| <= tol * lambda`.
pub fn principal_eigenvector(
    g: &Graph,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>, AttackError> {
    principal_eigenvector_masked(g, None, tol, max_iter)
}

/// As [`principal_eigenvector`], ignoring edges flagged in `removed`.
///
/// Iterates on `A + I` so bipartite graphs do not oscillate.
pub fn principal_eigenvector_masked(
    g: &Graph,
    removed: Option<&[bool]>,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>, AttackError> {
    let n = g.node_count();
    if n == 0 {
        return Err(AttackError::EigenNonConvergence {
            iterations: 0,
            residual: f64::NAN,
        });
    }
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut av = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        multiply(g, removed, &v, &mut av);
        let lambda: f64 = v.iter().zip(&av).map(|(a, b)| a * b).sum();
        residual = v
            .iter()
            .zip(&av)
            .map(|(x, ax)| (ax - lambda * x).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual <= tol * lambda || lambda == 0.0 {
            return Ok(v);
        }
        for (x, ax) in v.iter_mut().zip(&av) {
            *x += ax;
        }
        normalize(&mut v);
    }
    Err(AttackError::EigenNonConvergence {
        iterations: max_iter,
        residual,
    })
}

/// Product of the eigenvector entries at each edge's endpoints, by edge id.
pub fn eigenscores(g: &Graph, removed: Option<&[bool]>) -> Result<Vec<f64>, AttackError> {
    let v = principal_eigenvector_masked(g, removed, EIGEN_TOL, EIGEN_MAX_ITER)?;
    Ok((0..g.edge_count())
        .map(|id: EdgeId| {
            let k = g.edge(id).key;
            v[k.lo] * v[k.hi]
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge() {
        let g = Graph::with_costs_as_weights(2, [(0, 1, 3.0)]).unwrap();
        let v = principal_eigenvector(&g, 1e-12, 1000).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert!((v[0] - h).abs() < 1e-12 && (v[1] - h).abs() < 1e-12);
    }

    #[test]
    fn clique_is_uniform() {
        let n = 6;
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v, 1.0)));
        let g = Graph::with_costs_as_weights(n, edges).unwrap();
        let v = principal_eigenvector(&g, 1e-12, 1000).unwrap();
        for x in v {
            assert!((x - 1.0 / (n as f64).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn star_center_dominates() {
        let g = Graph::with_costs_as_weights(4, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]).unwrap();
        let v = principal_eigenvector(&g, 1e-12, 10_000).unwrap();
        // star K_{1,3}: lambda = sqrt 3, center entry 1/sqrt 2
        assert!((v[0] - 0.5f64.sqrt()).abs() < 1e-9);
        assert!((v[1] - 1.0 / 6f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn edgeless_graph() {
        let g = Graph::with_costs_as_weights(3, Vec::<(usize, usize, f64)>::new()).unwrap();
        assert!(principal_eigenvector(&g, 1e-9, 10).is_ok());
        assert!(eigenscores(&g, None).unwrap().is_empty());
    }

    #[test]
    fn cap_reports_non_convergence() {
        let g = Graph::with_costs_as_weights(5, (0..4).map(|i| (i, i + 1, 1.0))).unwrap();
        assert!(matches!(
            principal_eigenvector(&g, 1e-15, 2),
            Err(AttackError::EigenNonConvergence { iterations: 2, .. })
        ));
    }
}
