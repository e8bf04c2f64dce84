//! Bounded-variable revised dual simplex for covering programs
//!
//! ```text
//! min c'x  s.t.  A x >= 1,  0 <= x <= 1,  A in {0,1},  c >= 0
//! ```
//!
//! Each row gets a surplus column (`a'x - s = 1`, `s >= 0`). The all-surplus
//! basis is dual feasible because `c >= 0`, so no phase one is needed. Adding a
//! row later keeps the current basis dual feasible as well: the new row's dual
//! price starts at zero. The basis inverse is kept explicitly and rebuilt by
//! Gauss-Jordan elimination every [`REFACTOR_EVERY`] pivots.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::LpError;

const PRIMAL_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const RATIO_TIE: f64 = 1e-12;
const REFACTOR_EVERY: usize = 64;
/// Zero-step pivots beyond the row count that count as a stall.
const STALL_SLACK: usize = 50;
/// Relative size of the cost perturbation applied after a stall.
const PERTURBATION: f64 = 1e-7;
const PERTURB_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Outcome {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone)]
struct Column {
    cost: f64,
    upper: f64,
    entries: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct CoverSimplex {
    columns: Vec<Column>,
    var_column: HashMap<usize, usize>,
    rows: usize,
    basis: Vec<usize>,
    position: Vec<Option<usize>>,
    at_upper: Vec<bool>,
    binv: Vec<Vec<f64>>,
    since_refactor: usize,
    pub(crate) pivots: usize,
    surplus: Vec<usize>,
    /// Set once a stall forced a cost perturbation; new columns are
    /// perturbed too.
    perturbation: Option<ChaCha8Rng>,
}

impl CoverSimplex {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    fn push_column(&mut self, column: Column) -> usize {
        self.columns.push(column);
        self.position.push(None);
        self.at_upper.push(false);
        self.columns.len() - 1
    }

    /// Appends the row `sum_{v in vars} x_v >= 1`.
    pub(crate) fn add_row(&mut self, vars: &[usize], cost_of: impl Fn(usize) -> f64) {
        let row = self.rows;
        let mut member = Vec::with_capacity(vars.len());
        for &v in vars {
            let col = match self.var_column.get(&v) {
                Some(&c) => c,
                None => {
                    let cost = self.perturbed_cost(cost_of(v));
                    let c = self.push_column(Column {
                        cost,
                        upper: 1.0,
                        entries: Vec::new(),
                    });
                    self.var_column.insert(v, c);
                    c
                }
            };
            self.columns[col].entries.push((row, 1.0));
            member.push(col);
        }
        let surplus = self.push_column(Column {
            cost: 0.0,
            upper: f64::INFINITY,
            entries: vec![(row, -1.0)],
        });

        // B' = [[B, 0], [a', -1]]  =>  B'^-1 = [[B^-1, 0], [a'B^-1, -1]]
        let mut new_row = vec![0.0; row + 1];
        for (r, &bcol) in self.basis.iter().enumerate() {
            if member.contains(&bcol) {
                for (k, x) in self.binv[r].iter().enumerate() {
                    new_row[k] += x;
                }
            }
        }
        new_row[row] = -1.0;
        for line in &mut self.binv {
            line.push(0.0);
        }
        self.binv.push(new_row);
        self.basis.push(surplus);
        self.surplus.push(surplus);
        self.position[surplus] = Some(row);
        self.rows += 1;
    }

    fn dual_prices(&self) -> Vec<f64> {
        let m = self.rows;
        let mut y = vec![0.0; m];
        for (r, &bcol) in self.basis.iter().enumerate() {
            let c = self.columns[bcol].cost;
            if c != 0.0 {
                for (k, yk) in y.iter_mut().enumerate() {
                    *yk += c * self.binv[r][k];
                }
            }
        }
        y
    }

    fn reduced_cost(&self, col: usize, y: &[f64]) -> f64 {
        let c = &self.columns[col];
        c.cost - c.entries.iter().map(|&(i, a)| a * y[i]).sum::<f64>()
    }

    fn basic_values(&self) -> Vec<f64> {
        let m = self.rows;
        let mut rhs = vec![1.0; m];
        for (j, c) in self.columns.iter().enumerate() {
            if self.position[j].is_none() && self.at_upper[j] {
                for &(i, a) in &c.entries {
                    rhs[i] -= a * c.upper;
                }
            }
        }
        self.binv
            .iter()
            .map(|line| line.iter().zip(&rhs).map(|(b, r)| b * r).sum())
            .collect()
    }

    /// Rebuilds the basis inverse from scratch.
    fn refactor(&mut self) -> Result<(), LpError> {
        let m = self.rows;
        let mut a = vec![vec![0.0; 2 * m]; m];
        for (r, &bcol) in self.basis.iter().enumerate() {
            for &(i, v) in &self.columns[bcol].entries {
                a[i][r] = v;
            }
        }
        for (i, line) in a.iter_mut().enumerate() {
            line[m + i] = 1.0;
        }
        for k in 0..m {
            let p = (k..m)
                .max_by(|&x, &y| a[x][k].abs().total_cmp(&a[y][k].abs()))
                .unwrap();
            if a[p][k].abs() < 1e-12 {
                return Err(LpError::Singular);
            }
            a.swap(k, p);
            let piv = a[k][k];
            for v in a[k].iter_mut() {
                *v /= piv;
            }
            let pivot_row = a[k].clone();
            for (i, line) in a.iter_mut().enumerate() {
                if i != k && line[k] != 0.0 {
                    let f = line[k];
                    for (v, pv) in line.iter_mut().zip(&pivot_row) {
                        *v -= f * pv;
                    }
                }
            }
        }
        self.binv = a.into_iter().map(|line| line[m..].to_vec()).collect();
        self.since_refactor = 0;
        Ok(())
    }

    fn perturbed_cost(&mut self, cost: f64) -> f64 {
        match &mut self.perturbation {
            Some(rng) => cost + PERTURBATION * (1.0 + rng.random::<f64>()) * cost.max(1.0),
            None => cost,
        }
    }

    /// Perturbs every structural cost and restarts from the all-surplus
    /// basis, which is dual feasible for any non-negative costs. This breaks
    /// the dual degeneracy of unit-cost instances, where the method can
    /// otherwise wander the optimal face without reaching primal feasibility.
    fn perturb_and_restart(&mut self) {
        self.perturbation = Some(ChaCha8Rng::seed_from_u64(PERTURB_SEED));
        for j in 0..self.columns.len() {
            if self.columns[j].upper.is_finite() {
                self.columns[j].cost = self.perturbed_cost(self.columns[j].cost);
            }
        }
        let m = self.rows;
        self.basis = self.surplus.clone();
        self.position.iter_mut().for_each(|p| *p = None);
        for (r, &s) in self.surplus.iter().enumerate() {
            self.position[s] = Some(r);
        }
        self.at_upper.iter_mut().for_each(|u| *u = false);
        self.binv = (0..m)
            .map(|r| {
                let mut line = vec![0.0; m];
                line[r] = -1.0;
                line
            })
            .collect();
        self.since_refactor = 0;
    }

    #[allow(clippy::needless_range_loop)]
    pub(crate) fn solve(&mut self) -> Result<Outcome, LpError> {
        let limit = 50 * (self.rows + self.columns.len()) + 1000;
        let mut degenerate_run = 0;
        for _ in 0..limit {
            if self.since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
            }
            let y = self.dual_prices();
            // Box-bounded columns can always be made dual feasible by
            // choosing the bound that matches the sign of the reduced cost.
            let mut d = vec![0.0; self.columns.len()];
            for j in 0..self.columns.len() {
                if self.position[j].is_some() {
                    continue;
                }
                d[j] = self.reduced_cost(j, &y);
                if self.columns[j].upper.is_finite() {
                    if d[j] < -DUAL_TOL {
                        self.at_upper[j] = true;
                    } else if d[j] > DUAL_TOL {
                        self.at_upper[j] = false;
                    }
                }
            }
            let xb = self.basic_values();

            let mut leave: Option<(usize, f64, bool)> = None;
            for (r, &x) in xb.iter().enumerate() {
                let upper = self.columns[self.basis[r]].upper;
                let (viol, below) = if x < -PRIMAL_TOL {
                    (-x, true)
                } else if x > upper + PRIMAL_TOL {
                    (x - upper, false)
                } else {
                    continue;
                };
                let better = match leave {
                    None => true,
                    Some((_, lv, _)) => viol > lv,
                };
                if better {
                    leave = Some((r, viol, below));
                }
            }
            let Some((r, _, below)) = leave else {
                return Ok(Outcome::Optimal);
            };

            let rho = &self.binv[r];
            let mut candidates: Vec<(usize, f64, f64)> = Vec::new();
            for j in 0..self.columns.len() {
                if self.position[j].is_some() {
                    continue;
                }
                let alpha: f64 = self.columns[j]
                    .entries
                    .iter()
                    .map(|&(i, a)| a * rho[i])
                    .sum();
                let up = self.at_upper[j];
                // x_B[r] moves by -alpha per unit increase of x_j.
                let eligible = if below {
                    (!up && alpha < -PIVOT_TOL) || (up && alpha > PIVOT_TOL)
                } else {
                    (!up && alpha > PIVOT_TOL) || (up && alpha < -PIVOT_TOL)
                };
                if !eligible {
                    continue;
                }
                // reduced costs inside the tolerance are exact ties
                let ratio = if d[j].abs() <= DUAL_TOL {
                    0.0
                } else {
                    d[j].abs() / alpha.abs()
                };
                candidates.push((j, ratio, alpha));
            }
            let best = candidates.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
            // largest pivot among ratio ties, for stability
            let enter = candidates
                .into_iter()
                .filter(|c| c.1 <= best + RATIO_TIE)
                .reduce(|a, b| if b.2.abs() > a.2.abs() { b } else { a });
            let Some((q, ratio, _)) = enter else {
                return Ok(Outcome::Infeasible);
            };

            if ratio <= RATIO_TIE {
                degenerate_run += 1;
                if degenerate_run > self.rows + STALL_SLACK && self.perturbation.is_none() {
                    log::debug!("simplex stalled on {} rows; perturbing costs", self.rows);
                    self.perturb_and_restart();
                    degenerate_run = 0;
                    continue;
                }
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, q, !below);
        }
        Err(LpError::IterationLimit(limit))
    }

    fn pivot(&mut self, r: usize, q: usize, leaving_to_upper: bool) {
        let m = self.rows;
        let mut col = vec![0.0; m];
        for &(i, a) in &self.columns[q].entries {
            for (k, ck) in col.iter_mut().enumerate() {
                *ck += self.binv[k][i] * a;
            }
        }
        let piv = col[r];
        let pivot_row: Vec<f64> = self.binv[r].iter().map(|v| v / piv).collect();
        for (k, line) in self.binv.iter_mut().enumerate() {
            if k == r {
                continue;
            }
            let f = col[k];
            if f != 0.0 {
                for (v, pv) in line.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
        self.binv[r] = pivot_row;

        let leaving = self.basis[r];
        self.position[leaving] = None;
        self.at_upper[leaving] = leaving_to_upper && self.columns[leaving].upper.is_finite();
        self.basis[r] = q;
        self.position[q] = Some(r);
        self.at_upper[q] = false;
        self.since_refactor += 1;
        self.pivots += 1;
    }

    /// Current values of the structural variables, keyed by external index.
    pub(crate) fn values(&mut self) -> Result<HashMap<usize, f64>, LpError> {
        self.refactor()?;
        let xb = self.basic_values();
        let mut out = HashMap::with_capacity(self.var_column.len());
        for (&var, &col) in &self.var_column {
            let upper = self.columns[col].upper;
            let x = match self.position[col] {
                Some(r) => xb[r].clamp(0.0, upper),
                None if self.at_upper[col] => upper,
                None => 0.0,
            };
            out.insert(var, x);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(costs: &[f64], rows: &[&[usize]]) -> (Outcome, Vec<f64>) {
        let mut s = CoverSimplex::new();
        for r in rows {
            s.add_row(r, |v| costs[v]);
        }
        let out = s.solve().unwrap();
        let vals = s.values().unwrap();
        (
            out,
            (0..costs.len())
                .map(|v| vals.get(&v).copied().unwrap_or(0.0))
                .collect(),
        )
    }

    #[test]
    fn forced_variable() {
        let (out, x) = solve(&[4.0], &[&[0]]);
        assert_eq!(out, Outcome::Optimal);
        assert_eq!(x, vec![1.0]);
    }

    #[test]
    fn odd_cycle_is_fractional() {
        let (_, x) = solve(&[1.0, 1.0, 1.0], &[&[0, 1], &[1, 2], &[0, 2]]);
        for v in x {
            assert!((v - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn empty_row_is_infeasible() {
        let mut s = CoverSimplex::new();
        s.add_row(&[], |_| 1.0);
        assert_eq!(s.solve().unwrap(), Outcome::Infeasible);
    }

    #[test]
    fn warm_start_matches_cold() {
        let costs = [3.0, 1.0, 2.0, 2.0, 5.0];
        let rows: [&[usize]; 4] = [&[0, 1], &[1, 2, 3], &[3, 4], &[0, 4]];
        let mut warm = CoverSimplex::new();
        for r in rows {
            warm.add_row(r, |v| costs[v]);
            warm.solve().unwrap();
        }
        let vals = warm.values().unwrap();
        let warm_obj: f64 = vals.iter().map(|(v, x)| costs[*v] * x).sum();
        let (_, cold) = solve(&costs, &rows);
        let cold_obj: f64 = cold.iter().zip(costs).map(|(x, c)| x * c).sum();
        assert!((warm_obj - cold_obj).abs() < 1e-9);
    }

    #[test]
    fn perturbed_restart_stays_near_optimal() {
        // unit costs over overlapping windows: heavily dual degenerate
        let costs = [1.0; 12];
        let rows: Vec<Vec<usize>> = (0..10).map(|i| vec![i, i + 1, i + 2]).collect();
        let mut s = CoverSimplex::new();
        for (i, r) in rows.iter().enumerate() {
            s.add_row(r, |v| costs[v]);
            if i == 4 {
                s.solve().unwrap();
                s.perturb_and_restart();
            }
        }
        assert_eq!(s.solve().unwrap(), Outcome::Optimal);
        let vals = s.values().unwrap();
        let obj: f64 = vals.iter().map(|(v, x)| costs[*v] * x).sum();
        let refs: Vec<&[usize]> = rows.iter().map(Vec::as_slice).collect();
        let (_, exact) = solve(&costs, &refs);
        assert!((obj - exact.iter().sum::<f64>()).abs() < 1e-5, "{obj}");
        for r in &rows {
            assert!(
                r.iter()
                    .map(|v| vals.get(v).copied().unwrap_or(0.0))
                    .sum::<f64>()
                    >= 1.0 - 1e-9
            );
        }
    }
}
