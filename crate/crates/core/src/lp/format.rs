//! CPLEX-LP text output, for cross-checking against external solvers.
//!
//! Layout (ASCII, `\n` line endings):
//!
//! ```text
//! \ relaxed cut LP: <vars> variables, <rows> rows
//! Minimize
//!  obj: 4 e_0_3 + 1 e_1_2
//! Subject To
//!  p0: e_0_3 + e_1_2 >= 1
//! Bounds
//!  0 <= e_0_3 <= 1
//!  0 <= e_1_2 <= 1
//! End
//! ```
//!
//! Variables are named `e_<lo>_<hi>` after their edge key, or `x<j>` for
//! bare LPs. Coefficients print with Rust's shortest round-trip `f64`
//! formatting. An LP without rows has a bare `obj:` line.

use std::fmt::Write;

use super::RelaxedCutLP;

fn name(lp: &RelaxedCutLP, var: usize) -> String {
    match lp.key(var) {
        Some(k) => format!("e_{}_{}", k.lo, k.hi),
        None => format!("x{var}"),
    }
}

pub fn write_lp(lp: &RelaxedCutLP) -> String {
    let mut out = String::new();
    let used: Vec<usize> = {
        let mut v: Vec<usize> = lp.rows().iter().flatten().copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    writeln!(
        out,
        "\\ relaxed cut LP: {} variables, {} rows",
        used.len(),
        lp.rows().len()
    )
    .unwrap();
    out.push_str("Minimize\n obj:");
    for (i, &v) in used.iter().enumerate() {
        let sep = if i == 0 { " " } else { " + " };
        write!(out, "{sep}{} {}", lp.costs()[v], name(lp, v)).unwrap();
    }
    out.push_str("\nSubject To\n");
    for (i, row) in lp.rows().iter().enumerate() {
        let terms: Vec<String> = row.iter().map(|&v| name(lp, v)).collect();
        writeln!(out, " p{i}: {} >= 1", terms.join(" + ")).unwrap();
    }
    out.push_str("Bounds\n");
    for &v in &used {
        writeln!(out, " 0 <= {} <= 1", name(lp, v)).unwrap();
    }
    out.push_str("End\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Graph, Path};

    #[test]
    fn exact_layout() {
        let lp = RelaxedCutLP::new(vec![4.0, 1.5, 2.0], vec![vec![0, 1], vec![1]]).unwrap();
        assert_eq!(
            write_lp(&lp),
            "\\ relaxed cut LP: 2 variables, 2 rows\n\
             Minimize\n obj: 4 x0 + 1.5 x1\n\
             Subject To\n p0: x0 + x1 >= 1\n p1: x1 >= 1\n\
             Bounds\n 0 <= x0 <= 1\n 0 <= x1 <= 1\n\
             End\n"
        );
    }

    #[test]
    fn edge_names() {
        let g = Graph::with_costs_as_weights(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0)]).unwrap();
        let p_star = Path::new(&g, vec![0, 2]).unwrap();
        let other = Path::new(&g, vec![0, 1, 2]).unwrap();
        let lp = RelaxedCutLP::for_paths(&g, &p_star, &[other]).unwrap();
        let text = write_lp(&lp);
        assert!(text.contains(" p0: e_0_1 + e_1_2 >= 1\n"));
        assert!(!text.contains("e_0_2"));
    }
}
