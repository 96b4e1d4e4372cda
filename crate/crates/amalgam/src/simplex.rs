//! Exact phase-1 simplex over the rationals.
//!
//! Decides feasibility of `A x = b, x >= 0` (with `b >= 0`) by minimizing
//! the sum of artificial variables. Bland's rule on both the entering and
//! leaving choices guarantees termination without any numeric tolerance.

use num::Zero;

use crate::rational::{rat_int, Rat};

/// Returns a nonnegative solution of `A x = b` when one exists, else `None`.
/// Rows are `(coefficients, rhs)`; every rhs must be nonnegative.
pub fn feasible_point(num_vars: usize, rows: &[(Vec<Rat>, Rat)]) -> Option<Vec<Rat>> {
    let ne = rows.len();
    let total = num_vars + ne;
    let mut tab: Vec<Vec<Rat>> = Vec::with_capacity(ne);
    let mut rhs: Vec<Rat> = Vec::with_capacity(ne);
    for (i, (coeffs, b)) in rows.iter().enumerate() {
        assert_eq!(coeffs.len(), num_vars);
        assert!(*b >= Rat::zero(), "phase-1 rhs must be nonnegative");
        let mut row = vec![rat_int(0); total];
        row[..num_vars].clone_from_slice(coeffs);
        row[num_vars + i] = rat_int(1);
        tab.push(row);
        rhs.push(b.clone());
    }
    let mut basis: Vec<usize> = (num_vars..total).collect();

    loop {
        // Reduced costs (cost 1 on artificials, 0 elsewhere), recomputed
        // from the basis: exact, and immune to update-sign slips.
        let mut red = vec![rat_int(0); total];
        for i in 0..ne {
            if basis[i] >= num_vars {
                for j in 0..total {
                    red[j] -= &tab[i][j];
                }
            }
        }
        for j in num_vars..total {
            red[j] += rat_int(1);
        }

        // Bland: smallest-index column with negative reduced cost.
        let entering = match (0..total).find(|&j| red[j] < Rat::zero()) {
            Some(j) => j,
            None => break,
        };
        // Ratio test; ties broken by smallest basic variable index.
        let mut leave: Option<usize> = None;
        let mut best: Option<Rat> = None;
        for i in 0..ne {
            if tab[i][entering] > Rat::zero() {
                let ratio = &rhs[i] / &tab[i][entering];
                let better = match &best {
                    None => true,
                    Some(b) => {
                        ratio < *b
                            || (ratio == *b && basis[i] < basis[leave.unwrap()])
                    }
                };
                if better {
                    best = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let r = leave.expect("phase-1 objective is bounded below");

        // Pivot on (r, entering).
        let piv = tab[r][entering].clone();
        for v in tab[r].iter_mut() {
            if !v.is_zero() {
                *v /= &piv;
            }
        }
        rhs[r] /= &piv;
        for i in 0..ne {
            if i == r || tab[i][entering].is_zero() {
                continue;
            }
            let f = tab[i][entering].clone();
            for j in 0..total {
                if !tab[r][j].is_zero() {
                    let sub = &f * &tab[r][j];
                    tab[i][j] -= sub;
                }
            }
            let sub = &f * &rhs[r];
            rhs[i] -= sub;
        }
        basis[r] = entering;
    }

    let mut obj = Rat::zero();
    for i in 0..ne {
        if basis[i] >= num_vars {
            obj += &rhs[i];
        }
    }
    if !obj.is_zero() {
        return None;
    }
    let mut x = vec![rat_int(0); num_vars];
    for i in 0..ne {
        if basis[i] < num_vars {
            x[basis[i]] = rhs[i].clone();
        }
    }
    Some(x)
}
