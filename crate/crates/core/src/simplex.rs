//! Exact phase-one simplex for `A x = b, x >= 0`.
//!
//! Dense tableau over rationals with Bland's rule. One artificial variable
//! per row starts in the basis; minimizing their sum either reaches zero
//! (a feasible vertex) or stops at a positive optimum whose dual solution
//! `y` satisfies `y^T A <= 0` and `y^T b > 0`.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone)]
pub(crate) enum PhaseOne {
    Feasible { x: Vec<Rational>, pivots: usize },
    Infeasible { y: Vec<Rational>, pivots: usize },
}

pub(crate) fn phase_one(a: &[Vec<Rational>], b: &[Rational], columns: usize) -> PhaseOne {
    let m = a.len();
    let n = columns;
    let width = n + m;
    // rows with negative right-hand side are negated so artificials start feasible
    let flip: Vec<bool> = b.iter().map(|v| v.is_negative()).collect();
    let mut tab: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut rhs: Vec<Rational> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![Rational::zero(); width];
        for j in 0..n {
            row[j] = if flip[i] { -&a[i][j] } else { a[i][j].clone() };
        }
        row[n + i] = Rational::one();
        tab.push(row);
        rhs.push(if flip[i] { -&b[i] } else { b[i].clone() });
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut reduced = vec![Rational::zero(); width];
    for j in 0..n {
        reduced[j] = -tab.iter().fold(Rational::zero(), |acc, row| acc + &row[j]);
    }
    let mut objective: Rational = rhs.iter().fold(Rational::zero(), |acc, v| acc + v);
    let mut pivots = 0;

    while let Some(enter) = (0..width).find(|&j| reduced[j].is_negative()) {
        let mut leave: Option<usize> = None;
        let mut best: Option<Rational> = None;
        for i in 0..m {
            if !tab[i][enter].is_positive() {
                continue;
            }
            let ratio = &rhs[i] / &tab[i][enter];
            let better = match &best {
                None => true,
                Some(r) => ratio < *r || (ratio == *r && basis[i] < basis[leave.unwrap()]),
            };
            if better {
                best = Some(ratio);
                leave = Some(i);
            }
        }
        let r = leave.expect("phase one is bounded below");
        let piv = tab[r][enter].clone();
        for v in tab[r].iter_mut() {
            if !v.is_zero() {
                *v /= &piv;
            }
        }
        rhs[r] /= &piv;
        let pivot_row = tab[r].clone();
        let pivot_rhs = rhs[r].clone();
        for i in 0..m {
            if i == r || tab[i][enter].is_zero() {
                continue;
            }
            let f = tab[i][enter].clone();
            for (v, p) in tab[i].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
            rhs[i] -= &f * &pivot_rhs;
        }
        let f = reduced[enter].clone();
        for (v, p) in reduced.iter_mut().zip(&pivot_row) {
            if !p.is_zero() {
                *v -= &f * p;
            }
        }
        objective += &f * &pivot_rhs;
        basis[r] = enter;
        pivots += 1;
    }

    if objective.is_zero() {
        let mut x = vec![Rational::zero(); n];
        for (i, &v) in basis.iter().enumerate() {
            if v < n {
                x[v] = rhs[i].clone();
            }
        }
        PhaseOne::Feasible { x, pivots }
    } else {
        let y = (0..m)
            .map(|i| {
                let yi = Rational::one() - &reduced[n + i];
                if flip[i] {
                    -yi
                } else {
                    yi
                }
            })
            .collect();
        PhaseOne::Infeasible { y, pivots }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{dot, frac, int};

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| int(v)).collect())
            .collect()
    }

    #[test]
    fn finds_feasible_vertex() {
        let a = mat(&[&[1, 1, 0], &[0, 1, 1]]);
        let b = vec![frac(1, 2), frac(3, 4)];
        match phase_one(&a, &b, 3) {
            PhaseOne::Feasible { x, .. } => {
                assert!(x.iter().all(|v| !v.is_negative()));
                for (row, bi) in a.iter().zip(&b) {
                    assert_eq!(dot(row, &x), *bi);
                }
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn infeasible_system_yields_farkas_ray() {
        // x1 = 1 and x1 = 2 cannot both hold
        let a = mat(&[&[1], &[1]]);
        let b = vec![int(1), int(2)];
        match phase_one(&a, &b, 1) {
            PhaseOne::Infeasible { y, .. } => {
                assert!(dot(&y, &b).is_positive());
                assert!(!(&y[0] + &y[1]).is_positive());
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn handles_negative_right_hand_side() {
        let a = mat(&[&[1, -1]]);
        let b = vec![int(-2)];
        assert!(matches!(phase_one(&a, &b, 2), PhaseOne::Feasible { .. }));
        let a = mat(&[&[1, 1]]);
        match phase_one(&a, &b, 2) {
            PhaseOne::Infeasible { y, .. } => {
                assert!(dot(&y, &b).is_positive());
                assert!(!y[0].is_positive());
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }
}
