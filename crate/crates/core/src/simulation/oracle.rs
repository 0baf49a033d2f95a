//! Exhaustive basis enumeration, independent of the simplex solver.

use num_traits::{Signed, Zero};

use crate::demand::DynamicStochasticDemand;
use crate::error::{DrumError, Result};
use crate::rational::Rational;
use crate::rationality::ProfileMatrix;

pub const DEFAULT_ORACLE_CAP: usize = 12;

/// Row-reduces `m` in place; returns the pivot columns among the first
/// `cols` columns.
fn reduce(m: &mut [Vec<Rational>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let lead = m[row][col].clone();
        for v in m[row].iter_mut() {
            *v /= &lead;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..m[r].len() {
                    let d = &f * &m[row][c];
                    m[r][c] -= d;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    pivots
}

/// Whether `rho` lies in the cone of the matrix columns, by trying every
/// basis of the column space. Refuses matrices with more than `cap`
/// columns.
pub fn brute_force_verdict(
    matrix: &ProfileMatrix,
    rho: &DynamicStochasticDemand,
    cap: usize,
) -> Result<bool> {
    let n = matrix.column_count();
    if n > cap {
        return Err(DrumError::OracleCap { columns: n, cap });
    }
    let b = rho.vector(matrix.rows());
    let a: Vec<Vec<Rational>> = matrix
        .dense()
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|x| Rational::from_integer(x.into()))
                .collect()
        })
        .collect();
    let augmented = |cols: &[usize]| -> Vec<Vec<Rational>> {
        a.iter()
            .zip(&b)
            .map(|(row, rhs)| {
                let mut r: Vec<Rational> = cols.iter().map(|&c| row[c].clone()).collect();
                r.push(rhs.clone());
                r
            })
            .collect()
    };
    let all: Vec<usize> = (0..n).collect();
    let mut full = augmented(&all);
    let pivots = reduce(&mut full, n);
    let rank = pivots.len();
    if full[rank..].iter().any(|r| !r[n].is_zero()) {
        return Ok(false);
    }
    if rank == 0 {
        return Ok(b.iter().all(Zero::is_zero));
    }
    let mut subset: Vec<usize> = (0..rank).collect();
    loop {
        let mut m = augmented(&subset);
        if reduce(&mut m, rank).len() == rank && m.iter().take(rank).all(|r| !r[rank].is_negative())
        {
            return Ok(true);
        }
        // next subset in lexicographic order
        let Some(i) = (0..rank).rev().find(|&i| subset[i] < n - rank + i) else {
            return Ok(false);
        };
        subset[i] += 1;
        for k in i + 1..rank {
            subset[k] = subset[k - 1] + 1;
        }
    }
}
