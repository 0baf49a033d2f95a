//! Exact decision of `rho = A nu, nu >= 0`.
//!
//! A feasible system yields mixing weights over profiles; an infeasible one
//! yields a vector `d` over choice paths with `d . rho > max_r d . a_r`.
//! Both outcomes are re-verified before they are returned.
//!
//! Reading a certificate as a violated revealed-preference sequence: every
//! profile column holds exactly one 1 inside each budget-path block, and the
//! demand sums to one on every block, so adding a constant to all entries of
//! one block shifts both sides of the inequality equally. Shifting each
//! block so its smallest entry is zero and clearing denominators turns `d`
//! into nonnegative integer multiplicities `m` over choice paths with
//! `sum m rho > max_r sum m a_r`: a finite sequence of choice paths, with
//! repetitions, on which the demand exceeds what any single profile can
//! produce. See [`Verdict::violating_sequence`].

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::demand::DynamicStochasticDemand;
use crate::error::{DrumError, Result};
use crate::rational::{self, Rational};
use crate::rationality::{BudgetPath, ChoicePath, ProfileMatrix};
use crate::simplex::{phase_one, PhaseOne};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Feasible,
    Infeasible,
}

#[derive(Debug, Clone, Default)]
pub struct Diagnostics {
    pub rows: usize,
    pub columns: usize,
    pub pivots: usize,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub status: Status,
    /// Mixing weight per profile column, when feasible.
    pub weights: Option<Vec<Rational>>,
    /// Separating vector over the matrix rows, when infeasible.
    pub certificate: Option<Vec<Rational>>,
    pub witness_verified: bool,
    pub certificate_verified: bool,
    pub diagnostics: Diagnostics,
}

impl Verdict {
    pub fn is_feasible(&self) -> bool {
        self.status == Status::Feasible
    }

    /// Certificate as nonnegative integer multiplicities over choice paths
    /// (zero entries dropped), following the block-shift reading above.
    pub fn violating_sequence(&self, matrix: &ProfileMatrix) -> Option<Vec<(ChoicePath, BigInt)>> {
        let d = self.certificate.as_ref()?;
        Some(violating_sequence(matrix, d))
    }
}

pub fn violating_sequence(matrix: &ProfileMatrix, d: &[Rational]) -> Vec<(ChoicePath, BigInt)> {
    let mut block_min: BTreeMap<&BudgetPath, Rational> = BTreeMap::new();
    for (cp, v) in matrix.rows().iter().zip(d) {
        block_min
            .entry(&cp.budgets)
            .and_modify(|m| {
                if v < m {
                    *m = v.clone()
                }
            })
            .or_insert_with(|| v.clone());
    }
    let shifted: Vec<Rational> = matrix
        .rows()
        .iter()
        .zip(d)
        .map(|(cp, v)| v - &block_min[&cp.budgets])
        .collect();
    let scale = Rational::from_integer(rational::common_denominator(&shifted));
    matrix
        .rows()
        .iter()
        .zip(&shifted)
        .filter(|(_, v)| !v.is_zero())
        .map(|(cp, v)| (cp.clone(), (v * &scale).to_integer()))
        .collect()
}

fn check_alignment(matrix: &ProfileMatrix, rho: &DynamicStochasticDemand) -> Result<()> {
    for (cp, _) in rho.entries() {
        if matrix.space.row(cp).is_none() {
            return Err(DrumError::UnknownChoicePath(cp.to_string()));
        }
    }
    rho.validate(&matrix.space.domain)
}

/// Decides whether the demand is a nonnegative combination of the matrix
/// columns.
pub fn test_drum(matrix: &ProfileMatrix, rho: &DynamicStochasticDemand) -> Result<Verdict> {
    let started = Instant::now();
    check_alignment(matrix, rho)?;
    let b = rho.vector(matrix.rows());
    let dense: Vec<Vec<Rational>> = matrix
        .dense()
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|v| Rational::from_integer(v.into()))
                .collect()
        })
        .collect();
    let outcome = phase_one(&dense, &b, matrix.column_count());
    let mut verdict = match outcome {
        PhaseOne::Feasible { x, pivots } => {
            let ok = verify_witness(matrix, rho, &x);
            assert!(ok, "simplex witness failed verification");
            let total = x.iter().fold(Rational::zero(), |acc, v| acc + v);
            assert!(total.is_one(), "witness weights sum to {total}");
            Verdict {
                status: Status::Feasible,
                weights: Some(x),
                certificate: None,
                witness_verified: ok,
                certificate_verified: false,
                diagnostics: Diagnostics {
                    pivots,
                    ..Diagnostics::default()
                },
            }
        }
        PhaseOne::Infeasible { y, pivots } => {
            let ok = verify_certificate(matrix, rho, &y);
            assert!(ok, "simplex certificate failed verification");
            Verdict {
                status: Status::Infeasible,
                weights: None,
                certificate: Some(y),
                witness_verified: false,
                certificate_verified: ok,
                diagnostics: Diagnostics {
                    pivots,
                    ..Diagnostics::default()
                },
            }
        }
    };
    verdict.diagnostics.rows = matrix.row_count();
    verdict.diagnostics.columns = matrix.column_count();
    verdict.diagnostics.elapsed = started.elapsed();
    Ok(verdict)
}

/// `nu >= 0` and `A nu = rho`, exactly.
pub fn verify_witness(
    matrix: &ProfileMatrix,
    rho: &DynamicStochasticDemand,
    nu: &[Rational],
) -> bool {
    if nu.len() != matrix.column_count() || nu.iter().any(Signed::is_negative) {
        return false;
    }
    let mut image = vec![Rational::zero(); matrix.row_count()];
    for (col, w) in matrix.columns.iter().zip(nu) {
        if w.is_zero() {
            continue;
        }
        for &r in col {
            image[r] += w;
        }
    }
    let covered = rho.entries().all(|(cp, _)| matrix.space.row(cp).is_some());
    covered && image == rho.vector(matrix.rows())
}

/// `d . rho > max_r d . a_r`, exactly.
pub fn verify_certificate(
    matrix: &ProfileMatrix,
    rho: &DynamicStochasticDemand,
    d: &[Rational],
) -> bool {
    if d.len() != matrix.row_count() {
        return false;
    }
    let lhs = rational::dot(d, &rho.vector(matrix.rows()));
    let best = matrix
        .columns
        .iter()
        .map(|col| col.iter().fold(Rational::zero(), |acc, &r| acc + &d[r]))
        .max();
    match best {
        Some(best) => lhs > best,
        None => lhs.is_positive(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;
    use crate::rationality::DEFAULT_MAX_ENTRIES;
    use crate::reference;

    fn simple_matrix() -> ProfileMatrix {
        ProfileMatrix::of(&reference::simple_setup_domain(), DEFAULT_MAX_ENTRIES).unwrap()
    }

    #[test]
    fn single_column_is_feasible() {
        let m = simple_matrix();
        for c in 0..m.column_count() {
            let rho = DynamicStochasticDemand::from_entries(
                m.columns[c]
                    .iter()
                    .map(|&r| (m.rows()[r].clone(), Rational::one())),
            );
            let v = test_drum(&m, &rho).unwrap();
            assert!(v.is_feasible());
            assert!(verify_witness(&m, &rho, v.weights.as_ref().unwrap()));
        }
    }

    #[test]
    fn reference_tables_are_rejected() {
        let m = simple_matrix();
        for rho in [reference::table5(), reference::table6()] {
            let v = test_drum(&m, &rho).unwrap();
            assert_eq!(v.status, Status::Infeasible);
            let d = v.certificate.as_ref().unwrap();
            assert!(verify_certificate(&m, &rho, d));
            let seq = v.violating_sequence(&m).unwrap();
            assert!(seq.iter().all(|(_, k)| !k.is_negative()));
            let lhs = seq.iter().fold(Rational::zero(), |acc, (cp, k)| {
                acc + rho.get(cp) * Rational::from_integer(k.clone())
            });
            let best = m
                .columns
                .iter()
                .map(|col| {
                    seq.iter()
                        .filter(|(cp, _)| col.contains(&m.space.row(cp).unwrap()))
                        .fold(BigInt::zero(), |acc, (_, k)| acc + k)
                })
                .max()
                .unwrap();
            assert!(lhs > Rational::from_integer(best));
        }
    }

    #[test]
    fn zero_certificate_and_negative_weights_fail() {
        let m = simple_matrix();
        let rho = reference::table5();
        assert!(!verify_certificate(
            &m,
            &rho,
            &vec![Rational::zero(); m.row_count()]
        ));
        let mut nu = vec![frac(1, 9); 9];
        nu[0] = frac(-1, 9);
        assert!(!verify_witness(&m, &rho, &nu));
        assert!(!verify_witness(&m, &rho, &[Rational::one()]));
    }

    #[test]
    fn non_normalized_demand_names_the_block() {
        let m = simple_matrix();
        let mut rho = reference::table5();
        rho.set(reference::grid_path(0, 0), frac(1, 2));
        match test_drum(&m, &rho) {
            Err(DrumError::NotNormalized { path, .. }) => assert_eq!(path, "[1,1]"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
