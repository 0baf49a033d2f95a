//! Dynamic stochastic demand: probabilities over choice paths, conditional on
//! the observed budget path.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::error::{DrumError, Result};
use crate::rational::{self, Rational};
use crate::rationality::{BudgetPath, ChoiceDomain, ChoicePath};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DynamicStochasticDemand {
    entries: BTreeMap<ChoicePath, Rational>,
}

impl DynamicStochasticDemand {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (ChoicePath, Rational)>) -> Self {
        let mut d = Self::new();
        for (cp, p) in entries {
            d.add(cp, p);
        }
        d
    }

    /// Adds `p` to the probability of `cp`.
    pub fn add(&mut self, cp: ChoicePath, p: Rational) {
        *self.entries.entry(cp).or_insert_with(Rational::zero) += p;
    }

    pub fn set(&mut self, cp: ChoicePath, p: Rational) {
        self.entries.insert(cp, p);
    }

    /// Probability of a choice path; zero when absent.
    pub fn get(&self, cp: &ChoicePath) -> Rational {
        self.entries.get(cp).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&ChoicePath, &Rational)> {
        self.entries.iter()
    }

    /// Entries with nonzero probability.
    pub fn support(&self) -> impl Iterator<Item = (&ChoicePath, &Rational)> {
        self.entries.iter().filter(|(_, p)| !p.is_zero())
    }

    pub fn block_sums(&self) -> BTreeMap<BudgetPath, Rational> {
        let mut sums = BTreeMap::new();
        for (cp, p) in &self.entries {
            *sums
                .entry(cp.budgets.clone())
                .or_insert_with(Rational::zero) += p;
        }
        sums
    }

    /// Checks support, sign and per-budget-path normalization.
    pub fn validate(&self, domain: &ChoiceDomain) -> Result<()> {
        for (cp, p) in &self.entries {
            if !domain.is_observed(&cp.budgets) {
                return Err(DrumError::UnknownBudgetPath(cp.budgets.to_string()));
            }
            let supported = cp
                .patches
                .iter()
                .enumerate()
                .all(|(t, i)| domain.support(t, cp.budgets.0[t]).contains(i));
            if cp.patches.len() != domain.horizon() || !supported {
                return Err(DrumError::UnknownChoicePath(cp.to_string()));
            }
            if p.is_negative() {
                return Err(DrumError::NegativeProbability {
                    path: cp.to_string(),
                    value: rational::format(p),
                });
            }
        }
        let sums = self.block_sums();
        for bp in &domain.budget_paths {
            let sum = sums.get(bp).cloned().unwrap_or_else(Rational::zero);
            if !sum.is_one() {
                return Err(DrumError::NotNormalized {
                    path: bp.to_string(),
                    sum: rational::format(&sum),
                });
            }
        }
        Ok(())
    }

    /// Probabilities aligned with `rows`.
    pub fn vector(&self, rows: &[ChoicePath]) -> Vec<Rational> {
        rows.iter().map(|cp| self.get(cp)).collect()
    }

    pub fn from_vector(rows: &[ChoicePath], values: &[Rational]) -> Self {
        Self::from_entries(rows.iter().cloned().zip(values.iter().cloned()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;
    use crate::reference;

    #[test]
    fn normalization_is_checked_per_budget_path() {
        let domain = reference::simple_setup_domain();
        let rho = reference::table5();
        rho.validate(&domain).unwrap();
        let mut bad = rho.clone();
        bad.set(ChoicePath::new(vec![0, 0], vec![0, 0]), frac(13, 20));
        match bad.validate(&domain) {
            Err(DrumError::NotNormalized { path, sum }) => {
                assert_eq!(path, "[1,1]");
                assert_eq!(sum, "9/10");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_paths_and_negative_mass() {
        let domain = reference::simple_setup_domain();
        let mut rho = reference::table5();
        rho.set(ChoicePath::new(vec![0, 0], vec![0, 5]), frac(0, 1));
        assert!(matches!(
            rho.validate(&domain),
            Err(DrumError::UnknownChoicePath(_))
        ));
        let mut neg = reference::table5();
        neg.set(ChoicePath::new(vec![0, 0], vec![0, 1]), frac(-1, 4));
        assert!(neg.validate(&domain).is_err());
    }
}
