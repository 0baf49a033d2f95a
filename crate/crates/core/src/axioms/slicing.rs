use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;

use crate::demand::DynamicStochasticDemand;
use crate::error::Result;
use crate::feasibility::{test_drum, Verdict};
use crate::geometry::{PatchId, PatchSet};
use crate::rational::{self, Rational};
use crate::rationality::{BudgetPath, ChoiceDomain, ChoicePath, ProfileMatrix};

/// Choice probabilities over the patches of one period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Marginal {
    pub period: usize,
    pub values: BTreeMap<PatchId, Rational>,
}

impl Marginal {
    pub fn get(&self, id: PatchId) -> Option<&Rational> {
        self.values.get(&id)
    }

    /// Budgets the marginal covers.
    pub fn budgets(&self) -> BTreeSet<usize> {
        self.values.keys().map(|id| id.owner).collect()
    }
}

/// The marginal computed from the budget paths that share the budgets of
/// every other period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    /// Budgets of the other periods, in period order.
    pub others: Vec<usize>,
    pub marginal: Marginal,
}

impl Family {
    pub fn label(&self, domain: &ChoiceDomain) -> String {
        let tau = self.marginal.period;
        let periods = (0..domain.horizon()).filter(|&t| t != tau);
        let parts: Vec<String> = periods
            .zip(&self.others)
            .map(|(t, &j)| domain.periods[t].budgets[j].label())
            .collect();
        if parts.is_empty() {
            "(none)".into()
        } else {
            parts.join(",")
        }
    }
}

#[derive(Debug, Clone)]
pub struct MarginalDemand {
    pub period: usize,
    pub families: Vec<Family>,
    /// Every patch gets the same value from every family that observes it.
    pub well_defined: bool,
    /// The common marginal, when well defined.
    pub common: Option<Marginal>,
    /// Patches whose budget appears on no observed budget path.
    pub unobserved: Vec<PatchId>,
}

impl fmt::Display for Marginal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .values
            .iter()
            .map(|(id, v)| {
                format!(
                    "({},{})={}",
                    id.patch + 1,
                    id.owner + 1,
                    rational::format(v)
                )
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// Marginal demand of period `tau`, computed separately for each family of
/// budget paths that agree outside `tau`.
pub fn slice(rho: &DynamicStochasticDemand, domain: &ChoiceDomain, tau: usize) -> MarginalDemand {
    let mut families: BTreeMap<Vec<usize>, Marginal> = BTreeMap::new();
    for bp in &domain.budget_paths {
        let mut others = bp.0.clone();
        let j = others.remove(tau);
        let marginal = families.entry(others).or_insert_with(|| Marginal {
            period: tau,
            values: BTreeMap::new(),
        });
        for i in domain.support(tau, j) {
            marginal
                .values
                .entry(PatchId { owner: j, patch: i })
                .or_insert_with(Rational::zero);
        }
        for cp in domain.choice_paths(bp) {
            let id = PatchId {
                owner: j,
                patch: cp.patches[tau],
            };
            *marginal.values.get_mut(&id).expect("supported patch") += rho.get(&cp);
        }
    }
    let families: Vec<Family> = families
        .into_iter()
        .map(|(others, marginal)| Family { others, marginal })
        .collect();

    let mut merged: BTreeMap<PatchId, Rational> = BTreeMap::new();
    let mut well_defined = true;
    for family in &families {
        for (id, v) in &family.marginal.values {
            match merged.get(id) {
                Some(seen) if seen != v => well_defined = false,
                Some(_) => {}
                None => {
                    merged.insert(*id, v.clone());
                }
            }
        }
    }
    let unobserved = (0..domain.periods[tau].budgets.len())
        .flat_map(|j| {
            domain
                .support(tau, j)
                .into_iter()
                .map(move |i| PatchId { owner: j, patch: i })
        })
        .filter(|id| !merged.contains_key(id))
        .collect();
    MarginalDemand {
        period: tau,
        families,
        well_defined,
        common: well_defined.then_some(Marginal {
            period: tau,
            values: merged,
        }),
        unobserved,
    }
}

/// Static random-utility test of one period's marginal over the budgets it
/// covers.
pub fn test_rum_static(
    marginal: &Marginal,
    set: &PatchSet,
    continuous_demand: bool,
    max_entries: u128,
) -> Result<Verdict> {
    let paths = marginal
        .budgets()
        .into_iter()
        .map(|j| BudgetPath(vec![j]))
        .collect();
    let domain = ChoiceDomain::new(vec![set.clone()], paths, continuous_demand)?;
    let matrix = ProfileMatrix::of(&domain, max_entries)?;
    // zero mass on patches outside the choice support carries no information
    let rho = DynamicStochasticDemand::from_entries(
        marginal
            .values
            .iter()
            .filter(|(id, v)| {
                !(v.is_zero() && continuous_demand && set.patch(**id).is_intersection)
            })
            .map(|(id, v)| (ChoicePath::new(vec![id.owner], vec![id.patch]), v.clone())),
    );
    test_drum(&matrix, &rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;
    use crate::rationality::DEFAULT_MAX_ENTRIES;
    use crate::reference;

    fn pid(owner: usize, patch: usize) -> PatchId {
        PatchId { owner, patch }
    }

    #[test]
    fn table6_period_one_depends_on_second_budget() {
        let domain = reference::simple_setup_domain();
        let m = slice(&reference::table6(), &domain, 0);
        assert!(!m.well_defined);
        assert!(m.common.is_none());
        assert_eq!(m.families.len(), 2);
        let first = &m.families[0].marginal;
        let second = &m.families[1].marginal;
        assert_eq!(first.get(pid(0, 1)), Some(&frac(1, 2)));
        assert_eq!(first.get(pid(1, 0)), Some(&frac(1, 2)));
        assert_eq!(second.get(pid(0, 1)), Some(&frac(1, 3)));
        assert_eq!(second.get(pid(1, 0)), Some(&frac(2, 3)));
        for family in &m.families {
            let v = test_rum_static(
                &family.marginal,
                &domain.periods[0],
                true,
                DEFAULT_MAX_ENTRIES,
            )
            .unwrap();
            assert!(v.is_feasible());
        }
    }

    #[test]
    fn wasrp_violation_is_rejected() {
        let domain = reference::simple_setup_domain();
        let marginal = Marginal {
            period: 0,
            values: [
                (pid(0, 0), frac(0, 1)),
                (pid(0, 1), frac(1, 1)),
                (pid(1, 0), frac(1, 1)),
                (pid(1, 1), frac(0, 1)),
            ]
            .into_iter()
            .collect(),
        };
        let v = test_rum_static(&marginal, &domain.periods[0], true, DEFAULT_MAX_ENTRIES).unwrap();
        assert!(!v.is_feasible());
    }

    #[test]
    fn single_path_is_well_defined() {
        let mut domain = reference::simple_setup_domain();
        domain.budget_paths.truncate(1);
        let rho = DynamicStochasticDemand::from_entries([(reference::grid_path(0, 0), frac(1, 1))]);
        let m = slice(&rho, &domain, 1);
        assert!(m.well_defined);
        assert_eq!(m.unobserved, vec![pid(1, 0), pid(1, 1)]);
    }
}
