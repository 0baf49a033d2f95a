//! Pooling a panel across periods into a single cross-section.
//!
//! Every budget of every period becomes one budget of a single arrangement.
//! Its patches refine the per-period patches, so pooling needs the chosen
//! points, not only their per-period patches.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::axioms::{test_rum_static, Marginal};
use crate::error::{DrumError, Result};
use crate::feasibility::Verdict;
use crate::geometry::{build_arrangement, Budget, PatchId, PatchSet};
use crate::panel::{classify_row, Panel};
use crate::rational::{self, Rational};

#[derive(Debug, Clone)]
pub struct PooledPatchSet {
    /// All budgets of all periods as one arrangement; budget `b` of the
    /// arrangement is `owners[b]`.
    pub arrangement: PatchSet,
    /// `(period, index)` of each pooled budget.
    pub owners: Vec<(usize, usize)>,
    pub periods: Vec<PatchSet>,
    /// For each pooled patch, the per-period patch containing it.
    pub refinement: Vec<Vec<PatchId>>,
}

impl PooledPatchSet {
    pub fn pooled_budget(&self, period: usize, index: usize) -> Option<usize> {
        self.owners.iter().position(|&o| o == (period, index))
    }

    pub fn refines(&self, id: PatchId) -> (usize, PatchId) {
        (self.owners[id.owner].0, self.refinement[id.owner][id.patch])
    }

    /// `xi{t}_{k|j}` with the period and budget of the owner.
    pub fn label(&self, id: PatchId) -> String {
        let (t, j) = self.owners[id.owner];
        format!("xi{}_{{{}|{}}}", t + 1, id.patch + 1, j + 1)
    }

    pub fn patch_count(&self) -> usize {
        self.arrangement.patch_count()
    }
}

/// Builds the pooled arrangement. Budgets repeated across periods are
/// rejected.
pub fn build_pooled_patches(periods: &[PatchSet]) -> Result<PooledPatchSet> {
    let all: Vec<&Budget> = periods.iter().flat_map(|s| s.budgets.iter()).collect();
    for (a, first) in all.iter().enumerate() {
        for second in &all[a + 1..] {
            if first.period != second.period && first.same_plane(second) {
                return Err(DrumError::RepeatedBudget {
                    first: first.label(),
                    second: second.label(),
                });
            }
        }
    }
    let owners: Vec<(usize, usize)> = all.iter().map(|b| (b.period, b.index)).collect();
    let budgets: Vec<Budget> = all
        .iter()
        .enumerate()
        .map(|(pos, b)| Budget {
            period: 0,
            index: pos,
            prices: b.prices.clone(),
            expenditure: b.expenditure.clone(),
        })
        .collect();
    let arrangement = build_arrangement(0, budgets)?;
    let refinement = arrangement
        .patches
        .iter()
        .enumerate()
        .map(|(b, own)| {
            let (t, j) = owners[b];
            let set = periods
                .iter()
                .find(|s| s.period == t)
                .expect("owner period present");
            own.iter()
                .map(|p| {
                    set.classify_on(&p.representative, j)
                        .expect("pooled patch on its budget")
                })
                .collect()
        })
        .collect();
    Ok(PooledPatchSet {
        arrangement,
        owners,
        periods: periods.to_vec(),
        refinement,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weighting {
    /// Each (agent, period) observation counts once, scaled by agent weight.
    #[default]
    Observation,
    /// Each agent contributes the same total mass across its observations.
    Agent,
}

/// Choice frequencies over pooled patches, normalized per pooled budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PooledDemand {
    pub values: BTreeMap<PatchId, Rational>,
}

impl PooledDemand {
    pub fn get(&self, id: PatchId) -> Rational {
        self.values.get(&id).cloned().unwrap_or_else(Rational::zero)
    }
}

impl fmt::Display for PooledDemand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (id, v) in &self.values {
            writeln!(f, "{id:?} {}", rational::format(v))?;
        }
        Ok(())
    }
}

/// Classifies each chosen point into the pooled arrangement and aggregates
/// frequencies per pooled budget, ignoring time labels.
pub fn pool(panel: &Panel, pooled: &PooledPatchSet, weighting: Weighting) -> Result<PooledDemand> {
    if panel.is_empty() {
        return Err(DrumError::EmptyPanel);
    }
    let mut per_agent: BTreeMap<usize, usize> = BTreeMap::new();
    for row in &panel.rows {
        *per_agent.entry(row.agent).or_default() += 1;
    }
    let mut values: BTreeMap<PatchId, Rational> = BTreeMap::new();
    let mut totals: BTreeMap<usize, Rational> = BTreeMap::new();
    for (n, row) in panel.rows.iter().enumerate() {
        // validates the row against its own period first
        classify_row(n, row, &pooled.periods)?;
        let b = pooled
            .pooled_budget(row.period, row.budget)
            .expect("validated budget is pooled");
        let id = pooled
            .arrangement
            .classify_on(&row.point, b)
            .expect("point on its budget");
        let mut w = panel.weight(row.agent);
        if weighting == Weighting::Agent {
            w /= Rational::from_integer(per_agent[&row.agent].into());
        }
        *totals.entry(b).or_insert_with(Rational::zero) += &w;
        *values.entry(id).or_insert_with(Rational::zero) += w;
    }
    for &b in totals.keys() {
        for p in &pooled.arrangement.patches[b] {
            values.entry(p.id()).or_insert_with(Rational::zero);
        }
    }
    for (id, v) in values.iter_mut() {
        *v /= &totals[&id.owner];
    }
    Ok(PooledDemand { values })
}

/// Static random-utility test on the pooled cross-section.
pub fn test_rum_pooled(
    demand: &PooledDemand,
    pooled: &PooledPatchSet,
    continuous_demand: bool,
    max_entries: u128,
) -> Result<Verdict> {
    let marginal = Marginal {
        period: 0,
        values: demand.values.clone(),
    };
    test_rum_static(
        &marginal,
        &pooled.arrangement,
        continuous_demand,
        max_entries,
    )
}
