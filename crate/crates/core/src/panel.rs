//! Point-level choice panels and the empirical demands they induce.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::demand::DynamicStochasticDemand;
use crate::error::{DrumError, Result};
use crate::geometry::{PatchId, PatchSet, Point};
use crate::rational::{self, Rational};
use crate::rationality::{BudgetPath, ChoiceDomain, ChoicePath};

/// One observed choice: agent `agent` picked `point` on budget `budget` of
/// period `period` (both 0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PanelRow {
    pub agent: usize,
    pub period: usize,
    pub budget: usize,
    pub point: Point,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Panel {
    pub rows: Vec<PanelRow>,
    /// Sampling weight per agent; agents not listed weigh 1.
    pub weights: BTreeMap<usize, Rational>,
}

impl Panel {
    pub fn weight(&self, agent: usize) -> Rational {
        self.weights
            .get(&agent)
            .cloned()
            .unwrap_or_else(Rational::one)
    }

    pub fn agents(&self) -> Vec<usize> {
        let mut a: Vec<usize> = self.rows.iter().map(|r| r.agent).collect();
        a.sort_unstable();
        a.dedup();
        a
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Classifies a row into the patches of its period, rejecting points that
/// are off the declared budget plane.
pub fn classify_row(row_index: usize, row: &PanelRow, periods: &[PatchSet]) -> Result<PatchId> {
    let bad = |reason: String| DrumError::PanelRow {
        row: row_index + 1,
        reason,
    };
    let set = periods
        .get(row.period)
        .ok_or_else(|| bad(format!("period {} does not exist", row.period + 1)))?;
    let budget = set.budgets.get(row.budget).ok_or_else(|| {
        bad(format!(
            "budget {} does not exist in period {}",
            row.budget + 1,
            row.period + 1
        ))
    })?;
    if row.point.len() != budget.goods() {
        return Err(bad(format!(
            "point has {} coordinates, expected {}",
            row.point.len(),
            budget.goods()
        )));
    }
    if row.point.iter().any(Signed::is_negative) {
        return Err(bad("negative coordinate".into()));
    }
    if !budget.contains(&row.point) {
        return Err(bad(format!(
            "point {} is off budget {} (excess {})",
            rational::format_point(&row.point),
            budget.label(),
            rational::format(&budget.excess(&row.point))
        )));
    }
    Ok(set
        .classify_on(&row.point, row.budget)
        .expect("point on its budget"))
}

/// Weighted patch frequencies per period and budget, normalized per budget.
pub fn period_frequencies(
    panel: &Panel,
    periods: &[PatchSet],
) -> Result<BTreeMap<(usize, PatchId), Rational>> {
    if panel.is_empty() {
        return Err(DrumError::EmptyPanel);
    }
    let mut mass: BTreeMap<(usize, PatchId), Rational> = BTreeMap::new();
    let mut totals: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    for (n, row) in panel.rows.iter().enumerate() {
        let id = classify_row(n, row, periods)?;
        let w = panel.weight(row.agent);
        *mass.entry((row.period, id)).or_insert_with(Rational::zero) += &w;
        *totals
            .entry((row.period, row.budget))
            .or_insert_with(Rational::zero) += w;
    }
    for ((t, id), v) in mass.iter_mut() {
        *v /= &totals[&(*t, id.owner)];
    }
    Ok(mass)
}

/// The dynamic stochastic demand of a panel in which every agent is seen
/// once in every period: weighted frequencies of choice paths within each
/// budget path. Returns the observed budget paths alongside.
pub fn panel_demand(
    panel: &Panel,
    periods: &[PatchSet],
) -> Result<(Vec<BudgetPath>, DynamicStochasticDemand)> {
    if panel.is_empty() {
        return Err(DrumError::EmptyPanel);
    }
    let horizon = periods.len();
    let mut by_agent: BTreeMap<usize, Vec<Option<(usize, usize)>>> = BTreeMap::new();
    for (n, row) in panel.rows.iter().enumerate() {
        let id = classify_row(n, row, periods)?;
        let slots = by_agent
            .entry(row.agent)
            .or_insert_with(|| vec![None; horizon]);
        if slots[row.period].replace((id.owner, id.patch)).is_some() {
            return Err(DrumError::PanelRow {
                row: n + 1,
                reason: format!(
                    "agent {} seen twice in period {}",
                    row.agent,
                    row.period + 1
                ),
            });
        }
    }
    let mut mass: BTreeMap<ChoicePath, Rational> = BTreeMap::new();
    let mut totals: BTreeMap<BudgetPath, Rational> = BTreeMap::new();
    for (agent, slots) in by_agent {
        let Some(slots) = slots.into_iter().collect::<Option<Vec<_>>>() else {
            return Err(DrumError::Input(format!(
                "agent {agent} is missing a period"
            )));
        };
        let (budgets, patches): (Vec<usize>, Vec<usize>) = slots.into_iter().unzip();
        let cp = ChoicePath::new(budgets, patches);
        let w = panel.weight(agent);
        *totals
            .entry(cp.budgets.clone())
            .or_insert_with(Rational::zero) += &w;
        *mass.entry(cp).or_insert_with(Rational::zero) += w;
    }
    let rho = DynamicStochasticDemand::from_entries(mass.into_iter().map(|(cp, v)| {
        let total = &totals[&cp.budgets];
        let p = v / total;
        (cp, p)
    }));
    Ok((totals.into_keys().collect(), rho))
}

/// [`panel_demand`] packaged with its domain.
pub fn panel_domain(
    panel: &Panel,
    periods: Vec<PatchSet>,
    continuous_demand: bool,
) -> Result<(ChoiceDomain, DynamicStochasticDemand)> {
    let (paths, rho) = panel_demand(panel, &periods)?;
    let domain = ChoiceDomain::new(periods, paths, continuous_demand)?;
    rho.validate(&domain)?;
    Ok((domain, rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_patches;
    use crate::rational::frac;
    use crate::reference;

    fn sets() -> Vec<PatchSet> {
        (0..2)
            .map(|t| build_patches(&reference::simple_setup_budgets(t)).unwrap())
            .collect()
    }

    fn row(agent: usize, period: usize, budget: usize, p: [(i64, i64); 2]) -> PanelRow {
        PanelRow {
            agent,
            period,
            budget,
            point: p.iter().map(|&(n, d)| frac(n, d)).collect(),
        }
    }

    #[test]
    fn demand_from_two_agents() {
        let panel = Panel {
            rows: vec![
                row(0, 0, 0, [(0, 1), (5, 1)]),
                row(0, 1, 0, [(3, 1), (0, 1)]),
                row(1, 0, 0, [(3, 1), (0, 1)]),
                row(1, 1, 0, [(3, 1), (0, 1)]),
            ],
            weights: [(1, frac(3, 1))].into_iter().collect(),
        };
        let (paths, rho) = panel_demand(&panel, &sets()).unwrap();
        assert_eq!(paths, vec![BudgetPath(vec![0, 0])]);
        assert_eq!(
            rho.get(&ChoicePath::new(vec![0, 0], vec![0, 1])),
            frac(1, 4)
        );
        assert_eq!(
            rho.get(&ChoicePath::new(vec![0, 0], vec![1, 1])),
            frac(3, 4)
        );
        let f = period_frequencies(&panel, &sets()).unwrap();
        assert_eq!(f[&(0, PatchId { owner: 0, patch: 1 })], frac(3, 4));
    }

    #[test]
    fn off_plane_rows_are_rejected() {
        let panel = Panel {
            rows: vec![row(0, 0, 0, [(1, 1), (1, 1)])],
            weights: BTreeMap::new(),
        };
        match panel_demand(&panel, &sets()) {
            Err(DrumError::PanelRow { row: 1, reason }) => assert!(reason.contains("off budget")),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(
            panel_demand(&Panel::default(), &sets()).unwrap_err(),
            DrumError::EmptyPanel
        );
    }
}
