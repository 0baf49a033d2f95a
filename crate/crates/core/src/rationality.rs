//! Rational demand types and the profile matrix.
//!
//! A demand type picks one patch on every budget of a period such that the
//! strict revealed preference it induces on the chosen representatives is
//! acyclic. A profile is one type per period; its column in the profile
//! matrix marks, for every observed budget path, the choice path the profile
//! produces.

use std::collections::HashMap;
use std::fmt;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{DrumError, Result};
use crate::geometry::{Budget, PatchSet, Point};

/// Default cap on dense matrix entries (rows times columns).
pub const DEFAULT_MAX_ENTRIES: u128 = 10_000_000;

/// One budget index per period (zero-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BudgetPath(pub Vec<usize>);

impl fmt::Display for BudgetPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|j| (j + 1).to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// A budget path with one patch index per period (zero-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ChoicePath {
    pub budgets: BudgetPath,
    pub patches: Vec<usize>,
}

impl ChoicePath {
    pub fn new(budgets: Vec<usize>, patches: Vec<usize>) -> ChoicePath {
        ChoicePath {
            budgets: BudgetPath(budgets),
            patches,
        }
    }

    pub fn periods(&self) -> usize {
        self.patches.len()
    }

    /// Sort key: `(budget, patch)` per period, earlier periods first.
    fn order_key(&self) -> Vec<(usize, usize)> {
        self.budgets
            .0
            .iter()
            .copied()
            .zip(self.patches.iter().copied())
            .collect()
    }
}

impl fmt::Display for ChoicePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .budgets
            .0
            .iter()
            .zip(&self.patches)
            .enumerate()
            .map(|(t, (j, i))| format!("x{}_{{{}|{}}}", t + 1, i + 1, j + 1))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// A rational nonstochastic demand type: `choice[j]` is the patch picked on
/// budget `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DemandType {
    pub period: usize,
    pub choice: Vec<usize>,
}

impl fmt::Display for DemandType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.choice.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "theta{}_{{{}}}", self.period + 1, parts.join(","))
    }
}

/// `chosen` on `budget` is strictly revealed preferred to `other`: the two
/// bundles differ and `other` was weakly affordable.
pub fn strictly_revealed(budget: &Budget, chosen: &Point, other: &Point) -> bool {
    chosen != other && !budget.excess(other).is_positive()
}

/// Every period's patches, the observed budget paths, and the demand mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoiceDomain {
    pub periods: Vec<PatchSet>,
    pub budget_paths: Vec<BudgetPath>,
    /// Drop intersection patches from choice supports.
    pub continuous_demand: bool,
}

impl ChoiceDomain {
    pub fn new(
        periods: Vec<PatchSet>,
        budget_paths: Vec<BudgetPath>,
        continuous_demand: bool,
    ) -> Result<ChoiceDomain> {
        if periods.is_empty() {
            return Err(DrumError::Input("no periods".into()));
        }
        if budget_paths.is_empty() {
            return Err(DrumError::Input("no observed budget paths".into()));
        }
        for (pos, bp) in budget_paths.iter().enumerate() {
            if bp.0.len() != periods.len() {
                return Err(DrumError::Input(format!(
                    "budget path {bp} has {} entries for {} periods",
                    bp.0.len(),
                    periods.len()
                )));
            }
            for (t, &j) in bp.0.iter().enumerate() {
                if j >= periods[t].budgets.len() {
                    return Err(DrumError::Input(format!(
                        "budget path {bp} names budget {} in period {}, which has {} budgets",
                        j + 1,
                        t + 1,
                        periods[t].budgets.len()
                    )));
                }
            }
            if budget_paths[..pos].contains(bp) {
                return Err(DrumError::Input(format!("budget path {bp} listed twice")));
            }
        }
        Ok(ChoiceDomain {
            periods,
            budget_paths,
            continuous_demand,
        })
    }

    /// All budget paths of the periods' budgets, lexicographic.
    pub fn all_budget_paths(periods: &[PatchSet]) -> Vec<BudgetPath> {
        let sizes: Vec<usize> = periods.iter().map(|p| p.budgets.len()).collect();
        cartesian(&sizes).into_iter().map(BudgetPath).collect()
    }

    pub fn horizon(&self) -> usize {
        self.periods.len()
    }

    /// Patch indices a chooser may pick on budget `j` of period `t`.
    pub fn support(&self, t: usize, j: usize) -> Vec<usize> {
        support(&self.periods[t], j, self.continuous_demand)
    }

    pub fn is_observed(&self, bp: &BudgetPath) -> bool {
        self.budget_paths.contains(bp)
    }

    /// Choice paths of one budget path, lexicographic in patch indices.
    pub fn choice_paths(&self, bp: &BudgetPath) -> Vec<ChoicePath> {
        let supports: Vec<Vec<usize>> =
            bp.0.iter()
                .enumerate()
                .map(|(t, &j)| self.support(t, j))
                .collect();
        let sizes: Vec<usize> = supports.iter().map(Vec::len).collect();
        cartesian(&sizes)
            .into_iter()
            .map(|idx| {
                let patches = idx.iter().zip(&supports).map(|(&k, s)| s[k]).collect();
                ChoicePath::new(bp.0.clone(), patches)
            })
            .collect()
    }

    /// Rows of the profile matrix: every choice path of every observed budget
    /// path, ordered by `(budget, patch)` of period 1, then period 2, and so on.
    pub fn rows(&self) -> Vec<ChoicePath> {
        let mut rows: Vec<ChoicePath> = self
            .budget_paths
            .iter()
            .flat_map(|bp| self.choice_paths(bp))
            .collect();
        rows.sort_by_key(ChoicePath::order_key);
        rows
    }

    /// Rational types of every period.
    pub fn rational_types(&self) -> Vec<Vec<DemandType>> {
        self.periods
            .iter()
            .map(|p| enumerate_rational_types(p, self.continuous_demand))
            .collect()
    }
}

pub(crate) fn support(set: &PatchSet, j: usize, continuous_demand: bool) -> Vec<usize> {
    set.patches[j]
        .iter()
        .filter(|p| !(continuous_demand && p.is_intersection))
        .map(|p| p.index)
        .collect()
}

/// Mixed-radix enumeration, first coordinate most significant.
pub(crate) fn cartesian(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(sizes.len())];
    for &n in sizes {
        let mut next = Vec::with_capacity(out.len() * n);
        for prefix in &out {
            for k in 0..n {
                let mut v = prefix.clone();
                v.push(k);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Every rational demand type of one period, lexicographic in patch indices
/// (budget 1 most significant).
pub fn enumerate_rational_types(set: &PatchSet, continuous_demand: bool) -> Vec<DemandType> {
    let supports: Vec<Vec<usize>> = (0..set.budgets.len())
        .map(|j| support(set, j, continuous_demand))
        .collect();
    let mut out = Vec::new();
    let mut choice = Vec::with_capacity(supports.len());
    let mut reps: Vec<&Point> = Vec::with_capacity(supports.len());
    extend_types(set, &supports, &mut choice, &mut reps, &mut out);
    out
}

fn extend_types<'a>(
    set: &'a PatchSet,
    supports: &[Vec<usize>],
    choice: &mut Vec<usize>,
    reps: &mut Vec<&'a Point>,
    out: &mut Vec<DemandType>,
) {
    let j = choice.len();
    if j == supports.len() {
        out.push(DemandType {
            period: set.period,
            choice: choice.clone(),
        });
        return;
    }
    for &i in &supports[j] {
        let rep = &set.patches[j][i].representative;
        choice.push(i);
        reps.push(rep);
        if !closes_cycle(set, reps) {
            extend_types(set, supports, choice, reps, out);
        }
        reps.pop();
        choice.pop();
    }
}

/// Whether the newest budget (last in `reps`) lies on a revealed-preference
/// cycle. Earlier budgets are already acyclic, so any new cycle passes
/// through it.
fn closes_cycle(set: &PatchSet, reps: &[&Point]) -> bool {
    let n = reps.len();
    let last = n - 1;
    let edge = |a: usize, b: usize| strictly_revealed(&set.budgets[a], reps[a], reps[b]);
    let mut seen = vec![false; n];
    let mut stack = vec![last];
    while let Some(a) = stack.pop() {
        for b in 0..n {
            if b == a || !edge(a, b) {
                continue;
            }
            if b == last {
                return true;
            }
            if !seen[b] {
                seen[b] = true;
                stack.push(b);
            }
        }
    }
    false
}

/// The profile space: rows, per-period types and lazily evaluated columns.
#[derive(Debug, Clone)]
pub struct ProfileSpace {
    pub domain: ChoiceDomain,
    pub types: Vec<Vec<DemandType>>,
    pub rows: Vec<ChoicePath>,
    row_index: HashMap<ChoicePath, usize>,
}

impl ProfileSpace {
    pub fn new(domain: ChoiceDomain, types: Vec<Vec<DemandType>>) -> Result<ProfileSpace> {
        if types.len() != domain.horizon() {
            return Err(DrumError::Shape(format!(
                "{} type lists for {} periods",
                types.len(),
                domain.horizon()
            )));
        }
        if let Some(t) = types.iter().position(Vec::is_empty) {
            return Err(DrumError::NoTypes(t + 1));
        }
        let rows = domain.rows();
        let row_index = rows
            .iter()
            .enumerate()
            .map(|(r, cp)| (cp.clone(), r))
            .collect();
        Ok(ProfileSpace {
            domain,
            types,
            rows,
            row_index,
        })
    }

    /// Space of all rational profiles of the domain.
    pub fn of(domain: &ChoiceDomain) -> Result<ProfileSpace> {
        ProfileSpace::new(domain.clone(), domain.rational_types())
    }

    pub fn column_count(&self) -> u128 {
        self.types.iter().map(|t| t.len() as u128).product()
    }

    pub fn row(&self, cp: &ChoicePath) -> Option<usize> {
        self.row_index.get(cp).copied()
    }

    /// Profile (one type index per period) at a column position.
    pub fn profile_at(&self, mut column: u128) -> Vec<usize> {
        let mut profile = vec![0; self.types.len()];
        for t in (0..self.types.len()).rev() {
            let n = self.types[t].len() as u128;
            profile[t] = (column % n) as usize;
            column /= n;
        }
        profile
    }

    pub fn column_of(&self, profile: &[usize]) -> u128 {
        profile
            .iter()
            .zip(&self.types)
            .fold(0u128, |acc, (&k, ts)| acc * ts.len() as u128 + k as u128)
    }

    /// Choice path the profile produces on a budget path.
    pub fn choice_of(&self, profile: &[usize], bp: &BudgetPath) -> ChoicePath {
        let patches =
            bp.0.iter()
                .enumerate()
                .map(|(t, &j)| self.types[t][profile[t]].choice[j])
                .collect();
        ChoicePath::new(bp.0.clone(), patches)
    }

    /// Row indices holding a one in the profile's column, one per observed
    /// budget path (in declared order).
    pub fn column(&self, profile: &[usize]) -> Vec<usize> {
        self.domain
            .budget_paths
            .iter()
            .map(|bp| {
                let cp = self.choice_of(profile, bp);
                self.row(&cp)
                    .expect("rational types only pick supported patches")
            })
            .collect()
    }

    pub fn profile_label(&self, profile: &[usize]) -> String {
        let parts: Vec<String> = profile
            .iter()
            .enumerate()
            .map(|(t, &k)| self.types[t][k].to_string())
            .collect();
        format!("({})", parts.join(", "))
    }
}

/// The materialized 0/1 profile matrix. Each column is stored as its row
/// indices, one per observed budget path.
#[derive(Debug, Clone)]
pub struct ProfileMatrix {
    pub space: ProfileSpace,
    pub columns: Vec<Vec<usize>>,
}

pub fn build_profile_matrix(
    domain: &ChoiceDomain,
    types: Vec<Vec<DemandType>>,
    max_entries: u128,
) -> Result<ProfileMatrix> {
    let space = ProfileSpace::new(domain.clone(), types)?;
    ProfileMatrix::from_space(space, max_entries)
}

impl ProfileMatrix {
    pub fn from_space(space: ProfileSpace, max_entries: u128) -> Result<ProfileMatrix> {
        let entries = space.column_count() * space.rows.len() as u128;
        if entries > max_entries {
            return Err(DrumError::TooManyColumns {
                entries,
                cap: max_entries,
            });
        }
        let columns = (0..space.column_count())
            .map(|c| space.column(&space.profile_at(c)))
            .collect();
        Ok(ProfileMatrix { space, columns })
    }

    /// Matrix of all rational profiles of the domain.
    pub fn of(domain: &ChoiceDomain, max_entries: u128) -> Result<ProfileMatrix> {
        ProfileMatrix::from_space(ProfileSpace::of(domain)?, max_entries)
    }

    pub fn rows(&self) -> &[ChoicePath] {
        &self.space.rows
    }

    pub fn row_count(&self) -> usize {
        self.space.rows.len()
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    pub fn entry(&self, row: usize, column: usize) -> bool {
        self.columns[column].contains(&row)
    }

    pub fn dense(&self) -> Vec<Vec<u8>> {
        let mut m = vec![vec![0u8; self.column_count()]; self.row_count()];
        for (c, col) in self.columns.iter().enumerate() {
            for &r in col {
                m[r][c] = 1;
            }
        }
        m
    }

    pub fn row_labels(&self) -> Vec<String> {
        self.space.rows.iter().map(ToString::to_string).collect()
    }

    pub fn column_labels(&self) -> Vec<String> {
        (0..self.column_count() as u128)
            .map(|c| self.space.profile_label(&self.space.profile_at(c)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_patches;
    use crate::reference;

    #[test]
    fn simple_setup_has_three_types() {
        let domain = reference::simple_setup_domain();
        let types = enumerate_rational_types(&domain.periods[0], true);
        let choices: Vec<Vec<usize>> = types.iter().map(|t| t.choice.clone()).collect();
        assert_eq!(choices, vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
    }

    #[test]
    fn intersection_patches_in_default_mode() {
        let domain = reference::simple_setup_domain();
        let types = enumerate_rational_types(&domain.periods[0], false);
        // both budgets may pick the crossing point; mixing it with a patch
        // that lies below the other budget is irrational
        let choices: Vec<Vec<usize>> = types.iter().map(|t| t.choice.clone()).collect();
        assert!(choices.contains(&vec![2, 2]));
        assert!(choices.contains(&vec![2, 1]));
        assert!(choices.contains(&vec![0, 2]));
        assert!(!choices.contains(&vec![2, 0]));
        assert!(!choices.contains(&vec![1, 2]));
        assert!(!choices.contains(&vec![1, 0]));
    }

    #[test]
    fn single_budget_types_are_its_patches() {
        let b = crate::geometry::Budget::new(
            0,
            0,
            vec![crate::rational::int(1), crate::rational::int(2)],
            crate::rational::int(4),
        )
        .unwrap();
        let set = build_patches(&[b]).unwrap();
        assert_eq!(enumerate_rational_types(&set, false).len(), 1);
    }

    #[test]
    fn profile_matrix_shape() {
        let domain = reference::simple_setup_domain();
        let m = ProfileMatrix::of(&domain, DEFAULT_MAX_ENTRIES).unwrap();
        assert_eq!(m.row_count(), 16);
        assert_eq!(m.column_count(), 9);
        for col in &m.columns {
            assert_eq!(col.len(), 4);
        }
        let err = ProfileMatrix::of(&domain, 100).unwrap_err();
        assert!(matches!(
            err,
            DrumError::TooManyColumns { entries: 144, .. }
        ));
    }

    #[test]
    fn empty_type_list_is_rejected() {
        let domain = reference::simple_setup_domain();
        let err = ProfileSpace::new(domain, vec![vec![], vec![]]).unwrap_err();
        assert_eq!(err, DrumError::NoTypes(1));
    }

    #[test]
    fn column_position_round_trips() {
        let domain = reference::simple_setup_domain();
        let space = ProfileSpace::of(&domain).unwrap();
        for c in 0..space.column_count() {
            assert_eq!(space.column_of(&space.profile_at(c)), c);
        }
    }
}
