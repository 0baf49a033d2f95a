//! Budget planes and their patch partition.
//!
//! A period's budgets cut each other into patches. A patch is stored as its
//! sign vector against every budget plane of the arrangement (its own entry is
//! always [`Side::On`]) together with the vertices of its closure and a
//! representative point, the vertex centroid, which lies in the relative
//! interior of the patch.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{DrumError, Result};
use crate::rational::{self, dot, Rational};

pub type Point = Vec<Rational>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Below,
    On,
    Above,
}

impl Side {
    fn of(value: &Rational) -> Side {
        if value.is_zero() {
            Side::On
        } else if value.is_positive() {
            Side::Above
        } else {
            Side::Below
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Below => "below",
            Side::On => "on",
            Side::Above => "above",
        })
    }
}

/// One linear budget `{y >= 0 : prices . y = expenditure}`. Period and index
/// are zero-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub period: usize,
    pub index: usize,
    #[serde(with = "rational::serde_vec")]
    pub prices: Vec<Rational>,
    #[serde(with = "rational::serde_str")]
    pub expenditure: Rational,
}

impl Budget {
    pub fn new(
        period: usize,
        index: usize,
        prices: Vec<Rational>,
        expenditure: Rational,
    ) -> Result<Budget> {
        let invalid = |reason: &str| DrumError::InvalidBudget {
            period: period + 1,
            index: index + 1,
            reason: reason.to_string(),
        };
        if prices.len() < 2 {
            return Err(invalid("at least two goods are required"));
        }
        if prices.iter().any(|p| !p.is_positive()) {
            return Err(invalid("prices must be strictly positive"));
        }
        if !expenditure.is_positive() {
            return Err(invalid("expenditure must be strictly positive"));
        }
        Ok(Budget {
            period,
            index,
            prices,
            expenditure,
        })
    }

    pub fn goods(&self) -> usize {
        self.prices.len()
    }

    /// `prices . y - expenditure`.
    pub fn excess(&self, y: &[Rational]) -> Rational {
        dot(&self.prices, y) - &self.expenditure
    }

    pub fn side(&self, y: &[Rational]) -> Side {
        Side::of(&self.excess(y))
    }

    pub fn contains(&self, y: &[Rational]) -> bool {
        y.len() == self.goods() && y.iter().all(rational::is_nonneg) && self.excess(y).is_zero()
    }

    /// True when both budgets describe the same set of bundles.
    pub fn same_plane(&self, other: &Budget) -> bool {
        self.goods() == other.goods()
            && self
                .prices
                .iter()
                .zip(&other.prices)
                .all(|(p, q)| p * &other.expenditure == q * &self.expenditure)
    }

    pub fn label(&self) -> String {
        format!("B{}_{}", self.period + 1, self.index + 1)
    }
}

/// Identifies a patch inside a [`PatchSet`]: the owning budget's position and
/// the patch's position among that budget's patches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PatchId {
    pub owner: usize,
    pub patch: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Patch {
    pub owner: usize,
    pub index: usize,
    pub signs: Vec<Side>,
    pub is_intersection: bool,
    pub representative: Point,
    pub vertices: Vec<Point>,
    /// Set-equal patches owned by other budgets (intersection patches only).
    pub twins: Vec<PatchId>,
}

impl Patch {
    pub fn id(&self) -> PatchId {
        PatchId {
            owner: self.owner,
            patch: self.index,
        }
    }
}

/// The patch partition of one arrangement of budgets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatchSet {
    pub period: usize,
    pub budgets: Vec<Budget>,
    /// `patches[j]` partitions budget `j`: full-dimensional patches first,
    /// ordered by representative, then intersection patches.
    pub patches: Vec<Vec<Patch>>,
    pub dominance: Vec<(PatchId, PatchId)>,
}

/// Builds the patch partition of one period.
pub fn build_patches(budgets: &[Budget]) -> Result<PatchSet> {
    let first = budgets
        .first()
        .ok_or_else(|| DrumError::Input("a period needs at least one budget".into()))?;
    let period = first.period;
    if let Some(b) = budgets.iter().find(|b| b.period != period) {
        return Err(DrumError::MixedPeriods(period + 1, b.period + 1));
    }
    let mut sorted = budgets.to_vec();
    sorted.sort_by_key(|b| b.index);
    for (pos, b) in sorted.iter().enumerate() {
        if b.index != pos {
            return Err(DrumError::InvalidBudget {
                period: period + 1,
                index: b.index + 1,
                reason: format!(
                    "budget indices of a period must be 1..{} without gaps or repeats",
                    sorted.len()
                ),
            });
        }
    }
    build_arrangement(period, sorted)
}

/// Arrangement over an arbitrary list of budgets; budget positions in the
/// list become patch owners. Used directly for pooled arrangements.
pub(crate) fn build_arrangement(period: usize, budgets: Vec<Budget>) -> Result<PatchSet> {
    let goods = budgets[0].goods();
    for b in &budgets {
        if b.goods() != goods {
            return Err(DrumError::DimensionMismatch {
                expected: goods,
                got: b.goods(),
            });
        }
    }
    for (a, b) in budgets.iter().enumerate() {
        for c in &budgets[a + 1..] {
            if b.same_plane(c) {
                return Err(DrumError::DuplicateBudget {
                    first: b.label(),
                    second: c.label(),
                });
            }
        }
    }
    let mut patches = Vec::with_capacity(budgets.len());
    for owner in 0..budgets.len() {
        patches.push(patches_of(&budgets, owner));
    }
    link_twins(&mut patches);
    let mut set = PatchSet {
        period,
        budgets,
        patches,
        dominance: Vec::new(),
    };
    set.dominance = set.compute_dominance();
    Ok(set)
}

struct Hyperplane {
    normal: Vec<Rational>,
    offset: Rational,
}

/// Cells of the other budgets' arrangement restricted to budget `owner`.
fn patches_of(budgets: &[Budget], owner: usize) -> Vec<Patch> {
    let goods = budgets[owner].goods();
    let others: Vec<usize> = (0..budgets.len()).filter(|&j| j != owner).collect();

    // Pool of cutting hyperplanes: coordinate planes, then the other budgets
    // in order. Candidates are tagged with the highest budget they use so
    // that prefixes of the arrangement can be processed incrementally.
    let mut pool: Vec<Hyperplane> = (0..goods)
        .map(|k| {
            let mut normal = vec![Rational::zero(); goods];
            normal[k] = rational::int(1);
            Hyperplane {
                normal,
                offset: Rational::zero(),
            }
        })
        .collect();
    pool.extend(others.iter().map(|&j| Hyperplane {
        normal: budgets[j].prices.clone(),
        offset: budgets[j].expenditure.clone(),
    }));
    let own = Hyperplane {
        normal: budgets[owner].prices.clone(),
        offset: budgets[owner].expenditure.clone(),
    };
    let mut by_level: Vec<BTreeSet<Point>> = vec![BTreeSet::new(); others.len() + 1];
    for subset in combinations(pool.len(), goods - 1) {
        let mut rows: Vec<&Hyperplane> = vec![&own];
        rows.extend(subset.iter().map(|&s| &pool[s]));
        if let Some(y) = solve_square(&rows) {
            if y.iter().all(rational::is_nonneg) {
                let level = subset
                    .iter()
                    .map(|&s| if s < goods { 0 } else { s - goods + 1 })
                    .max()
                    .unwrap_or(0);
                by_level[level].insert(y);
            }
        }
    }

    struct Cell {
        signs: Vec<Side>,
        vertices: Vec<Point>,
        center: Point,
    }
    let simplex: Vec<Point> = by_level[0].iter().cloned().collect();
    let mut cells = vec![Cell {
        signs: Vec::new(),
        center: centroid(&simplex),
        vertices: simplex,
    }];
    let mut candidates: Vec<Point> = by_level[0].iter().cloned().collect();
    for (m, &j) in others.iter().enumerate() {
        candidates.extend(by_level[m + 1].iter().cloned());
        let plane = &budgets[j];
        let mut next = Vec::new();
        for cell in &cells {
            for side in [Side::Below, Side::On, Side::Above] {
                let mut signs = cell.signs.clone();
                signs.push(side);
                let vertices: Vec<Point> = candidates
                    .iter()
                    .filter(|v| {
                        others[..=m]
                            .iter()
                            .zip(&signs)
                            .all(|(&l, &s)| closed_side_holds(&budgets[l], v, s))
                    })
                    .cloned()
                    .collect();
                if vertices.is_empty() {
                    continue;
                }
                let center = centroid(&vertices);
                let matches = others[..=m]
                    .iter()
                    .zip(&signs)
                    .all(|(&l, &s)| budgets[l].side(&center) == s);
                if matches {
                    next.push(Cell {
                        signs,
                        vertices,
                        center,
                    });
                }
            }
        }
        debug_assert!(
            !next.is_empty(),
            "plane {} emptied the simplex",
            plane.label()
        );
        cells = next;
    }

    let mut out: Vec<Patch> = cells
        .into_iter()
        .map(|cell| {
            let mut signs = vec![Side::On; budgets.len()];
            for (&l, s) in others.iter().zip(cell.signs) {
                signs[l] = s;
            }
            let is_intersection = others.iter().any(|&l| signs[l] == Side::On);
            let mut vertices = cell.vertices;
            vertices.sort();
            Patch {
                owner,
                index: 0,
                signs,
                is_intersection,
                representative: cell.center,
                vertices,
                twins: Vec::new(),
            }
        })
        .collect();
    out.sort_by(|a, b| {
        (a.is_intersection, &a.representative).cmp(&(b.is_intersection, &b.representative))
    });
    for (i, p) in out.iter_mut().enumerate() {
        p.index = i;
    }
    out
}

fn closed_side_holds(plane: &Budget, y: &[Rational], side: Side) -> bool {
    let e = plane.excess(y);
    match side {
        Side::Below => !e.is_positive(),
        Side::On => e.is_zero(),
        Side::Above => !e.is_negative(),
    }
}

fn link_twins(patches: &mut [Vec<Patch>]) {
    let mut links = Vec::new();
    for (j, own) in patches.iter().enumerate() {
        for p in own.iter().filter(|p| p.is_intersection) {
            for (l, theirs) in patches.iter().enumerate() {
                if l == j || p.signs[l] != Side::On {
                    continue;
                }
                if let Some(q) = theirs.iter().find(|q| q.signs == p.signs) {
                    links.push((p.id(), q.id()));
                }
            }
        }
    }
    for (from, to) in links {
        patches[from.owner][from.patch].twins.push(to);
    }
}

pub(crate) fn centroid(points: &[Point]) -> Point {
    let k = points[0].len();
    let n = rational::int(points.len() as i64);
    (0..k)
        .map(|c| points.iter().fold(Rational::zero(), |acc, p| acc + &p[c]) / &n)
        .collect()
}

/// Solves the square system given by the hyperplanes; `None` when singular.
fn solve_square(rows: &[&Hyperplane]) -> Option<Point> {
    let n = rows.len();
    let mut m: Vec<Vec<Rational>> = rows
        .iter()
        .map(|h| {
            let mut r = h.normal.clone();
            r.push(h.offset.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let inv = m[col][col].clone();
        for c in col..=n {
            m[col][c] = &m[col][c] / &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=n {
                    let delta = &f * &m[col][c];
                    m[r][c] -= delta;
                }
            }
        }
    }
    Some(m.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut current, &mut out);
    out
}

/// Where a point sits relative to the arrangement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    Patch(PatchId),
    OffPlane,
}

impl PatchSet {
    pub fn goods(&self) -> usize {
        self.budgets[0].goods()
    }

    pub fn patch(&self, id: PatchId) -> &Patch {
        &self.patches[id.owner][id.patch]
    }

    pub fn all_patches(&self) -> impl Iterator<Item = &Patch> {
        self.patches.iter().flatten()
    }

    pub fn patch_count(&self) -> usize {
        self.patches.iter().map(Vec::len).sum()
    }

    pub fn signs_of(&self, y: &[Rational]) -> Vec<Side> {
        self.budgets.iter().map(|b| b.side(y)).collect()
    }

    /// The patch of budget `owner` containing `y`, if `y` lies on that budget.
    pub fn classify_on(&self, y: &[Rational], owner: usize) -> Option<PatchId> {
        if !self.budgets[owner].contains(y) {
            return None;
        }
        let signs = self.signs_of(y);
        self.patches[owner]
            .iter()
            .find(|p| p.signs == signs)
            .map(Patch::id)
    }

    /// The patch containing `y`, reported under the lowest owning budget.
    pub fn classify_point(&self, y: &[Rational]) -> Result<Classification> {
        if y.len() != self.goods() {
            return Err(DrumError::DimensionMismatch {
                expected: self.goods(),
                got: y.len(),
            });
        }
        if y.iter().any(|c| c.is_negative()) {
            return Err(DrumError::Input(format!(
                "point {} has a negative coordinate",
                rational::format_point(y)
            )));
        }
        for owner in 0..self.budgets.len() {
            if let Some(id) = self.classify_on(y, owner) {
                return Ok(Classification::Patch(id));
            }
        }
        Ok(Classification::OffPlane)
    }

    pub fn representative(&self, id: PatchId) -> &Point {
        &self.patch(id).representative
    }

    /// Patch revealed dominance: some point of `a` costs strictly more than
    /// some point of `b` at both owners' prices. On a cell of the arrangement
    /// this reduces to `a` above `b`'s plane and `b` below `a`'s plane.
    pub fn dominates(&self, a: PatchId, b: PatchId) -> bool {
        if a.owner == b.owner {
            return false;
        }
        self.patch(a).signs[b.owner] == Side::Above && self.patch(b).signs[a.owner] == Side::Below
    }

    fn compute_dominance(&self) -> Vec<(PatchId, PatchId)> {
        let ids: Vec<PatchId> = self.all_patches().map(Patch::id).collect();
        let mut out = Vec::new();
        for &a in &ids {
            for &b in &ids {
                if self.dominates(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Whether `y` belongs to the patch (exact sign comparison).
    pub fn patch_contains(&self, id: PatchId, y: &[Rational]) -> bool {
        let p = self.patch(id);
        self.budgets[id.owner].contains(y) && self.signs_of(y) == p.signs
    }

    /// True when every point of the patch lies strictly on side `want`
    /// (`Above` or `Below`) of `plane`. Decided exactly on the closure's
    /// vertices; when the extreme value touches the plane, the touching face
    /// is tested through its centroid.
    pub fn patch_strictly(&self, id: PatchId, plane: &Budget, want: Side) -> bool {
        let p = self.patch(id);
        let values: Vec<Rational> = p.vertices.iter().map(|v| plane.excess(v)).collect();
        let extreme = match want {
            Side::Below => values.iter().max(),
            Side::Above => values.iter().min(),
            Side::On => return false,
        }
        .expect("patch has vertices")
        .clone();
        let bad = match want {
            Side::Below => extreme.is_positive(),
            _ => extreme.is_negative(),
        };
        if bad {
            return false;
        }
        if !extreme.is_zero() {
            return true;
        }
        let face: Vec<Point> = p
            .vertices
            .iter()
            .zip(&values)
            .filter(|(_, v)| v.is_zero())
            .map(|(x, _)| x.clone())
            .collect();
        !self.patch_contains(id, &centroid(&face))
    }

    pub fn label(&self, id: PatchId) -> String {
        format!(
            "x{}_{{{}|{}}}",
            self.period + 1,
            id.patch + 1,
            self.budgets[id.owner].index + 1
        )
    }
}

/// Uniform revealed dominance between patches of possibly different
/// arrangements: every point of `a` lies strictly above `b`'s owner plane
/// and every point of `b` lies strictly below `a`'s owner plane. Within a
/// single arrangement this coincides with [`PatchSet::dominates`].
pub fn dominates_across(sa: &PatchSet, a: PatchId, sb: &PatchSet, b: PatchId) -> bool {
    let plane_a = &sa.budgets[a.owner];
    let plane_b = &sb.budgets[b.owner];
    if plane_a.same_plane(plane_b) {
        return false;
    }
    sa.patch_strictly(a, plane_b, Side::Above) && sb.patch_strictly(b, plane_a, Side::Below)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn budget(period: usize, index: usize, p: &[i64], w: i64) -> Budget {
        Budget::new(period, index, p.iter().map(|&x| int(x)).collect(), int(w)).unwrap()
    }

    fn crossing_pair() -> PatchSet {
        build_patches(&[budget(0, 0, &[5, 3], 15), budget(0, 1, &[3, 5], 15)]).unwrap()
    }

    #[test]
    fn crossing_pair_has_five_patches() {
        let set = crossing_pair();
        assert_eq!(set.patches[0].len(), 3);
        assert_eq!(set.patches[1].len(), 3);
        let inter = &set.patches[0][2];
        assert!(inter.is_intersection);
        assert_eq!(inter.representative, vec![frac(15, 8), frac(15, 8)]);
        assert_eq!(inter.twins, vec![PatchId { owner: 1, patch: 2 }]);
        // first patch of budget 1 lies above budget 2, first of budget 2 below budget 1
        assert_eq!(set.patches[0][0].signs[1], Side::Above);
        assert_eq!(set.patches[0][1].signs[1], Side::Below);
        assert_eq!(set.patches[1][0].signs[0], Side::Below);
        assert_eq!(set.patches[1][1].signs[0], Side::Above);
        let distinct: BTreeSet<_> = set.all_patches().map(|p| p.signs.clone()).collect();
        assert_eq!(distinct.len(), 5);
    }

    #[test]
    fn single_budget_is_one_patch() {
        let set = build_patches(&[budget(0, 0, &[1, 1], 1)]).unwrap();
        assert_eq!(set.patch_count(), 1);
        assert!(set.dominance.is_empty());
        assert_eq!(
            set.patches[0][0].representative,
            vec![frac(1, 2), frac(1, 2)]
        );
    }

    #[test]
    fn classify_points() {
        let set = crossing_pair();
        let up = vec![frac(1, 2), frac(25, 6)];
        assert_eq!(
            set.classify_point(&up).unwrap(),
            Classification::Patch(PatchId { owner: 0, patch: 0 })
        );
        let inside = vec![int(1), int(1)];
        assert_eq!(
            set.classify_point(&inside).unwrap(),
            Classification::OffPlane
        );
        for p in set.all_patches() {
            let got = set.classify_on(&p.representative, p.owner).unwrap();
            assert_eq!(got, p.id());
        }
        assert!(set.classify_point(&[int(1)]).is_err());
    }

    #[test]
    fn dominance_in_crossing_pair() {
        let set = crossing_pair();
        let x11 = PatchId { owner: 0, patch: 0 };
        let x21 = PatchId { owner: 0, patch: 1 };
        let x12 = PatchId { owner: 1, patch: 0 };
        let x22 = PatchId { owner: 1, patch: 1 };
        assert!(set.dominates(x11, x12));
        assert!(set.dominates(x22, x21));
        assert!(!set.dominates(x12, x11));
        for p in set.all_patches() {
            assert!(!set.dominates(p.id(), p.id()));
        }
        assert_eq!(set.dominance.len(), 2);
    }

    #[test]
    fn rejects_duplicates_and_mixed_periods() {
        let dup = build_patches(&[budget(0, 0, &[1, 2], 3), budget(0, 1, &[2, 4], 6)]);
        assert!(matches!(dup, Err(DrumError::DuplicateBudget { .. })));
        let mixed = build_patches(&[budget(0, 0, &[1, 2], 3), budget(1, 1, &[2, 1], 6)]);
        assert!(matches!(mixed, Err(DrumError::MixedPeriods(..))));
        assert!(Budget::new(0, 0, vec![int(1), int(0)], int(1)).is_err());
        assert!(Budget::new(0, 0, vec![int(1)], int(1)).is_err());
        assert!(Budget::new(0, 0, vec![int(1), int(1)], int(0)).is_err());
    }

    #[test]
    fn parallel_budgets_do_not_intersect() {
        let set = build_patches(&[budget(0, 0, &[1, 1], 2), budget(0, 1, &[1, 1], 3)]).unwrap();
        assert_eq!(set.patches[0].len(), 1);
        assert_eq!(set.patches[1].len(), 1);
        assert!(set.all_patches().all(|p| !p.is_intersection));
        // the outer line sits strictly above the inner one
        assert_eq!(
            set.dominance,
            vec![(
                PatchId { owner: 1, patch: 0 },
                PatchId { owner: 0, patch: 0 }
            )]
        );
    }

    #[test]
    fn three_planes_through_one_point() {
        // all three lines pass through (1, 1)
        let set = build_patches(&[
            budget(0, 0, &[1, 1], 2),
            budget(0, 1, &[1, 2], 3),
            budget(0, 2, &[2, 1], 3),
        ])
        .unwrap();
        for own in &set.patches {
            assert_eq!(own.len(), 3);
            let inter: Vec<_> = own.iter().filter(|p| p.is_intersection).collect();
            assert_eq!(inter.len(), 1);
            assert_eq!(inter[0].representative, vec![int(1), int(1)]);
            assert_eq!(inter[0].twins.len(), 2);
        }
    }

    #[test]
    fn three_goods_representatives_are_interior() {
        let set = build_patches(&[
            budget(0, 0, &[1, 1, 1], 3),
            budget(0, 1, &[2, 1, 1], 4),
            budget(0, 2, &[1, 1, 3], 4),
        ])
        .unwrap();
        for p in set.all_patches() {
            assert!(set.patch_contains(p.id(), &p.representative));
        }
        assert!(set.patch_count() > 3);
    }

    #[test]
    fn strict_side_of_patch() {
        let set = crossing_pair();
        let b2 = set.budgets[1].clone();
        assert!(set.patch_strictly(PatchId { owner: 0, patch: 0 }, &b2, Side::Above));
        // the segment's closure touches budget 2 at the crossing, which the
        // open patch does not contain
        assert!(set.patch_strictly(PatchId { owner: 0, patch: 1 }, &b2, Side::Below));
        let whole = build_patches(&[budget(0, 0, &[5, 3], 15)]).unwrap();
        assert!(!whole.patch_strictly(PatchId { owner: 0, patch: 0 }, &b2, Side::Above));
    }
}
