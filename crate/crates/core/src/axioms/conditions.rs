use std::collections::{BTreeMap, BTreeSet};

use super::{Axiom, AxiomReport, Collector, Relation};
use crate::demand::DynamicStochasticDemand;
use crate::geometry::{PatchId, Side};
use crate::rationality::{cartesian, ChoiceDomain, ChoicePath};

/// Observed budget paths grouped by their entries outside `drop` (ascending
/// periods). Each group maps to the set of entries at the dropped periods.
fn groups(domain: &ChoiceDomain, drop: &[usize]) -> BTreeMap<Vec<usize>, BTreeSet<Vec<usize>>> {
    let mut out: BTreeMap<Vec<usize>, BTreeSet<Vec<usize>>> = BTreeMap::new();
    for bp in &domain.budget_paths {
        let (kept, dropped) = split(&bp.0, drop);
        out.entry(kept).or_default().insert(dropped);
    }
    out
}

fn split(v: &[usize], drop: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for (t, &x) in v.iter().enumerate() {
        if drop.contains(&t) {
            dropped.push(x);
        } else {
            kept.push(x);
        }
    }
    (kept, dropped)
}

fn merge(kept: &[usize], drop: &[usize], dropped: &[usize]) -> Vec<usize> {
    let n = kept.len() + drop.len();
    let mut kept = kept.iter();
    let mut dropped = dropped.iter();
    (0..n)
        .map(|t| {
            if drop.contains(&t) {
                *dropped.next().expect("dropped entry")
            } else {
                *kept.next().expect("kept entry")
            }
        })
        .collect()
}

/// A choice path outside the periods in `drop`.
struct Partial<'a> {
    drop: &'a [usize],
    budgets: &'a [usize],
    patches: Vec<usize>,
}

impl Partial<'_> {
    fn path(&self, budgets: &[usize], patches: &[usize]) -> ChoicePath {
        ChoicePath::new(
            merge(self.budgets, self.drop, budgets),
            merge(&self.patches, self.drop, patches),
        )
    }

    fn label(&self, domain: &ChoiceDomain) -> String {
        let periods: Vec<usize> = (0..domain.horizon())
            .filter(|t| !self.drop.contains(t))
            .collect();
        let parts: Vec<String> = periods
            .iter()
            .zip(self.budgets.iter().zip(&self.patches))
            .map(|(&t, (&j, &i))| domain.periods[t].label(PatchId { owner: j, patch: i }))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

fn partials<'a>(
    domain: &ChoiceDomain,
    drop: &'a [usize],
    budgets: &'a [usize],
) -> Vec<Partial<'a>> {
    let periods: Vec<usize> = (0..domain.horizon())
        .filter(|t| !drop.contains(t))
        .collect();
    let supports: Vec<Vec<usize>> = periods
        .iter()
        .zip(budgets)
        .map(|(&t, &j)| domain.support(t, j))
        .collect();
    let sizes: Vec<usize> = supports.iter().map(Vec::len).collect();
    cartesian(&sizes)
        .into_iter()
        .map(|idx| Partial {
            drop,
            budgets,
            patches: idx.iter().zip(&supports).map(|(&k, s)| s[k]).collect(),
        })
        .collect()
}

fn union_label(domain: &ChoiceDomain, t: usize, j: usize, patches: &[usize]) -> String {
    let parts: Vec<String> = patches
        .iter()
        .map(|&i| domain.periods[t].label(PatchId { owner: j, patch: i }))
        .collect();
    format!("[{}]", parts.join(" + "))
}

/// Patches of budget `k` above plane `k2`, and patches of `k2` below plane
/// `k`, within period `t`. Both are nonempty exactly when some patch of `k`
/// dominates some patch of `k2`.
fn dominance_unions(
    domain: &ChoiceDomain,
    t: usize,
    k: usize,
    k2: usize,
) -> Option<(Vec<usize>, Vec<usize>)> {
    let set = &domain.periods[t];
    let upper: Vec<usize> = domain
        .support(t, k)
        .into_iter()
        .filter(|&i| set.patches[k][i].signs[k2] == Side::Above)
        .collect();
    let lower: Vec<usize> = domain
        .support(t, k2)
        .into_iter()
        .filter(|&i| set.patches[k2][i].signs[k] == Side::Below)
        .collect();
    (!upper.is_empty() && !lower.is_empty()).then_some((upper, lower))
}

/// For every period and every choice among the other periods, the demand of
/// the whole budget is the same for every budget of the period observed
/// together with those other budgets.
pub fn check_stability(rho: &DynamicStochasticDemand, domain: &ChoiceDomain) -> AxiomReport {
    let mut c = Collector::new(rho);
    for t in 0..domain.horizon() {
        let drop = [t];
        for (others, at_t) in groups(domain, &drop) {
            if at_t.len() < 2 {
                continue;
            }
            let js: Vec<usize> = at_t.iter().map(|v| v[0]).collect();
            for partial in partials(domain, &drop, &others) {
                let whole = |j: usize| -> Vec<ChoicePath> {
                    domain
                        .support(t, j)
                        .into_iter()
                        .map(|i| partial.path(&[j], &[i]))
                        .collect()
                };
                let base = whole(js[0]);
                for &j in &js[1..] {
                    c.check(
                        || {
                            format!(
                                "period {}: {} vs {} given {}",
                                t + 1,
                                domain.periods[t].budgets[js[0]].label(),
                                domain.periods[t].budgets[j].label(),
                                partial.label(domain)
                            )
                        },
                        base.clone(),
                        whole(j),
                        Relation::Equal,
                    );
                }
            }
        }
    }
    if c.checked == 0 {
        c.note("no two observed budget paths differ in exactly one period");
    }
    c.finish(Axiom::Stability)
}

/// For every dominance between budgets `k` and `k2` of one period, the part
/// of `k` above `k2` carries at least the demand of the part of `k2` below
/// `k`, for every choice among the other periods.
pub fn check_monotonicity(rho: &DynamicStochasticDemand, domain: &ChoiceDomain) -> AxiomReport {
    let mut c = Collector::new(rho);
    for t in 0..domain.horizon() {
        let drop = [t];
        for (others, at_t) in groups(domain, &drop) {
            let js: Vec<usize> = at_t.iter().map(|v| v[0]).collect();
            for &k in &js {
                for &k2 in &js {
                    if k == k2 {
                        continue;
                    }
                    let Some((upper, lower)) = dominance_unions(domain, t, k, k2) else {
                        continue;
                    };
                    for partial in partials(domain, &drop, &others) {
                        let lhs = upper.iter().map(|&i| partial.path(&[k], &[i])).collect();
                        let rhs = lower.iter().map(|&i| partial.path(&[k2], &[i])).collect();
                        c.check(
                            || {
                                format!(
                                    "period {}: {} vs {} given {}",
                                    t + 1,
                                    union_label(domain, t, k, &upper),
                                    union_label(domain, t, k2, &lower),
                                    partial.label(domain)
                                )
                            },
                            lhs,
                            rhs,
                            Relation::AtLeast,
                        );
                    }
                }
            }
        }
    }
    if c.checked == 0 {
        c.note("no observed pair of budget paths carries a dominance pair");
    }
    c.finish(Axiom::Monotonicity)
}

/// Difference-in-differences across two periods: with `U`/`L` the dominating
/// and dominated unions of a dominance pair in period `t`, and `U*`/`L*` in
/// period `s`, `rho(U,U*) - rho(L,U*) >= rho(U,L*) - rho(L,L*)`. The
/// condition is symmetric in the two periods, so each unordered pair of
/// periods is visited once.
pub fn check_intensity_monotonicity(
    rho: &DynamicStochasticDemand,
    domain: &ChoiceDomain,
) -> AxiomReport {
    let mut c = Collector::new(rho);
    if domain.horizon() < 2 {
        c.note("a single period has no pair of periods");
        return c.finish(Axiom::IntensityMonotonicity);
    }
    for t in 0..domain.horizon() {
        for s in t + 1..domain.horizon() {
            let drop = [t, s];
            for (others, pairs) in groups(domain, &drop) {
                let ks: BTreeSet<usize> = pairs.iter().map(|v| v[0]).collect();
                let js: BTreeSet<usize> = pairs.iter().map(|v| v[1]).collect();
                for &k in &ks {
                    for &k2 in &ks {
                        if k == k2 {
                            continue;
                        }
                        let Some((u, l)) = dominance_unions(domain, t, k, k2) else {
                            continue;
                        };
                        for &j in &js {
                            for &j2 in &js {
                                if j == j2 {
                                    continue;
                                }
                                let all_observed = [[k, j], [k2, j], [k, j2], [k2, j2]]
                                    .iter()
                                    .all(|p| pairs.contains(&p.to_vec()));
                                if !all_observed {
                                    continue;
                                }
                                let Some((u2, l2)) = dominance_unions(domain, s, j, j2) else {
                                    continue;
                                };
                                for partial in partials(domain, &drop, &others) {
                                    let block = |a: usize, ia: &[usize], b: usize, ib: &[usize]| {
                                        let mut out = Vec::new();
                                        for &x in ia {
                                            for &y in ib {
                                                out.push(partial.path(&[a, b], &[x, y]));
                                            }
                                        }
                                        out
                                    };
                                    let mut lhs = block(k, &u, j, &u2);
                                    lhs.extend(block(k2, &l, j2, &l2));
                                    let mut rhs = block(k2, &l, j, &u2);
                                    rhs.extend(block(k, &u, j2, &l2));
                                    c.check(
                                        || {
                                            format!(
                                                "periods {} and {}: {} over {} against {} over {} given {}",
                                                t + 1,
                                                s + 1,
                                                union_label(domain, t, k, &u),
                                                union_label(domain, t, k2, &l),
                                                union_label(domain, s, j, &u2),
                                                union_label(domain, s, j2, &l2),
                                                partial.label(domain)
                                            )
                                        },
                                        lhs,
                                        rhs,
                                        Relation::AtLeast,
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    if c.checked == 0 {
        c.note("no two periods carry dominance pairs on four observed budget paths");
    }
    c.finish(Axiom::IntensityMonotonicity)
}
