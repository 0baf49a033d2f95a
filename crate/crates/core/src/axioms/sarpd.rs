use std::collections::HashMap;

use num_traits::Zero;

use super::{Axiom, AxiomReport, Collector, Relation, Violation};
use crate::demand::DynamicStochasticDemand;
use crate::error::{DrumError, Result};
use crate::geometry::{dominates_across, PatchId};
use crate::rationality::{BudgetPath, ChoiceDomain, ChoicePath};

type Node = (usize, PatchId);

struct DominanceCache<'a> {
    domain: &'a ChoiceDomain,
    seen: HashMap<(Node, Node), bool>,
}

impl<'a> DominanceCache<'a> {
    fn new(domain: &'a ChoiceDomain) -> Self {
        DominanceCache {
            domain,
            seen: HashMap::new(),
        }
    }

    fn dominates(&mut self, a: Node, b: Node) -> bool {
        let domain = self.domain;
        *self.seen.entry((a, b)).or_insert_with(|| {
            a.0 != b.0 && dominates_across(&domain.periods[a.0], a.1, &domain.periods[b.0], b.1)
        })
    }

    /// Periods of a dominance cycle among the path's patches, in order.
    fn cycle(&mut self, cp: &ChoicePath) -> Option<Vec<usize>> {
        let nodes: Vec<Node> = (0..cp.periods())
            .map(|t| {
                (
                    t,
                    PatchId {
                        owner: cp.budgets.0[t],
                        patch: cp.patches[t],
                    },
                )
            })
            .collect();
        let n = nodes.len();
        let mut adj = vec![Vec::new(); n];
        for a in 0..n {
            for b in 0..n {
                if self.dominates(nodes[a], nodes[b]) {
                    adj[a].push(b);
                }
            }
        }
        find_cycle(&adj)
    }
}

/// Some directed cycle of the graph, as a vertex sequence.
fn find_cycle(adj: &[Vec<usize>]) -> Option<Vec<usize>> {
    // 0 unvisited, 1 on stack, 2 done
    let mut state = vec![0u8; adj.len()];
    let mut stack: Vec<usize> = Vec::new();
    fn visit(
        v: usize,
        adj: &[Vec<usize>],
        state: &mut [u8],
        stack: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        state[v] = 1;
        stack.push(v);
        for &w in &adj[v] {
            if state[w] == 1 {
                let start = stack.iter().position(|&x| x == w).expect("on stack");
                return Some(stack[start..].to_vec());
            }
            if state[w] == 0 {
                if let Some(c) = visit(w, adj, state, stack) {
                    return Some(c);
                }
            }
        }
        stack.pop();
        state[v] = 2;
        None
    }
    for v in 0..adj.len() {
        if state[v] == 0 {
            if let Some(c) = visit(v, adj, &mut state, &mut stack) {
                return Some(c);
            }
        }
    }
    None
}

/// A dominance cycle among the patches of one choice path, as patch labels
/// in cycle order.
pub fn dominance_cycle(domain: &ChoiceDomain, cp: &ChoicePath) -> Option<Vec<String>> {
    let mut cache = DominanceCache::new(domain);
    cache.cycle(cp).map(|c| labels(domain, cp, &c))
}

fn labels(domain: &ChoiceDomain, cp: &ChoicePath, cycle: &[usize]) -> Vec<String> {
    cycle
        .iter()
        .map(|&t| {
            domain.periods[t].label(PatchId {
                owner: cp.budgets.0[t],
                patch: cp.patches[t],
            })
        })
        .collect()
}

fn check_paths(
    c: &mut Collector<'_>,
    cache: &mut DominanceCache<'_>,
    rho: &DynamicStochasticDemand,
    domain: &ChoiceDomain,
    bp: &BudgetPath,
) {
    for cp in domain.choice_paths(bp) {
        c.checked += 1;
        let Some(cycle) = cache.cycle(&cp) else {
            continue;
        };
        if rho.get(&cp).is_zero() {
            continue;
        }
        let names = labels(domain, &cp, &cycle);
        let description = format!(
            "{cp} has the dominance cycle {} > {}",
            names.join(" > "),
            names[0]
        );
        c.violations.push(Violation::evaluate(
            rho,
            description,
            vec![cp],
            Vec::new(),
            Relation::Equal,
        ));
    }
}

/// Zero demand on every choice path of `bp` whose patches contain a
/// dominance cycle. Dominance across periods requires every point of one
/// patch to lie strictly above the other's budget plane and every point of
/// the other to lie strictly below the first one's plane.
pub fn check_sarpd(
    rho: &DynamicStochasticDemand,
    domain: &ChoiceDomain,
    bp: &BudgetPath,
) -> Result<AxiomReport> {
    if !domain.is_observed(bp) {
        return Err(DrumError::UnknownBudgetPath(bp.to_string()));
    }
    let mut c = Collector::new(rho);
    if domain.horizon() < 2 {
        c.note("a single period cannot hold a cycle");
        return Ok(c.finish(Axiom::Sarpd));
    }
    let mut cache = DominanceCache::new(domain);
    check_paths(&mut c, &mut cache, rho, domain, bp);
    Ok(c.finish(Axiom::Sarpd))
}

/// [`check_sarpd`] over every observed budget path.
pub fn check_sarpd_all(rho: &DynamicStochasticDemand, domain: &ChoiceDomain) -> AxiomReport {
    let mut c = Collector::new(rho);
    if domain.horizon() < 2 {
        c.note("a single period cannot hold a cycle");
        return c.finish(Axiom::Sarpd);
    }
    let mut cache = DominanceCache::new(domain);
    for bp in &domain.budget_paths {
        check_paths(&mut c, &mut cache, rho, domain, bp);
    }
    c.finish(Axiom::Sarpd)
}
