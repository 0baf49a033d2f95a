//! Property tests against brute-force oracles written independently of the
//! library internals.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use drum_core::axioms::check_stability;
use drum_core::geometry::Side;
use drum_core::io::{dataset_to_json, parse_dataset, Dataset};
use drum_core::pooling::build_pooled_patches;
use drum_core::rational::{self, frac};
use drum_core::reference;
use drum_core::simulation::{
    random_arrangement, random_domain, random_normalized_demand, random_simplex_weights,
    simulate_mixture, simulate_panel, UtilityProcess, WeightedShares,
};
use drum_core::{
    enumerate_rational_types, test_drum, verify_certificate, verify_witness, Budget, BudgetPath,
    ChoiceDomain, PatchId, PatchSet, ProfileMatrix, Rational, DEFAULT_MAX_ENTRIES,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random point on a budget: a convex combination of its corner bundles.
fn point_on(rng: &mut ChaCha8Rng, b: &Budget) -> Vec<Rational> {
    let weights = random_simplex_weights(rng, b.goods());
    weights
        .iter()
        .zip(&b.prices)
        .map(|(l, p)| l * &b.expenditure / p)
        .collect()
}

fn arrangement(seed: u64) -> PatchSet {
    let mut r = rng(seed);
    let goods = r.gen_range(2..=3);
    let n = r.gen_range(1..=3);
    random_arrangement(&mut r, 0, goods, n)
}

/// Strict revealed preference among chosen bundles has no cycle, decided by
/// transitive closure.
fn sarp_acyclic(budgets: &[Budget], chosen: &[Vec<Rational>]) -> bool {
    let n = budgets.len();
    let mut reach = vec![vec![false; n]; n];
    for j in 0..n {
        for k in 0..n {
            reach[j][k] = chosen[j] != chosen[k] && !budgets[j].excess(&chosen[k]).is_positive();
        }
    }
    for m in 0..n {
        for j in 0..n {
            for k in 0..n {
                if reach[j][m] && reach[m][k] {
                    reach[j][k] = true;
                }
            }
        }
    }
    (0..n).all(|j| !reach[j][j])
}

fn odometer(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &s in sizes {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..s).map(move |i| {
                    let mut q = p.clone();
                    q.push(i);
                    q
                })
            })
            .collect();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_strings_round_trip(n in -10_000i64..10_000, d in 1i64..10_000) {
        let r = frac(n, d);
        prop_assert_eq!(rational::parse(&rational::format(&r)).unwrap(), r);
    }

    #[test]
    fn every_point_on_a_budget_lies_in_exactly_one_patch(seed in any::<u64>()) {
        let set = arrangement(seed);
        let mut r = rng(seed ^ 1);
        for b in &set.budgets {
            for _ in 0..20 {
                let y = point_on(&mut r, b);
                let holders: Vec<PatchId> = set.patches[b.index]
                    .iter()
                    .map(|p| p.id())
                    .filter(|&id| set.patch_contains(id, &y))
                    .collect();
                prop_assert_eq!(holders.len(), 1);
                prop_assert_eq!(set.classify_on(&y, b.index), Some(holders[0]));
            }
            let signs: BTreeSet<Vec<Side>> = set.patches[b.index].iter().map(|p| p.signs.clone()).collect();
            prop_assert_eq!(signs.len(), set.patches[b.index].len());
        }
        for p in set.all_patches() {
            prop_assert!(set.patch_contains(p.id(), &p.representative));
            prop_assert_eq!(p.is_intersection, p.signs.iter().filter(|s| **s == Side::On).count() > 1);
        }
    }

    #[test]
    fn dominance_agrees_with_sampled_points(seed in any::<u64>()) {
        let set = arrangement(seed);
        let mut r = rng(seed ^ 2);
        // dominance read off points: a's points above b's plane, b's points below a's plane
        let mut samples: Vec<(PatchId, Vec<Rational>)> = Vec::new();
        for b in &set.budgets {
            for _ in 0..60 {
                let y = point_on(&mut r, b);
                samples.push((set.classify_on(&y, b.index).unwrap(), y));
            }
        }
        for p in set.all_patches() {
            samples.push((p.id(), p.representative.clone()));
        }
        let mut seen = BTreeSet::new();
        for (a, ya) in &samples {
            for (b, yb) in &samples {
                if a.owner != b.owner
                    && set.budgets[b.owner].side(ya) == Side::Above
                    && set.budgets[a.owner].side(yb) == Side::Below
                {
                    seen.insert((*a, *b));
                }
            }
        }
        let listed: BTreeSet<(PatchId, PatchId)> = set.dominance.iter().copied().collect();
        prop_assert_eq!(seen, listed);
    }

    #[test]
    fn rational_types_match_exhaustive_search(seed in any::<u64>(), continuous in any::<bool>()) {
        let set = arrangement(seed);
        let domain = ChoiceDomain::new(vec![set.clone()], vec![BudgetPath(vec![0])], continuous).unwrap();
        let supports: Vec<Vec<usize>> = (0..set.budgets.len()).map(|j| domain.support(0, j)).collect();
        let sizes: Vec<usize> = supports.iter().map(Vec::len).collect();
        let mut want = BTreeSet::new();
        for pick in odometer(&sizes) {
            let choice: Vec<usize> = pick.iter().zip(&supports).map(|(&k, s)| s[k]).collect();
            let chosen: Vec<Vec<Rational>> = choice
                .iter()
                .enumerate()
                .map(|(j, &i)| set.patches[j][i].representative.clone())
                .collect();
            if sarp_acyclic(&set.budgets, &chosen) {
                want.insert(choice);
            }
        }
        let got: BTreeSet<Vec<usize>> =
            enumerate_rational_types(&set, continuous).into_iter().map(|t| t.choice).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn columns_are_products_of_types(seed in any::<u64>()) {
        let mut r = rng(seed);
        let horizon = r.gen_range(1..=3);
        let (all, cont) = (r.gen_bool(0.5), r.gen_bool(0.5));
        let domain = random_domain(&mut r, 2, horizon, 2, all, cont);
        let matrix = ProfileMatrix::of(&domain, DEFAULT_MAX_ENTRIES).unwrap();
        let per_period: usize = domain.rational_types().iter().map(Vec::len).product();
        prop_assert_eq!(matrix.column_count(), per_period);
        for col in &matrix.columns {
            for bp in &domain.budget_paths {
                let hits = col.iter().filter(|&&row| matrix.rows()[row].budgets == *bp).count();
                prop_assert_eq!(hits, 1);
            }
        }
        let rows: BTreeSet<_> = matrix.rows().iter().collect();
        prop_assert_eq!(rows.len(), matrix.row_count());
    }

    #[test]
    fn exactly_one_of_witness_and_certificate(seed in any::<u64>()) {
        let mut r = rng(seed);
        let horizon = r.gen_range(1..=2);
        let (all, cont) = (r.gen_bool(0.5), r.gen_bool(0.5));
        let domain = random_domain(&mut r, 2, horizon, 2, all, cont);
        let matrix = ProfileMatrix::of(&domain, DEFAULT_MAX_ENTRIES).unwrap();
        let rho = random_normalized_demand(&mut r, &domain);
        let v = test_drum(&matrix, &rho).unwrap();
        match (&v.weights, &v.certificate) {
            (Some(nu), None) => prop_assert!(v.is_feasible() && verify_witness(&matrix, &rho, nu)),
            (None, Some(d)) => prop_assert!(!v.is_feasible() && verify_certificate(&matrix, &rho, d)),
            _ => prop_assert!(false, "both or neither"),
        }
    }

    #[test]
    fn mixtures_are_feasible(seed in any::<u64>()) {
        let mut r = rng(seed);
        let horizon = r.gen_range(1..=2);
        let (all, cont) = (r.gen_bool(0.5), r.gen_bool(0.5));
        let domain = random_domain(&mut r, 2, horizon, 2, all, cont);
        let matrix = ProfileMatrix::of(&domain, DEFAULT_MAX_ENTRIES).unwrap();
        let nu = random_simplex_weights(&mut r, matrix.column_count());
        let rho = simulate_mixture(&matrix, &nu).unwrap();
        rho.validate(&domain).unwrap();
        let v = test_drum(&matrix, &rho).unwrap();
        prop_assert!(v.is_feasible());
        prop_assert!(verify_witness(&matrix, &rho, v.weights.as_ref().unwrap()));
    }

    #[test]
    fn pooled_patches_refine_period_patches(seed in any::<u64>()) {
        let mut r = rng(seed);
        let goods = r.gen_range(2..=3);
        let periods: Vec<PatchSet> = (0..2)
            .map(|t| {
                let n = r.gen_range(1..=2);
                random_arrangement(&mut r, t, goods, n)
            })
            .collect();
        let Ok(pooled) = build_pooled_patches(&periods) else {
            return Ok(());
        };
        for p in pooled.arrangement.all_patches() {
            let (t, id) = pooled.refines(p.id());
            let (owner_period, owner_index) = pooled.owners[p.owner];
            prop_assert_eq!(t, owner_period);
            prop_assert_eq!(id.owner, owner_index);
            prop_assert!(periods[t].patch_contains(id, &p.representative));
        }
        let per_period: usize = periods.iter().map(PatchSet::patch_count).sum();
        let full = |s: &PatchSet| s.all_patches().filter(|p| !p.is_intersection).count();
        prop_assert!(full(&pooled.arrangement) >= periods.iter().map(full).sum::<usize>());
        prop_assert!(pooled.patch_count() >= per_period);
    }

    #[test]
    fn datasets_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let horizon = r.gen_range(1..=2);
        let (all, cont) = (r.gen_bool(0.5), r.gen_bool(0.5));
        let domain = random_domain(&mut r, 2, horizon, 3, all, cont);
        let rho = random_normalized_demand(&mut r, &domain);
        let dataset = Dataset { domain, rho };
        let back = parse_dataset(&dataset_to_json(&dataset)).unwrap();
        prop_assert_eq!(back, dataset);
    }

    #[test]
    fn independent_utilities_are_stable(seed in any::<u64>()) {
        let mut r = rng(seed);
        let goods = r.gen_range(2..=3);
        let horizon = r.gen_range(2..=3);
        let domain = random_domain(&mut r, goods, horizon, 2, true, false);
        let periods = (0..horizon)
            .map(|_| {
                let n = r.gen_range(1..=3);
                random_simplex_weights(&mut r, n)
                    .into_iter()
                    .map(|weight| {
                        let raw: Vec<i64> = (0..goods).map(|_| r.gen_range(1..=9)).collect();
                        let total: i64 = raw.iter().sum();
                        WeightedShares { weight, alpha: raw.iter().map(|&x| frac(x, total)).collect() }
                    })
                    .collect()
            })
            .collect();
        let sim = simulate_panel(&UtilityProcess::Independent { periods }, &domain).unwrap();
        prop_assert!(check_stability(&sim.rho, &domain).passed());
        let matrix = ProfileMatrix::of(&domain, DEFAULT_MAX_ENTRIES);
        if let Ok(matrix) = matrix {
            prop_assert!(test_drum(&matrix, &sim.rho).unwrap().is_feasible());
        }
    }
}

#[test]
fn anticorrelated_types_are_feasible_but_dependent() {
    let domain = reference::simple_setup_domain();
    let process = UtilityProcess::Custom {
        types: serde_json::from_value(serde_json::json!([
            {"weight": "1/2", "alphas": [["4/5", "1/5"], ["1/5", "4/5"]]},
            {"weight": "1/2", "alphas": [["1/5", "4/5"], ["4/5", "1/5"]]},
        ]))
        .unwrap(),
    };
    let sim = simulate_panel(&process, &domain).unwrap();
    let matrix = ProfileMatrix::of(&domain, DEFAULT_MAX_ENTRIES).unwrap();
    assert!(test_drum(&matrix, &sim.rho).unwrap().is_feasible());
    // joint probability differs from the product of the two marginals
    let bp = BudgetPath(vec![0, 0]);
    let paths = domain.choice_paths(&bp);
    let marginal = |t: usize, i: usize| {
        paths
            .iter()
            .filter(|cp| cp.patches[t] == i)
            .fold(Rational::zero(), |acc, cp| acc + sim.rho.get(cp))
    };
    let dependent = paths
        .iter()
        .any(|cp| sim.rho.get(cp) != marginal(0, cp.patches[0]) * marginal(1, cp.patches[1]));
    assert!(dependent);
}
