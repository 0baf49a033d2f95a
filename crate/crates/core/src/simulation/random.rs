//! Seeded random instances.

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use super::{simulate_panel, Shares, SharesRow, Simulation, UtilityProcess, WeightedSequence};
use crate::demand::DynamicStochasticDemand;
use crate::error::Result;
use crate::geometry::{build_patches, Budget, PatchSet};
use crate::rational::{frac, int, Rational};
use crate::rationality::{BudgetPath, ChoiceDomain, ChoicePath, ProfileMatrix, ProfileSpace};

/// Nonnegative rational weights summing to 1: small random integers,
/// normalized.
pub fn random_simplex_weights<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Rational> {
    loop {
        let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=9)).collect();
        let total: i64 = raw.iter().sum();
        if total > 0 {
            return raw.into_iter().map(|x| frac(x, total)).collect();
        }
    }
}

/// Budget with integer prices in 1..=9 and expenditure in 5..=30.
pub fn random_budget<R: Rng + ?Sized>(
    rng: &mut R,
    period: usize,
    index: usize,
    goods: usize,
) -> Budget {
    let prices = (0..goods).map(|_| int(rng.gen_range(1..=9))).collect();
    Budget::new(period, index, prices, int(rng.gen_range(5..=30))).expect("positive budget")
}

/// Arrangement of `budgets` random budgets without repeated planes.
pub fn random_arrangement<R: Rng + ?Sized>(
    rng: &mut R,
    period: usize,
    goods: usize,
    budgets: usize,
) -> PatchSet {
    let mut list: Vec<Budget> = Vec::with_capacity(budgets);
    while list.len() < budgets {
        let b = random_budget(rng, period, list.len(), goods);
        if list.iter().all(|o| !o.same_plane(&b)) {
            list.push(b);
        }
    }
    build_patches(&list).expect("distinct budgets")
}

/// Random domain with `goods` goods, `horizon` periods and 1..=`max_budgets`
/// budgets per period. A random nonempty subset of budget paths is observed
/// unless `all_paths` is set.
pub fn random_domain<R: Rng + ?Sized>(
    rng: &mut R,
    goods: usize,
    horizon: usize,
    max_budgets: usize,
    all_paths: bool,
    continuous_demand: bool,
) -> ChoiceDomain {
    let periods: Vec<PatchSet> = (0..horizon)
        .map(|t| {
            let n = rng.gen_range(1..=max_budgets);
            random_arrangement(rng, t, goods, n)
        })
        .collect();
    let mut paths = ChoiceDomain::all_budget_paths(&periods);
    if !all_paths {
        paths.shuffle(rng);
        let keep = rng.gen_range(1..=paths.len());
        paths.truncate(keep);
        paths.sort();
    }
    ChoiceDomain::new(periods, paths, continuous_demand).expect("valid random domain")
}

/// Arbitrary normalized demand: independent random distributions over the
/// choice paths of each observed budget path.
pub fn random_normalized_demand<R: Rng + ?Sized>(
    rng: &mut R,
    domain: &ChoiceDomain,
) -> DynamicStochasticDemand {
    let mut rho = DynamicStochasticDemand::new();
    for bp in &domain.budget_paths {
        let paths = domain.choice_paths(bp);
        let weights = random_simplex_weights(rng, paths.len());
        for (cp, w) in paths.into_iter().zip(weights) {
            rho.set(cp, w);
        }
    }
    rho
}

/// `A nu` for random integer weights of mixed sign summing to a positive
/// total, kept only when the result is a valid demand. Such demands are
/// normalized but often outside the cone.
pub fn random_signed_mixture<R: Rng + ?Sized>(
    rng: &mut R,
    matrix: &ProfileMatrix,
    tries: usize,
) -> Option<DynamicStochasticDemand> {
    let n = matrix.column_count();
    for _ in 0..tries {
        let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=4)).collect();
        let total: i64 = raw.iter().sum();
        if total <= 0 {
            continue;
        }
        let mut values = vec![Rational::zero(); matrix.row_count()];
        for (col, &x) in matrix.columns.iter().zip(&raw) {
            for &r in col {
                values[r] += frac(x, total);
            }
        }
        if values.iter().all(|v| !v.is_negative()) {
            return Some(DynamicStochasticDemand::from_vector(matrix.rows(), &values));
        }
    }
    None
}

/// `k` random profiles (possibly repeated) with random weights.
pub fn random_sparse_mixture<R: Rng + ?Sized>(
    rng: &mut R,
    space: &ProfileSpace,
    k: usize,
) -> Vec<(Vec<usize>, Rational)> {
    let weights = random_simplex_weights(rng, k);
    weights
        .into_iter()
        .map(|w| {
            let profile = space
                .types
                .iter()
                .map(|ts| rng.gen_range(0..ts.len()))
                .collect();
            (profile, w)
        })
        .collect()
}

/// A panel with a planted cross-period dominance cycle.
#[derive(Debug, Clone)]
pub struct PlantedCycle {
    pub domain: ChoiceDomain,
    pub process: UtilityProcess,
    pub simulation: Simulation,
    /// Observed budget path of the main budgets.
    pub path: BudgetPath,
    /// Choice path of the cycling type on `path`.
    pub cycle: ChoicePath,
}

const CYCLE_PRICES: [[i64; 3]; 3] = [[6, 2, 3], [2, 3, 6], [1, 4, 1]];
const CYCLE_INCOME: [i64; 3] = [32, 38, 18];
const CYCLE_CHOICE: [[i64; 3]; 3] = [[2, 1, 6], [1, 6, 3], [5, 3, 1]];

/// Three goods, three periods. In period `t` the main budget is chosen at
/// `y_t` with `y_1` over budget 2, `y_2` over budget 3 and `y_3` over
/// budget 1, while each is affordable at the previous budget. Three
/// auxiliary budgets per period cut a small patch around `y_t` so that the
/// dominance holds uniformly on patches. Half the mass follows the cycle;
/// the other half is a seeded stable Cobb-Douglas type.
pub fn planted_sarpd_cycle(seed: u64) -> Result<PlantedCycle> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let eps = frac(1, 20 + (seed % 20) as i64);
    let periods: Vec<PatchSet> = (0..3)
        .map(|t| {
            let p: Vec<Rational> = CYCLE_PRICES[t].iter().map(|&x| int(x)).collect();
            let w = int(CYCLE_INCOME[t]);
            let mut budgets = vec![Budget::new(t, 0, p.clone(), w.clone())?];
            for k in 0..3 {
                let mut q = p.clone();
                q[k] += int(1);
                let e = &w + int(CYCLE_CHOICE[t][k]) + &eps;
                budgets.push(Budget::new(t, k + 1, q, e)?);
            }
            build_patches(&budgets)
        })
        .collect::<Result<_>>()?;
    let path = BudgetPath(vec![0, 0, 0]);
    let domain = ChoiceDomain::new(periods, vec![path.clone()], false)?;
    let cycling: Vec<SharesRow> = (0..3)
        .map(|t| {
            SharesRow(
                (0..3)
                    .map(|k| frac(CYCLE_CHOICE[t][k] * CYCLE_PRICES[t][k], CYCLE_INCOME[t]))
                    .collect(),
            )
        })
        .collect();
    let raw: Vec<i64> = (0..3).map(|_| rng.gen_range(1..=6)).collect();
    let total: i64 = raw.iter().sum();
    let stable: Shares = raw.iter().map(|&x| frac(x, total)).collect();
    let process = UtilityProcess::Custom {
        types: vec![
            WeightedSequence {
                weight: frac(1, 2),
                alphas: cycling,
            },
            WeightedSequence {
                weight: frac(1, 2),
                alphas: vec![SharesRow(stable); 3],
            },
        ],
    };
    let simulation = simulate_panel(&process, &domain)?;
    let patches = (0..3)
        .map(|t| {
            let y: Vec<Rational> = CYCLE_CHOICE[t].iter().map(|&x| int(x)).collect();
            domain.periods[t]
                .classify_on(&y, 0)
                .expect("choice on main budget")
                .patch
        })
        .collect();
    let cycle = ChoicePath::new(path.0.clone(), patches);
    Ok(PlantedCycle {
        domain,
        process,
        simulation,
        path,
        cycle,
    })
}
