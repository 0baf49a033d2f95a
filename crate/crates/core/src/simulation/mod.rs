//! Ground-truth generators: exact mixtures over profiles, Cobb-Douglas
//! panels, random instances and an exhaustive feasibility oracle.

mod oracle;
mod random;

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::demand::DynamicStochasticDemand;
use crate::error::{DrumError, Result};
use crate::geometry::{Budget, PatchId, Point};
use crate::panel::{Panel, PanelRow};
use crate::rational::{self, Rational};
use crate::rationality::{ChoiceDomain, ChoicePath, ProfileMatrix, ProfileSpace};

pub use oracle::{brute_force_verdict, DEFAULT_ORACLE_CAP};
pub use random::{
    planted_sarpd_cycle, random_arrangement, random_budget, random_domain,
    random_normalized_demand, random_signed_mixture, random_simplex_weights, random_sparse_mixture,
    PlantedCycle,
};

/// Cobb-Douglas expenditure shares, one per good, positive and summing to 1.
pub type Shares = Vec<Rational>;

/// A finite distribution over sequences of per-period utilities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum UtilityProcess {
    /// The same shares in every period.
    Constant { types: Vec<WeightedShares> },
    /// Shares drawn independently in each period from per-period lists.
    Independent { periods: Vec<Vec<WeightedShares>> },
    /// Explicit share sequences.
    Custom { types: Vec<WeightedSequence> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedShares {
    #[serde(with = "rational::serde_str")]
    pub weight: Rational,
    #[serde(with = "rational::serde_vec")]
    pub alpha: Shares,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedSequence {
    #[serde(with = "rational::serde_str")]
    pub weight: Rational,
    pub alphas: Vec<SharesRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SharesRow(#[serde(with = "rational::serde_vec")] pub Shares);

/// One agent type: its weight and its shares in every period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentType {
    pub weight: Rational,
    pub alphas: Vec<Shares>,
}

fn check_weights<'a>(weights: impl Iterator<Item = &'a Rational>) -> Result<()> {
    let mut total = Rational::zero();
    for w in weights {
        if w.is_negative() {
            return Err(DrumError::InvalidSpec(format!(
                "negative weight {}",
                rational::format(w)
            )));
        }
        total += w;
    }
    if !total.is_one() {
        return Err(DrumError::InvalidSpec(format!(
            "weights sum to {}, expected 1",
            rational::format(&total)
        )));
    }
    Ok(())
}

fn check_shares(alpha: &Shares, goods: usize) -> Result<()> {
    if alpha.len() != goods {
        return Err(DrumError::InvalidSpec(format!(
            "{} shares for {goods} goods",
            alpha.len()
        )));
    }
    if alpha.iter().any(|a| !a.is_positive()) {
        return Err(DrumError::InvalidSpec(
            "shares must be strictly positive".into(),
        ));
    }
    let total = alpha.iter().fold(Rational::zero(), |acc, a| acc + a);
    if !total.is_one() {
        return Err(DrumError::InvalidSpec(format!(
            "shares sum to {}, expected 1",
            rational::format(&total)
        )));
    }
    Ok(())
}

impl UtilityProcess {
    /// Agent types over `periods` periods, validated for `goods` goods.
    pub fn expand(&self, periods: usize, goods: usize) -> Result<Vec<AgentType>> {
        let types = match self {
            UtilityProcess::Constant { types } => {
                check_weights(types.iter().map(|t| &t.weight))?;
                types
                    .iter()
                    .map(|t| AgentType {
                        weight: t.weight.clone(),
                        alphas: vec![t.alpha.clone(); periods],
                    })
                    .collect::<Vec<_>>()
            }
            UtilityProcess::Independent { periods: lists } => {
                if lists.len() != periods {
                    return Err(DrumError::InvalidSpec(format!(
                        "{} period lists for {periods} periods",
                        lists.len()
                    )));
                }
                for list in lists {
                    check_weights(list.iter().map(|t| &t.weight))?;
                }
                let sizes: Vec<usize> = lists.iter().map(Vec::len).collect();
                crate::rationality::cartesian(&sizes)
                    .into_iter()
                    .map(|pick| AgentType {
                        weight: pick
                            .iter()
                            .zip(lists)
                            .fold(Rational::one(), |acc, (&k, l)| acc * &l[k].weight),
                        alphas: pick
                            .iter()
                            .zip(lists)
                            .map(|(&k, l)| l[k].alpha.clone())
                            .collect(),
                    })
                    .collect()
            }
            UtilityProcess::Custom { types } => {
                check_weights(types.iter().map(|t| &t.weight))?;
                for t in types {
                    if t.alphas.len() != periods {
                        return Err(DrumError::InvalidSpec(format!(
                            "share sequence of length {} for {periods} periods",
                            t.alphas.len()
                        )));
                    }
                }
                types
                    .iter()
                    .map(|t| AgentType {
                        weight: t.weight.clone(),
                        alphas: t.alphas.iter().map(|r| r.0.clone()).collect(),
                    })
                    .collect()
            }
        };
        if types.is_empty() {
            return Err(DrumError::InvalidSpec("no agent types".into()));
        }
        for t in &types {
            for a in &t.alphas {
                check_shares(a, goods)?;
            }
        }
        Ok(types)
    }
}

/// Cobb-Douglas demand `y_k = alpha_k w / p_k`.
pub fn cobb_douglas(alpha: &[Rational], budget: &Budget) -> Point {
    alpha
        .iter()
        .zip(&budget.prices)
        .map(|(a, p)| a * &budget.expenditure / p)
        .collect()
}

/// Output of [`simulate_panel`].
#[derive(Debug, Clone)]
pub struct Simulation {
    pub types: Vec<AgentType>,
    /// One agent per (observed budget path, type), weighted by the type.
    pub panel: Panel,
    pub rho: DynamicStochasticDemand,
    pub notes: Vec<String>,
}

/// Simulates every agent type on every observed budget path. The demand is
/// the exact mixture over types; the panel lists the chosen points.
pub fn simulate_panel(process: &UtilityProcess, domain: &ChoiceDomain) -> Result<Simulation> {
    let goods = domain.periods[0].goods();
    let types = process.expand(domain.horizon(), goods)?;
    // choice of every type on every budget of every period
    let mut choices: BTreeMap<(usize, usize, usize), (Point, PatchId)> = BTreeMap::new();
    let mut notes = Vec::new();
    for (a, ty) in types.iter().enumerate() {
        for (t, set) in domain.periods.iter().enumerate() {
            for budget in &set.budgets {
                let y = cobb_douglas(&ty.alphas[t], budget);
                let id = set
                    .classify_on(&y, budget.index)
                    .expect("demand on its budget");
                if set.patch(id).is_intersection {
                    if domain.continuous_demand {
                        return Err(DrumError::IntersectionDemand(set.label(id)));
                    }
                    notes.push(format!(
                        "type {} chooses intersection patch {}",
                        a + 1,
                        set.label(id)
                    ));
                }
                choices.insert((a, t, budget.index), (y, id));
            }
        }
    }
    let mut panel = Panel::default();
    let mut rho = DynamicStochasticDemand::new();
    for (pos, bp) in domain.budget_paths.iter().enumerate() {
        for (a, ty) in types.iter().enumerate() {
            let agent = pos * types.len() + a;
            panel.weights.insert(agent, ty.weight.clone());
            let mut patches = Vec::with_capacity(bp.0.len());
            for (t, &j) in bp.0.iter().enumerate() {
                let (y, id) = &choices[&(a, t, j)];
                panel.rows.push(PanelRow {
                    agent,
                    period: t,
                    budget: j,
                    point: y.clone(),
                });
                patches.push(id.patch);
            }
            rho.add(ChoicePath::new(bp.0.clone(), patches), ty.weight.clone());
        }
    }
    Ok(Simulation {
        types,
        panel,
        rho,
        notes,
    })
}

fn check_mixture(nu: &[Rational]) -> Result<()> {
    if let Some(w) = nu.iter().find(|w| w.is_negative()) {
        return Err(DrumError::InvalidWeights(format!(
            "negative weight {}",
            rational::format(w)
        )));
    }
    let total = nu.iter().fold(Rational::zero(), |acc, w| acc + w);
    if !total.is_one() {
        return Err(DrumError::InvalidWeights(format!(
            "weights sum to {}",
            rational::format(&total)
        )));
    }
    Ok(())
}

/// `rho = A nu` for a probability vector over the matrix columns.
pub fn simulate_mixture(
    matrix: &ProfileMatrix,
    nu: &[Rational],
) -> Result<DynamicStochasticDemand> {
    if nu.len() != matrix.column_count() {
        return Err(DrumError::InvalidWeights(format!(
            "{} weights for {} columns",
            nu.len(),
            matrix.column_count()
        )));
    }
    check_mixture(nu)?;
    let mut values = vec![Rational::zero(); matrix.row_count()];
    for (col, w) in matrix.columns.iter().zip(nu) {
        for &r in col {
            values[r] += w;
        }
    }
    Ok(DynamicStochasticDemand::from_vector(matrix.rows(), &values))
}

/// `rho = sum_r nu_r a_r` over explicitly listed profiles, without
/// materializing the matrix.
pub fn simulate_profiles(
    space: &ProfileSpace,
    profiles: &[(Vec<usize>, Rational)],
) -> Result<DynamicStochasticDemand> {
    let weights: Vec<Rational> = profiles.iter().map(|(_, w)| w.clone()).collect();
    check_mixture(&weights)?;
    let mut rho = DynamicStochasticDemand::new();
    for (profile, w) in profiles {
        if profile.len() != space.types.len()
            || profile
                .iter()
                .zip(&space.types)
                .any(|(&k, ts)| k >= ts.len())
        {
            return Err(DrumError::InvalidWeights(format!(
                "profile {profile:?} does not exist"
            )));
        }
        if w.is_zero() {
            continue;
        }
        for bp in &space.domain.budget_paths {
            rho.add(space.choice_of(profile, bp), w.clone());
        }
    }
    Ok(rho)
}
