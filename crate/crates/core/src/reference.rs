//! The two-period, two-budget reference setup and its worked demands.
//!
//! Both periods use the budgets `5 y1 + 3 y2 = 15` and `3 y1 + 5 y2 = 15`,
//! which cross at `(15/8, 15/8)`. Budget 1 reaches higher on the last good,
//! so its first patch lies above budget 2 and the first patch of budget 2
//! lies below budget 1. Intersection patches are excluded (continuous
//! demand). Demands are written as 4 x 4 grids: rows are period-1 patches
//! `x_{1|1}, x_{2|1}, x_{1|2}, x_{2|2}` and columns the same patches of
//! period 2.

use crate::demand::DynamicStochasticDemand;
use crate::geometry::{build_patches, Budget};
use crate::rational::{frac, int, Rational};
use crate::rationality::{BudgetPath, ChoiceDomain, ChoicePath};

/// `(budget, patch)` of grid position `k`, zero-based.
pub const GRID_ORDER: [(usize, usize); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];

pub fn simple_setup_budgets(period: usize) -> Vec<Budget> {
    vec![
        Budget::new(period, 0, vec![int(5), int(3)], int(15)).expect("valid budget"),
        Budget::new(period, 1, vec![int(3), int(5)], int(15)).expect("valid budget"),
    ]
}

pub fn simple_setup_domain() -> ChoiceDomain {
    let periods = (0..2)
        .map(|t| build_patches(&simple_setup_budgets(t)).expect("valid arrangement"))
        .collect::<Vec<_>>();
    let paths = vec![
        BudgetPath(vec![0, 0]),
        BudgetPath(vec![0, 1]),
        BudgetPath(vec![1, 0]),
        BudgetPath(vec![1, 1]),
    ];
    ChoiceDomain::new(periods, paths, true).expect("valid domain")
}

/// Choice path of grid cell `(row, col)`.
pub fn grid_path(row: usize, col: usize) -> ChoicePath {
    let (j1, i1) = GRID_ORDER[row];
    let (j2, i2) = GRID_ORDER[col];
    ChoicePath::new(vec![j1, j2], vec![i1, i2])
}

pub fn demand_from_grid(grid: [[Rational; 4]; 4]) -> DynamicStochasticDemand {
    let mut rho = DynamicStochasticDemand::new();
    for (r, row) in grid.into_iter().enumerate() {
        for (c, p) in row.into_iter().enumerate() {
            rho.set(grid_path(r, c), p);
        }
    }
    rho
}

fn grid(cells: [[(i64, i64); 4]; 4]) -> DynamicStochasticDemand {
    demand_from_grid(cells.map(|row| row.map(|(n, d)| frac(n, d))))
}

/// Stable demand violating monotonicity and intensity monotonicity.
pub fn table5() -> DynamicStochasticDemand {
    grid([
        [(3, 4), (0, 1), (3, 4), (0, 1)],
        [(0, 1), (1, 4), (1, 4), (0, 1)],
        [(0, 1), (1, 4), (1, 4), (0, 1)],
        [(3, 4), (0, 1), (3, 4), (0, 1)],
    ])
}

/// Demand whose period-1 slices are consistent with static random utility
/// although the panel is not dynamically rationalizable.
pub fn table6() -> DynamicStochasticDemand {
    grid([
        [(1, 6), (1, 3), (2, 3), (0, 1)],
        [(1, 3), (1, 6), (1, 6), (1, 6)],
        [(1, 6), (1, 3), (2, 3), (0, 1)],
        [(1, 3), (1, 6), (1, 6), (1, 6)],
    ])
}
