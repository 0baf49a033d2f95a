//! Benchmark inputs.

use drum_core::simulation::{random_domain, random_simplex_weights, simulate_mixture};
use drum_core::{ChoiceDomain, DynamicStochasticDemand, ProfileMatrix, DEFAULT_MAX_ENTRIES};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A seeded domain with its profile matrix and a demand inside the cone.
pub struct Instance {
    pub domain: ChoiceDomain,
    pub matrix: ProfileMatrix,
    pub rho: DynamicStochasticDemand,
}

/// Random instance with all budget paths observed.
pub fn instance(seed: u64, goods: usize, horizon: usize, budgets: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let domain = random_domain(&mut rng, goods, horizon, budgets, true, true);
    let matrix = ProfileMatrix::of(&domain, DEFAULT_MAX_ENTRIES).expect("matrix within limits");
    let nu = random_simplex_weights(&mut rng, matrix.column_count());
    let rho = simulate_mixture(&matrix, &nu).expect("valid weights");
    Instance {
        domain,
        matrix,
        rho,
    }
}
