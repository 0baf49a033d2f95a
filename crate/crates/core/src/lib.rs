//! Exact revealed-preference tests for dynamic random utility models on
//! linear budgets.

pub mod axioms;
pub mod demand;
pub mod error;
pub mod feasibility;
pub mod geometry;
pub mod io;
pub mod panel;
pub mod pooling;
pub mod rational;
pub mod rationality;
pub mod reference;
mod simplex;
pub mod simulation;

pub use axioms::{Axiom, AxiomReport, AxiomStatus};
pub use demand::DynamicStochasticDemand;
pub use error::{DrumError, Result};
pub use feasibility::{test_drum, verify_certificate, verify_witness, Status, Verdict};
pub use geometry::{build_patches, Budget, Patch, PatchId, PatchSet, Point, Side};
pub use panel::{Panel, PanelRow};
pub use pooling::{build_pooled_patches, pool, test_rum_pooled, PooledPatchSet, Weighting};
pub use rational::Rational;
pub use rationality::{
    build_profile_matrix, enumerate_rational_types, BudgetPath, ChoiceDomain, ChoicePath,
    DemandType, ProfileMatrix, ProfileSpace, DEFAULT_MAX_ENTRIES,
};
pub use simulation::{simulate_mixture, simulate_panel, UtilityProcess};
