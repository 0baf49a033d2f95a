//! Necessary conditions for dynamic rationalizability, per-period slices and
//! the path-dominance axiom for constant preferences.

mod conditions;
mod sarpd;
mod slicing;

use std::fmt;

use num_traits::Zero;

use crate::demand::DynamicStochasticDemand;
use crate::rational::{self, Rational};
use crate::rationality::ChoicePath;

pub use conditions::{check_intensity_monotonicity, check_monotonicity, check_stability};
pub use sarpd::{check_sarpd, check_sarpd_all, dominance_cycle};
pub use slicing::{slice, test_rum_static, Family, Marginal, MarginalDemand};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axiom {
    Stability,
    Monotonicity,
    IntensityMonotonicity,
    Sarpd,
}

impl Axiom {
    pub fn name(self) -> &'static str {
        match self {
            Axiom::Stability => "stability",
            Axiom::Monotonicity => "monotonicity",
            Axiom::IntensityMonotonicity => "intensity_monotonicity",
            Axiom::Sarpd => "sarpd",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxiomStatus {
    Pass,
    Fail,
    /// The observed budget paths instantiate no instance of the axiom.
    NotApplicable,
}

impl fmt::Display for AxiomStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AxiomStatus::Pass => "pass",
            AxiomStatus::Fail => "fail",
            AxiomStatus::NotApplicable => "not applicable",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Equal,
    /// `lhs >= rhs`.
    AtLeast,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Equal => "=",
            Relation::AtLeast => ">=",
        })
    }
}

/// One instantiated condition: the demand summed over `lhs` compared with
/// the demand summed over `rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub description: String,
    pub lhs: Vec<ChoicePath>,
    pub rhs: Vec<ChoicePath>,
    pub relation: Relation,
    pub lhs_value: Rational,
    pub rhs_value: Rational,
}

impl Violation {
    pub(crate) fn evaluate(
        rho: &DynamicStochasticDemand,
        description: String,
        lhs: Vec<ChoicePath>,
        rhs: Vec<ChoicePath>,
        relation: Relation,
    ) -> Violation {
        let lhs_value = total(rho, &lhs);
        let rhs_value = total(rho, &rhs);
        Violation {
            description,
            lhs,
            rhs,
            relation,
            lhs_value,
            rhs_value,
        }
    }

    /// Re-evaluates the condition on `rho`; true when it is satisfied.
    pub fn holds(&self, rho: &DynamicStochasticDemand) -> bool {
        let l = total(rho, &self.lhs);
        let r = total(rho, &self.rhs);
        match self.relation {
            Relation::Equal => l == r,
            Relation::AtLeast => l >= r,
        }
    }

    fn satisfied(&self) -> bool {
        match self.relation {
            Relation::Equal => self.lhs_value == self.rhs_value,
            Relation::AtLeast => self.lhs_value >= self.rhs_value,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} {} {} fails",
            self.description,
            rational::format(&self.lhs_value),
            self.relation,
            rational::format(&self.rhs_value)
        )
    }
}

pub(crate) fn total(rho: &DynamicStochasticDemand, paths: &[ChoicePath]) -> Rational {
    paths
        .iter()
        .fold(Rational::zero(), |acc, cp| acc + rho.get(cp))
}

#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub status: AxiomStatus,
    /// Number of instantiated conditions.
    pub checked: usize,
    pub violations: Vec<Violation>,
    pub notes: Vec<String>,
}

impl AxiomReport {
    /// Pass or not applicable.
    pub fn passed(&self) -> bool {
        self.status != AxiomStatus::Fail
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}: {} ({} conditions checked)",
            self.axiom, self.status, self.checked
        )?;
        for note in &self.notes {
            writeln!(f, "  note: {note}")?;
        }
        for v in &self.violations {
            writeln!(f, "  violation: {v}")?;
        }
        Ok(())
    }
}

/// Collects instantiated conditions and keeps the failing ones.
pub(crate) struct Collector<'a> {
    rho: &'a DynamicStochasticDemand,
    checked: usize,
    violations: Vec<Violation>,
    notes: Vec<String>,
}

impl<'a> Collector<'a> {
    pub(crate) fn new(rho: &'a DynamicStochasticDemand) -> Self {
        Collector {
            rho,
            checked: 0,
            violations: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub(crate) fn check(
        &mut self,
        description: impl FnOnce() -> String,
        lhs: Vec<ChoicePath>,
        rhs: Vec<ChoicePath>,
        relation: Relation,
    ) {
        self.checked += 1;
        let v = Violation::evaluate(self.rho, String::new(), lhs, rhs, relation);
        if !v.satisfied() {
            self.violations.push(Violation {
                description: description(),
                ..v
            });
        }
    }

    pub(crate) fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub(crate) fn finish(self, axiom: Axiom) -> AxiomReport {
        let status = if !self.violations.is_empty() {
            AxiomStatus::Fail
        } else if self.checked == 0 {
            AxiomStatus::NotApplicable
        } else {
            AxiomStatus::Pass
        };
        AxiomReport {
            axiom,
            status,
            checked: self.checked,
            violations: self.violations,
            notes: self.notes,
        }
    }
}
