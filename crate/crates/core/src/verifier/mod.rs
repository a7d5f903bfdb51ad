//! Checks of the closed forms against the Fock oracle and Monte Carlo.
//!
//! Every check produces a [`ResidualReport`] whose `passed` flag is exactly
//! `residual <= tolerance`, so reports can be re-judged after the fact.

mod convergence;
mod crosscheck;
mod identities;
mod montecarlo;

use serde::Serialize;

use crate::fock::FockSpace;
use crate::params::Deformation;

pub use convergence::{convergence_probe, CONVERGENCE_FLOOR};
pub use crosscheck::{amplitude_independence, crosscheck_adaptive, crosscheck_suite, CrossCase};
pub use identities::{fit_bogoliubov, identity_suite, identity_suite_buffered, BogoliubovFit};
pub use montecarlo::{
    constraint_witness, overcompleteness_mc, ConstraintWitness, McReport, ProbePair, MC_MIN_SAMPLES, MC_Z_LIMIT,
};

/// Tolerance for operator identities on the safe subspace.
pub const IDENTITY_TOLERANCE: f64 = 1e-8;

/// Relative tolerance for closed form versus oracle.
pub const CROSSCHECK_TOLERANCE: f64 = 1e-6;

/// Parameters and discretization a check ran with.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckMeta {
    pub hbar: f64,
    pub mu: f64,
    pub nu: f64,
    pub theta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub buffer: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<usize>,
}

impl CheckMeta {
    pub fn new(params: impl Into<Deformation>) -> Self {
        let d = params.into();
        Self {
            hbar: d.hbar,
            mu: d.mu(),
            nu: d.nu(),
            theta: d.theta,
            cutoff: None,
            buffer: None,
            seed: None,
            case: None,
        }
    }

    pub fn with_space(mut self, space: FockSpace, buffer: usize) -> Self {
        self.cutoff = Some(space.cutoff());
        self.buffer = Some(buffer);
        self
    }

    pub fn with_case(mut self, case: usize) -> Self {
        self.case = Some(case);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub check: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub meta: CheckMeta,
}

impl ResidualReport {
    pub fn new(check: impl Into<String>, residual: f64, tolerance: f64, meta: CheckMeta) -> Self {
        Self {
            check: check.into(),
            residual,
            tolerance,
            passed: residual <= tolerance,
            meta,
        }
    }
}

/// `true` when every report passed.
pub fn all_passed(reports: &[ResidualReport]) -> bool {
    reports.iter().all(|r| r.passed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_params;

    #[test]
    fn passed_tracks_residual() {
        let meta = CheckMeta::new(make_params(0.5, 0.5, 1.0).unwrap());
        assert!(ResidualReport::new("a", 1e-9, 1e-8, meta.clone()).passed);
        assert!(ResidualReport::new("a", 1e-8, 1e-8, meta.clone()).passed);
        assert!(!ResidualReport::new("a", 2e-8, 1e-8, meta.clone()).passed);
        assert!(!ResidualReport::new("a", f64::NAN, 1e-8, meta).passed);
    }
}
