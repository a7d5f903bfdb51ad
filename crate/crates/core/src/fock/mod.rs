//! Truncated two-mode Fock realization of the deformed algebra.
//!
//! The basis is built on the two normal modes `c+ = (a + i b)/(2p)` and
//! `c- = (a - i b)/(2q)`, with `p = sqrt((1 + theta)/2)`, `q = sqrt((1 - theta)/2)`,
//! which are independent ordinary bosons whenever `theta < 1`. Their joint
//! vacuum is annihilated by both deformed operators, so it is the vacuum the
//! coherent and squeezed states are displaced and squeezed from. The phase
//! space coordinates, the deformed ladders and the kappa-map bosons are all
//! assembled from these two ladders as matrices; every identity is then
//! something to measure rather than assume.
//!
//! Hard truncation corrupts the top few occupation levels, so identity checks
//! are restricted to the safe subspace of total occupation
//! `<= cutoff - buffer` and states must keep their norm out of the rest.

mod expm;
mod matrix;
mod operators;
mod state;

use serde::Serialize;

use crate::error::{NcError, Result};

pub use expm::{matrix_exp, matrix_exp_dense, split_kronecker_sum, DEFAULT_EXPM_TOLERANCE};
pub use matrix::{kron_csr, Csr, OperatorMatrix, Storage};
pub use operators::{
    deformed_ops, displacement_op, kappa_map_ops, operator_set, ordinary_mode_ops, phase_space_ops,
    squeeze_op, OperatorSet, DEFAULT_SQUEEZE_GUARD, LAMBDA_GUARD,
};
pub use state::{
    build_state, expectation, expectation_and_variance, inner_product, make_state, make_state_adaptive,
    safe_norm_fraction, StateVector, LEAKAGE_LIMIT,
};

/// Largest supported per-mode occupation.
pub const MAX_CUTOFF: usize = 200;

/// Default per-mode occupation cutoff.
pub const DEFAULT_CUTOFF: usize = 40;

/// Levels below the cutoff excluded from the safe subspace.
pub const SAFE_BUFFER: usize = 5;

/// Two-mode space with occupations `0..=cutoff` per mode, ordered row-major
/// over `(n_a, n_b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FockSpace {
    cutoff: usize,
}

pub fn make_space(cutoff: usize) -> Result<FockSpace> {
    FockSpace::new(cutoff)
}

impl FockSpace {
    pub fn new(cutoff: usize) -> Result<Self> {
        if !(1..=MAX_CUTOFF).contains(&cutoff) {
            return Err(NcError::CutoffOutOfRange(cutoff));
        }
        Ok(Self { cutoff })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Levels per mode, `cutoff + 1`.
    pub fn modes(&self) -> usize {
        self.cutoff + 1
    }

    pub fn dim(&self) -> usize {
        self.modes() * self.modes()
    }

    pub fn index(&self, n_a: usize, n_b: usize) -> usize {
        n_a * self.modes() + n_b
    }

    pub fn occupation(&self, index: usize) -> (usize, usize) {
        (index / self.modes(), index % self.modes())
    }

    /// Basis states with total occupation `<= cutoff - buffer`.
    pub fn safe_mask(&self, buffer: usize) -> Vec<bool> {
        let limit = self.cutoff.saturating_sub(buffer);
        (0..self.dim())
            .map(|i| {
                let (a, b) = self.occupation(i);
                a + b <= limit && buffer <= self.cutoff
            })
            .collect()
    }
}
