//! Deformed two-mode coherent and squeezed states in noncommutative phase space.
//!
//! * [`params`]: the parameter set `(mu, nu, hbar)` and its derived constants.
//! * [`analytic`]: closed-form overlaps, Bogoliubov coefficients, variances
//!   and uncertainty products.
//! * [`fock`]: a truncated Fock-space realization of the deformed algebra,
//!   used as an independent numerical oracle.
//! * [`verifier`]: checks that set the closed forms against the oracle and
//!   against Monte Carlo integration.

pub mod analytic;
pub mod error;
pub mod fock;
pub mod params;
pub mod verifier;

pub use analytic::{ModeAmplitudes, SqueezeParam};
pub use error::{NcError, Result};
pub use params::{classify_constraint, make_params, ConstraintClass, Deformation, NcParams};
