//! Noncommutative parameter set.
//!
//! `NcParams` carries the position and momentum noncommutativities `mu`, `nu`
//! together with `hbar`, and the derived dimensionless strength
//! `theta = sqrt(mu * nu) / hbar`. Every other module reads its constants
//! from here.

use serde::Serialize;

use crate::error::{NcError, Result};

/// Relative tolerance on `mu*nu/hbar^2 - 1` inside which a parameter set is
/// treated as sitting exactly on the constraint surface.
pub const SATURATION_TOLERANCE: f64 = 1e-12;

/// Position of a parameter set relative to the constraint `mu*nu <= hbar^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ConstraintClass {
    SubCritical,
    Saturated,
    SuperCritical,
}

/// Validated noncommutative parameters with their derived constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NcParams {
    mu: f64,
    nu: f64,
    hbar: f64,
    theta: f64,
    #[serde(skip)]
    kappa: Option<f64>,
    #[serde(skip)]
    lambda_denom: Option<f64>,
}

/// Builds a parameter set, rejecting non-finite and non-positive inputs.
pub fn make_params(mu: f64, nu: f64, hbar: f64) -> Result<NcParams> {
    for (name, value) in [("mu", mu), ("nu", nu), ("hbar", hbar)] {
        if !value.is_finite() {
            return Err(NcError::NonFinite { name, value });
        }
        if value <= 0.0 {
            return Err(NcError::NonPositiveParameter { name, value });
        }
    }
    let ratio = mu * nu / (hbar * hbar);
    let theta = (mu * nu).sqrt() / hbar;
    let (kappa, lambda_denom) = if class_of_ratio(ratio) == ConstraintClass::SuperCritical {
        (None, None)
    } else {
        // Inside the saturation band the ratio can exceed 1 by rounding.
        let kappa = 0.5 * (1.0 + (1.0 - ratio).max(0.0).sqrt());
        (Some(kappa), Some(kappa - ratio / (4.0 * kappa)))
    };
    Ok(NcParams {
        mu,
        nu,
        hbar,
        theta,
        kappa,
        lambda_denom,
    })
}

/// Classifies a parameter set; depends on `mu*nu/hbar^2` only.
pub fn classify_constraint(params: &NcParams) -> ConstraintClass {
    class_of_ratio(params.constraint_ratio())
}

fn class_of_ratio(ratio: f64) -> ConstraintClass {
    if (ratio - 1.0).abs() <= SATURATION_TOLERANCE {
        ConstraintClass::Saturated
    } else if ratio < 1.0 {
        ConstraintClass::SubCritical
    } else {
        ConstraintClass::SuperCritical
    }
}

impl NcParams {
    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// `sqrt(mu*nu)/hbar`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `(1 + sqrt(1 - mu*nu/hbar^2))/2`; absent for super-critical sets.
    pub fn kappa(&self) -> Option<f64> {
        self.kappa
    }

    /// `kappa - mu*nu/(4 kappa hbar^2)`, the normalization of the kappa map.
    /// Algebraically equal to `sqrt(1 - theta^2)`; zero at saturation.
    pub fn lambda_denom(&self) -> Option<f64> {
        self.lambda_denom
    }

    /// `mu*nu/hbar^2`.
    pub fn constraint_ratio(&self) -> f64 {
        self.mu * self.nu / (self.hbar * self.hbar)
    }

    /// `sqrt(mu/nu)`, the length/momentum aspect that multiplies every
    /// position variance.
    pub fn aspect(&self) -> f64 {
        (self.mu / self.nu).sqrt()
    }

    pub fn class(&self) -> ConstraintClass {
        classify_constraint(self)
    }

    pub fn deformation(&self) -> Deformation {
        Deformation {
            hbar: self.hbar,
            aspect: self.aspect(),
            theta: self.theta,
        }
    }
}

/// Scale-free view of a parameter set used by the closed-form expressions.
///
/// Unlike [`NcParams`] it admits `theta = 0`, the commutative limit, which is
/// useful for scans that pass through it. `mu = theta*hbar*aspect` and
/// `nu = theta*hbar/aspect`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Deformation {
    pub hbar: f64,
    pub aspect: f64,
    pub theta: f64,
}

impl Deformation {
    pub fn new(hbar: f64, aspect: f64, theta: f64) -> Result<Self> {
        for (name, value) in [("hbar", hbar), ("aspect", aspect), ("theta", theta)] {
            if !value.is_finite() {
                return Err(NcError::NonFinite { name, value });
            }
        }
        if hbar <= 0.0 {
            return Err(NcError::NonPositiveParameter { name: "hbar", value: hbar });
        }
        if aspect <= 0.0 {
            return Err(NcError::NonPositiveParameter { name: "aspect", value: aspect });
        }
        if theta < 0.0 {
            return Err(NcError::NonPositiveParameter { name: "theta", value: theta });
        }
        Ok(Self { hbar, aspect, theta })
    }

    pub fn mu(&self) -> f64 {
        self.theta * self.hbar * self.aspect
    }

    pub fn nu(&self) -> f64 {
        self.theta * self.hbar / self.aspect
    }
}

impl From<&NcParams> for Deformation {
    fn from(p: &NcParams) -> Self {
        p.deformation()
    }
}

impl From<NcParams> for Deformation {
    fn from(p: NcParams) -> Self {
        p.deformation()
    }
}
