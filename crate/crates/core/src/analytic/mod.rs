//! Closed-form results for the deformed two-mode coherent and squeezed states.
//!
//! Everything here is a pure function of a [`Deformation`] (usually obtained
//! from [`NcParams`]) plus state labels. Super-critical parameter sets are
//! accepted: the expressions stay finite, and showing where they break the
//! uncertainty bounds is part of what callers want to see.

mod overlap;
mod variance;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{NcError, Result};
use crate::params::{Deformation, NcParams};

pub use overlap::{coherent_overlap, squeezed_overlap};
pub use variance::{
    heisenberg_report, single_mode_report, two_mode_report, variance_gains, variance_products,
    BoundCheck, HeisenbergReport, ProductMinima, Saturation, TwoModeReport, VarianceReport,
    HEISENBERG_SATURATION_TOLERANCE,
};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Displacement amplitudes `(alpha, beta)` of the two modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeAmplitudes {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl ModeAmplitudes {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta)] {
            if !v.is_finite() {
                return Err(NcError::NonFinite { name, value: v.norm() });
            }
        }
        Ok(Self { alpha, beta })
    }

    pub fn vacuum() -> Self {
        Self {
            alpha: Complex64::new(0.0, 0.0),
            beta: Complex64::new(0.0, 0.0),
        }
    }

    pub fn is_vacuum(&self) -> bool {
        self.alpha == Complex64::new(0.0, 0.0) && self.beta == Complex64::new(0.0, 0.0)
    }
}

/// Squeeze parameter `z = r e^{i phi}` with `r >= 0` and `phi` in `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqueezeParam {
    r: f64,
    phi: f64,
}

impl SqueezeParam {
    pub fn new(r: f64, phi: f64) -> Result<Self> {
        if !r.is_finite() || r < 0.0 {
            return Err(NcError::InvalidSqueeze(r));
        }
        if !phi.is_finite() {
            return Err(NcError::NonFinite { name: "phi", value: phi });
        }
        Ok(Self {
            r,
            phi: canonical_angle(phi),
        })
    }

    pub fn zero() -> Self {
        Self { r: 0.0, phi: 0.0 }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn is_zero(&self) -> bool {
        self.r == 0.0
    }

    /// `z` as a complex number.
    pub fn z(&self) -> Complex64 {
        Complex64::from_polar(self.r, self.phi)
    }

    /// The squeeze with `z -> -z`.
    pub fn negated(&self) -> Self {
        Self {
            r: self.r,
            phi: canonical_angle(self.phi + PI),
        }
    }
}

/// Maps an angle into `(-pi, pi]`, leaving in-range values untouched.
pub fn canonical_angle(phi: f64) -> f64 {
    if phi > -PI && phi <= PI {
        return phi;
    }
    let t = phi.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

/// Eigenvalues of the deformed annihilators on `|alpha, beta>`; the squeezed
/// state `|alpha, beta; z>` carries the same pair for the squeezed operators.
pub fn coherent_eigenvalues(params: impl Into<Deformation>, amps: &ModeAmplitudes) -> (Complex64, Complex64) {
    let theta = params.into().theta;
    (
        amps.alpha + I * theta * amps.beta,
        amps.beta - I * theta * amps.alpha,
    )
}

/// Coefficients of one conjugated annihilator expanded on
/// `(a, b, a^dagger, b^dagger)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeMap {
    pub on_a: Complex64,
    pub on_b: Complex64,
    pub on_a_dag: Complex64,
    pub on_b_dag: Complex64,
}

impl ModeMap {
    pub fn as_array(&self) -> [Complex64; 4] {
        [self.on_a, self.on_b, self.on_a_dag, self.on_b_dag]
    }

    pub fn from_array(c: [Complex64; 4]) -> Self {
        Self {
            on_a: c[0],
            on_b: c[1],
            on_a_dag: c[2],
            on_b_dag: c[3],
        }
    }
}

/// `S a S^dagger` and `S b S^dagger` for the deformed squeeze operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BogoliubovCoeffs {
    pub a: ModeMap,
    pub b: ModeMap,
}

impl BogoliubovCoeffs {
    /// Largest coefficient-wise distance to another set.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.a
            .as_array()
            .iter()
            .chain(self.b.as_array().iter())
            .zip(other.a.as_array().iter().chain(other.b.as_array().iter()))
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }
}

/// Generalized Bogoliubov transformation induced by the deformed squeeze.
///
/// With `C = cosh r cosh r theta`, `X = sinh r sinh r theta`,
/// `Y = sinh r cosh r theta`, `Z = cosh r sinh r theta`:
///
/// ```text
/// S a S+ = C a + i X b + e^{i phi} Y b+ + i e^{i phi} Z a+
/// S b S+ = C b - i X a + e^{i phi} Y a+ - i e^{i phi} Z b+
/// ```
pub fn bogoliubov_coefficients(params: impl Into<Deformation>, z: &SqueezeParam) -> BogoliubovCoeffs {
    let theta = params.into().theta;
    let (r, rt) = (z.r(), z.r() * theta);
    let c = r.cosh() * rt.cosh();
    let x = r.sinh() * rt.sinh();
    let y = r.sinh() * rt.cosh();
    let zz = r.cosh() * rt.sinh();
    let phase = Complex64::from_polar(1.0, z.phi());
    let zero = Complex64::new(0.0, 0.0);
    BogoliubovCoeffs {
        a: ModeMap {
            on_a: c.into(),
            on_b: I * x,
            on_a_dag: if zz == 0.0 { zero } else { I * phase * zz },
            on_b_dag: phase * y,
        },
        b: ModeMap {
            on_a: -I * x,
            on_b: c.into(),
            on_a_dag: phase * y,
            on_b_dag: if zz == 0.0 { zero } else { -I * phase * zz },
        },
    }
}

/// Mass and angular frequency of an isotropic 2D oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillatorParams {
    m: f64,
    omega: f64,
}

impl OscillatorParams {
    pub fn new(m: f64, omega: f64) -> Result<Self> {
        for (name, value) in [("m", m), ("omega", omega)] {
            if !value.is_finite() {
                return Err(NcError::NonFinite { name, value });
            }
            if value <= 0.0 {
                return Err(NcError::NonPositiveParameter { name, value });
            }
        }
        Ok(Self { m, omega })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillatorCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub consistent: bool,
}

/// Relative tolerance of the oscillator consistency test.
pub const OSCILLATOR_TOLERANCE: f64 = 1e-12;

/// Tests `m^2 omega^2 = mu/nu`, the condition under which the deformed ladder
/// operators keep their commutative-space relation to the oscillator
/// coordinates.
pub fn oscillator_consistency(osc: &OscillatorParams, params: &NcParams) -> OscillatorCheck {
    let lhs = (osc.m * osc.omega).powi(2);
    let rhs = params.mu() / params.nu();
    let rel = (lhs - rhs).abs() / lhs.abs().max(rhs.abs());
    OscillatorCheck {
        lhs,
        rhs,
        consistent: rel < OSCILLATOR_TOLERANCE,
    }
}
