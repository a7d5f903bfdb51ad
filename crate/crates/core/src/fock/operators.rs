use num_complex::Complex64;

use super::expm::{matrix_exp, DEFAULT_EXPM_TOLERANCE};
use super::matrix::{kron_csr, Csr, OperatorMatrix};
use super::state::{safe_norm_fraction, StateVector, LEAKAGE_LIMIT};
use super::{FockSpace, SAFE_BUFFER};
use crate::analytic::{ModeAmplitudes, SqueezeParam};
use crate::error::{NcError, Result};
use crate::params::{ConstraintClass, NcParams};

type C = Complex64;

const I: C = C::new(0.0, 1.0);

/// Smallest accepted `lambda_denom`; below it the kappa map is numerically
/// singular.
pub const LAMBDA_GUARD: f64 = 1e-8;

/// Squeeze magnitude accepted without a population check.
pub const DEFAULT_SQUEEZE_GUARD: f64 = 0.7;

fn require_sub_critical(params: &NcParams) -> Result<f64> {
    match (params.class(), params.lambda_denom()) {
        (ConstraintClass::SubCritical, Some(l)) if l > LAMBDA_GUARD => Ok(l),
        _ => Err(NcError::SaturatedOrSuperCritical {
            ratio: params.constraint_ratio(),
        }),
    }
}

/// Single-mode annihilator on `levels` levels.
fn ladder(levels: usize) -> Csr {
    Csr::from_triplets(
        levels,
        (1..levels).map(|k| (k - 1, k, C::new((k as f64).sqrt(), 0.0))).collect(),
    )
}

/// Basis ladders: `a_ord |n_a, n_b> = sqrt(n_a) |n_a - 1, n_b>` and likewise
/// for `b_ord` on the second index.
pub fn ordinary_mode_ops(space: FockSpace) -> (OperatorMatrix, OperatorMatrix) {
    let n = space.modes();
    let (l, id) = (ladder(n), Csr::identity(n));
    (
        OperatorMatrix::sparse(space, kron_csr(&l, &id)),
        OperatorMatrix::sparse(space, kron_csr(&id, &l)),
    )
}

fn lc(space: FockSpace, terms: &[(C, &OperatorMatrix)]) -> OperatorMatrix {
    OperatorMatrix::linear_combination(space, terms).expect("operands share one space")
}

/// `(x, y, p_x, p_y)` realized on the normal-mode basis.
pub fn phase_space_ops(
    params: &NcParams,
    space: FockSpace,
) -> Result<(OperatorMatrix, OperatorMatrix, OperatorMatrix, OperatorMatrix)> {
    require_sub_critical(params)?;
    let theta = params.theta();
    let (p, q) = (((1.0 + theta) / 2.0).sqrt(), ((1.0 - theta) / 2.0).sqrt());
    let (cp, cm) = ordinary_mode_ops(space);
    // Deformed ladders in terms of the normal modes.
    let a0 = lc(space, &[(p.into(), &cp), (q.into(), &cm)]);
    let b0 = lc(space, &[(-I * p, &cp), (I * q, &cm)]);
    let quarter = (params.mu() / params.nu()).powf(0.25);
    let sx = (params.hbar() / 2.0).sqrt() * quarter;
    let sp = (params.hbar() / 2.0).sqrt() / quarter;
    let position = |m: &OperatorMatrix| lc(space, &[(sx.into(), m), (sx.into(), &m.adjoint())]);
    let momentum = |m: &OperatorMatrix| lc(space, &[(-I * sp, m), (I * sp, &m.adjoint())]);
    Ok((position(&a0), position(&b0), momentum(&a0), momentum(&b0)))
}

/// `a = (k x + i p_x / k)/sqrt(2 hbar)` and `b` likewise, `k = (nu/mu)^(1/4)`.
pub fn deformed_ops(params: &NcParams, space: FockSpace) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let (x, y, px, py) = phase_space_ops(params, space)?;
    Ok(deformed_from(params, space, &x, &y, &px, &py))
}

fn deformed_from(
    params: &NcParams,
    space: FockSpace,
    x: &OperatorMatrix,
    y: &OperatorMatrix,
    px: &OperatorMatrix,
    py: &OperatorMatrix,
) -> (OperatorMatrix, OperatorMatrix) {
    let k = (params.nu() / params.mu()).powf(0.25);
    let norm = 1.0 / (2.0 * params.hbar()).sqrt();
    let pos = C::new(norm * k, 0.0);
    let mom = I * (norm / k);
    (lc(space, &[(pos, x), (mom, px)]), lc(space, &[(pos, y), (mom, py)]))
}

/// The kappa-map bosons, which obey ordinary commutators despite being built
/// from noncommuting coordinates.
pub fn kappa_map_ops(params: &NcParams, space: FockSpace) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let (x, y, px, py) = phase_space_ops(params, space)?;
    Ok(kappa_from(params, space, &x, &y, &px, &py))
}

fn kappa_from(
    params: &NcParams,
    space: FockSpace,
    x: &OperatorMatrix,
    y: &OperatorMatrix,
    px: &OperatorMatrix,
    py: &OperatorMatrix,
) -> (OperatorMatrix, OperatorMatrix) {
    let kappa = params.kappa().expect("sub-critical parameters carry kappa");
    let lambda = params.lambda_denom().expect("sub-critical parameters carry lambda");
    let hbar = params.hbar();
    let pre = 1.0 / ((2.0 * hbar).sqrt() * lambda);
    let cross_mu = pre * params.mu() / (2.0 * hbar);
    let cross_nu = pre * params.nu() / (2.0 * kappa * hbar);
    let a = lc(
        space,
        &[
            ((pre * kappa).into(), x),
            (cross_mu.into(), py),
            (-I * cross_nu, y),
            (I * pre, px),
        ],
    );
    let b = lc(
        space,
        &[
            ((pre * kappa).into(), y),
            ((-cross_mu).into(), px),
            (I * cross_nu, x),
            (I * pre, py),
        ],
    );
    (a, b)
}

/// Every operator the checks need, built once per `(params, space)`.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub params: NcParams,
    pub space: FockSpace,
    pub x: OperatorMatrix,
    pub y: OperatorMatrix,
    pub px: OperatorMatrix,
    pub py: OperatorMatrix,
    pub a_def: OperatorMatrix,
    pub b_def: OperatorMatrix,
    /// Kappa-map bosons.
    pub a_ord: OperatorMatrix,
    pub b_ord: OperatorMatrix,
}

pub fn operator_set(params: &NcParams, space: FockSpace) -> Result<OperatorSet> {
    let (x, y, px, py) = phase_space_ops(params, space)?;
    let (a_def, b_def) = deformed_from(params, space, &x, &y, &px, &py);
    let (a_ord, b_ord) = kappa_from(params, space, &x, &y, &px, &py);
    Ok(OperatorSet {
        params: *params,
        space,
        x,
        y,
        px,
        py,
        a_def,
        b_def,
        a_ord,
        b_ord,
    })
}

impl OperatorSet {
    /// `X = (x + y)/2`, `P = (p_x + p_y)/2`.
    pub fn two_mode_quadratures(&self) -> (OperatorMatrix, OperatorMatrix) {
        let h = C::new(0.5, 0.0);
        (
            lc(self.space, &[(h, &self.x), (h, &self.y)]),
            lc(self.space, &[(h, &self.px), (h, &self.py)]),
        )
    }

    /// `(a, b, a^dagger, b^dagger)` for the deformed ladders.
    pub fn ladder_basis(&self) -> [OperatorMatrix; 4] {
        [
            self.a_def.clone(),
            self.b_def.clone(),
            self.a_def.adjoint(),
            self.b_def.adjoint(),
        ]
    }

    /// `alpha a^dagger + beta b^dagger - alpha^* a - beta^* b`.
    pub fn displacement_generator(&self, amps: &ModeAmplitudes) -> OperatorMatrix {
        let (ad, bd) = (self.a_def.adjoint(), self.b_def.adjoint());
        lc(
            self.space,
            &[
                (amps.alpha, &ad),
                (amps.beta, &bd),
                (-amps.alpha.conj(), &self.a_def),
                (-amps.beta.conj(), &self.b_def),
            ],
        )
    }

    pub fn displacement(&self, amps: &ModeAmplitudes) -> Result<OperatorMatrix> {
        if amps.is_vacuum() {
            return Ok(OperatorMatrix::identity(self.space));
        }
        matrix_exp(&self.displacement_generator(amps), DEFAULT_EXPM_TOLERANCE)
    }

    /// `z^* a b - z a^dagger b^dagger`.
    pub fn squeeze_generator(&self, z: &SqueezeParam) -> OperatorMatrix {
        let ab = self.a_def.matmul(&self.b_def).expect("same space");
        let zz = z.z();
        lc(self.space, &[(zz.conj(), &ab), (-zz, &ab.adjoint())])
    }

    /// Squeeze operator without any truncation guard.
    pub fn squeeze(&self, z: &SqueezeParam) -> Result<OperatorMatrix> {
        if z.is_zero() {
            return Ok(OperatorMatrix::identity(self.space));
        }
        matrix_exp(&self.squeeze_generator(z), DEFAULT_EXPM_TOLERANCE)
    }

    /// Squeeze operator; beyond [`DEFAULT_SQUEEZE_GUARD`] the squeezed vacuum
    /// must keep its norm inside the safe subspace.
    pub fn squeeze_guarded(&self, z: &SqueezeParam) -> Result<OperatorMatrix> {
        let s = self.squeeze(z)?;
        if z.r() > DEFAULT_SQUEEZE_GUARD {
            let vacuum = StateVector::vacuum(self.space);
            let squeezed = StateVector::from_parts(self.space, s.apply(vacuum.data()));
            if safe_norm_fraction(&squeezed, SAFE_BUFFER)? >= LEAKAGE_LIMIT {
                return Err(NcError::SqueezeTooLargeForCutoff {
                    r: z.r(),
                    limit: DEFAULT_SQUEEZE_GUARD,
                    cutoff: self.space.cutoff(),
                });
            }
        }
        Ok(s)
    }
}

/// `D(alpha, beta) = exp(alpha a^dagger + beta b^dagger - h.c.)`.
pub fn displacement_op(params: &NcParams, space: FockSpace, amps: &ModeAmplitudes) -> Result<OperatorMatrix> {
    operator_set(params, space)?.displacement(amps)
}

/// `S(z) = exp(z^* a b - z a^dagger b^dagger)`.
pub fn squeeze_op(params: &NcParams, space: FockSpace, z: &SqueezeParam) -> Result<OperatorMatrix> {
    operator_set(params, space)?.squeeze_guarded(z)
}
