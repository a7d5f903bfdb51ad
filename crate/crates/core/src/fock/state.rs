use num_complex::Complex64;

use super::matrix::OperatorMatrix;
use super::operators::{operator_set, OperatorSet};
use super::{FockSpace, MAX_CUTOFF, SAFE_BUFFER};
use crate::analytic::{ModeAmplitudes, SqueezeParam};
use crate::error::{NcError, Result};
use crate::params::NcParams;

type C = Complex64;

/// Largest norm fraction a state may keep outside the safe subspace.
pub const LEAKAGE_LIMIT: f64 = 1e-10;

/// Hermiticity residual above which a variance request is refused.
const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// Amplitudes over the basis of a [`FockSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: FockSpace,
    data: Vec<C>,
}

impl StateVector {
    pub fn vacuum(space: FockSpace) -> Self {
        let mut data = vec![C::new(0.0, 0.0); space.dim()];
        data[0] = C::new(1.0, 0.0);
        Self { space, data }
    }

    pub(crate) fn from_parts(space: FockSpace, data: Vec<C>) -> Self {
        debug_assert_eq!(data.len(), space.dim());
        Self { space, data }
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn data(&self) -> &[C] {
        &self.data
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `op |self>` as a raw vector.
    pub fn apply(&self, op: &OperatorMatrix) -> Result<Vec<C>> {
        if op.space() != self.space {
            return Err(NcError::SpaceMismatch {
                left: op.space().cutoff(),
                right: self.space.cutoff(),
            });
        }
        Ok(op.apply(&self.data))
    }
}

/// `S(z) D(alpha, beta) |0>` with no truncation guard.
pub fn build_state(ops: &OperatorSet, amps: &ModeAmplitudes, z: Option<&SqueezeParam>) -> Result<StateVector> {
    let mut v = StateVector::vacuum(ops.space).data;
    if !amps.is_vacuum() {
        v = ops.displacement(amps)?.apply(&v);
    }
    if let Some(z) = z.filter(|z| !z.is_zero()) {
        v = ops.squeeze(z)?.apply(&v);
    }
    Ok(StateVector::from_parts(ops.space, v))
}

impl OperatorSet {
    /// [`build_state`] followed by the population guard.
    pub fn state(&self, amps: &ModeAmplitudes, z: Option<&SqueezeParam>) -> Result<StateVector> {
        let state = build_state(self, amps, z)?;
        let leakage = safe_norm_fraction(&state, SAFE_BUFFER)?;
        if leakage.is_nan() || leakage >= LEAKAGE_LIMIT {
            return Err(NcError::PopulationOverflow {
                leakage,
                threshold: self.space.cutoff().saturating_sub(SAFE_BUFFER),
                cutoff: self.space.cutoff(),
            });
        }
        Ok(state)
    }
}

/// The coherent state `|alpha, beta>`, or `|alpha, beta; z>` when `z` is given.
pub fn make_state(
    params: &NcParams,
    space: FockSpace,
    amps: &ModeAmplitudes,
    z: Option<&SqueezeParam>,
) -> Result<StateVector> {
    operator_set(params, space)?.state(amps, z)
}

/// Raises the cutoff from `start` in steps of 10 until the state passes the
/// population guard, giving up after `max_cutoff`.
pub fn make_state_adaptive(
    params: &NcParams,
    amps: &ModeAmplitudes,
    z: Option<&SqueezeParam>,
    start: usize,
    max_cutoff: usize,
) -> Result<(OperatorSet, StateVector)> {
    let max_cutoff = max_cutoff.min(MAX_CUTOFF);
    let mut cutoff = start;
    loop {
        let ops = operator_set(params, FockSpace::new(cutoff)?)?;
        match ops.state(amps, z) {
            Ok(state) => return Ok((ops, state)),
            Err(NcError::PopulationOverflow { .. }) if cutoff + 10 <= max_cutoff => cutoff += 10,
            Err(e) => return Err(e),
        }
    }
}

/// Norm fraction on basis states with total occupation `> cutoff - buffer`.
pub fn safe_norm_fraction(state: &StateVector, buffer: usize) -> Result<f64> {
    let space = state.space;
    if buffer > space.cutoff() {
        return Err(NcError::BufferTooLarge {
            buffer,
            cutoff: space.cutoff(),
        });
    }
    let limit = space.cutoff() - buffer;
    let outside: f64 = state
        .data
        .iter()
        .enumerate()
        .filter(|(i, _)| {
            let (a, b) = space.occupation(*i);
            a + b > limit
        })
        .map(|(_, v)| v.norm_sqr())
        .sum();
    Ok(outside / state.norm().powi(2))
}

/// `<bra|ket>`.
pub fn inner_product(bra: &StateVector, ket: &StateVector) -> Result<C> {
    if bra.space != ket.space {
        return Err(NcError::SpaceMismatch {
            left: bra.space.cutoff(),
            right: ket.space.cutoff(),
        });
    }
    Ok(bra.data.iter().zip(&ket.data).map(|(b, k)| b.conj() * k).sum())
}

/// `<psi|op|psi>`.
pub fn expectation(state: &StateVector, op: &OperatorMatrix) -> Result<C> {
    let image = state.apply(op)?;
    Ok(state.data.iter().zip(&image).map(|(b, k)| b.conj() * k).sum())
}

/// Mean and variance of a Hermitian operator. The variance is evaluated as
/// `||(op - mean) psi||^2`, which equals `<op^2> - mean^2` and cannot go
/// negative.
pub fn expectation_and_variance(state: &StateVector, op: &OperatorMatrix) -> Result<(C, f64)> {
    let image = state.apply(op)?;
    let residual = op.hermiticity_residual();
    if residual > HERMITIAN_TOLERANCE {
        return Err(NcError::NonHermitianOperator(residual));
    }
    let mean: C = state.data.iter().zip(&image).map(|(b, k)| b.conj() * k).sum();
    let variance = image
        .iter()
        .zip(&state.data)
        .map(|(w, v)| (w - mean.re * v).norm_sqr())
        .sum();
    Ok((mean, variance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{coherent_overlap, single_mode_report};
    use crate::params::make_params;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn amps(a: C, b: C) -> ModeAmplitudes {
        ModeAmplitudes::new(a, b).unwrap()
    }

    fn dist(u: &[C], v: &[C]) -> f64 {
        u.iter().zip(v).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn vacuum_is_first_basis_vector() {
        let p = make_params(0.5, 0.5, 1.0).unwrap();
        let space = FockSpace::new(6).unwrap();
        let s = make_state(&p, space, &ModeAmplitudes::vacuum(), None).unwrap();
        assert_eq!(s, StateVector::vacuum(space));
        assert_eq!(safe_norm_fraction(&s, 3).unwrap(), 0.0);
    }

    #[test]
    fn vacuum_position_variance() {
        let p = make_params(0.4, 0.4, 1.0).unwrap();
        let ops = operator_set(&p, FockSpace::new(10).unwrap()).unwrap();
        let s = StateVector::vacuum(ops.space);
        let (mean, var) = expectation_and_variance(&s, &ops.x).unwrap();
        assert!(mean.norm() < 1e-16);
        assert!((var - 0.5).abs() < 1e-14);
    }

    #[test]
    fn coherent_eigen_relation() {
        let p = make_params(0.5, 0.5, 1.0).unwrap();
        let ops = operator_set(&p, FockSpace::new(40).unwrap()).unwrap();
        let k = amps(c(1.0, 0.0), c(0.0, 0.5));
        let s = ops.state(&k, None).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-10);
        let lambda = k.alpha + c(0.0, 0.5) * k.beta;
        let av = s.apply(&ops.a_def).unwrap();
        let target: Vec<C> = s.data().iter().map(|v| lambda * v).collect();
        assert!(dist(&av, &target) < 1e-8);
    }

    #[test]
    fn coherent_expectations() {
        let p = make_params(0.5, 0.5, 1.0).unwrap();
        let ops = operator_set(&p, FockSpace::new(40).unwrap()).unwrap();
        let k = amps(c(1.0, 0.0), c(0.0, 1.0));
        let s = ops.state(&k, None).unwrap();
        let mean = expectation(&s, &ops.a_def).unwrap();
        assert!((mean - c(0.5, 0.0)).norm() < 1e-10);
        let (_, var) = expectation_and_variance(&s, &ops.x).unwrap();
        assert!((var - 0.5).abs() < 1e-8);
        // Overlap with the vacuum against the closed form.
        let vac = StateVector::vacuum(ops.space);
        let o = inner_product(&vac, &make_state(&p, ops.space, &amps(c(1.0, 0.0), c(1.0, 0.0)), None).unwrap()).unwrap();
        let expect = coherent_overlap(p, &ModeAmplitudes::vacuum(), &amps(c(1.0, 0.0), c(1.0, 0.0)));
        assert!((o - expect).norm() / expect.norm() < 1e-8);
    }

    #[test]
    fn squeezed_vacuum_amplitude() {
        let p = make_params(0.5, 0.5, 1.0).unwrap();
        let ops = operator_set(&p, FockSpace::new(40).unwrap()).unwrap();
        let z = SqueezeParam::new(0.3, PI / 4.0).unwrap();
        let s = ops.state(&ModeAmplitudes::vacuum(), Some(&z)).unwrap();
        let expect = 1.0 / ((0.45f64).cosh() * (0.15f64).cosh()).sqrt();
        assert!((s.data()[0] - expect).norm() / expect < 1e-8);
    }

    #[test]
    fn squeezed_variance_matches_closed_form() {
        let p = make_params(0.5, 0.5, 1.0).unwrap();
        let ops = operator_set(&p, FockSpace::new(40).unwrap()).unwrap();
        let z = SqueezeParam::new(0.3, FRAC_PI_2).unwrap();
        let s = ops.state(&amps(c(0.2, 0.1), c(-0.3, 0.0)), Some(&z)).unwrap();
        let report = single_mode_report(p, Some(&z));
        let (_, vx) = expectation_and_variance(&s, &ops.x).unwrap();
        let (_, vpx) = expectation_and_variance(&s, &ops.px).unwrap();
        assert!((vx - report.dx2).abs() / report.dx2 < 1e-8);
        assert!((vpx - report.dpx2).abs() / report.dpx2 < 1e-8);
    }

    #[test]
    fn leakage_examples() {
        let p = make_params(0.5, 0.5, 1.0).unwrap();
        let s = make_state(&p, FockSpace::new(40).unwrap(), &amps(c(1.0, 0.0), c(0.0, 0.0)), None).unwrap();
        assert!(safe_norm_fraction(&s, 5).unwrap() < 1e-20);
        let ops = operator_set(&p, FockSpace::new(10).unwrap()).unwrap();
        let big = amps(c(6.0, 0.0), c(0.0, 0.0));
        let raw = build_state(&ops, &big, None).unwrap();
        assert!(safe_norm_fraction(&raw, 2).unwrap() > 0.1);
        assert!(matches!(ops.state(&big, None), Err(NcError::PopulationOverflow { cutoff: 10, .. })));
        assert!(matches!(
            safe_norm_fraction(&raw, 11),
            Err(NcError::BufferTooLarge { buffer: 11, cutoff: 10 })
        ));
    }

    #[test]
    fn adaptive_cutoff_grows() {
        let p = make_params(0.8, 0.8, 1.0).unwrap();
        let z = SqueezeParam::new(0.4, 0.0).unwrap();
        let (ops, s) = make_state_adaptive(&p, &amps(c(1.0, 0.0), c(0.0, 1.0)), Some(&z), 20, 120).unwrap();
        assert!(ops.space.cutoff() > 20);
        assert!(safe_norm_fraction(&s, SAFE_BUFFER).unwrap() < LEAKAGE_LIMIT);
    }

    #[test]
    fn variance_rejects_non_hermitian() {
        let p = make_params(0.5, 0.5, 1.0).unwrap();
        let ops = operator_set(&p, FockSpace::new(5).unwrap()).unwrap();
        let s = StateVector::vacuum(ops.space);
        assert!(matches!(
            expectation_and_variance(&s, &ops.a_def),
            Err(NcError::NonHermitianOperator(_))
        ));
        let other = StateVector::vacuum(FockSpace::new(6).unwrap());
        assert!(matches!(expectation(&other, &ops.x), Err(NcError::SpaceMismatch { .. })));
    }
}
