use ndarray::Array2;
use num_complex::Complex64;

use super::{CheckMeta, ResidualReport, IDENTITY_TOLERANCE};
use crate::analytic::{bogoliubov_coefficients, coherent_eigenvalues, BogoliubovCoeffs, ModeAmplitudes, ModeMap, SqueezeParam};
use crate::error::{NcError, Result};
use crate::fock::{build_state, matrix_exp_dense, operator_set, Csr, FockSpace, OperatorMatrix, OperatorSet, SAFE_BUFFER};
use crate::params::NcParams;

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

/// Columns whose displaced image keeps more than this much norm outside the
/// safe subspace are skipped by the displacement check.
const PROBE_LEAKAGE: f64 = 1e-24;

/// Hermiticity and unitarity are held to tighter bounds than the identities.
const HERMITIAN_TOLERANCE: f64 = 1e-12;
const UNITARY_TOLERANCE: f64 = 1e-10;

/// Bogoliubov coefficients read off the Fock realization.
#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovFit {
    pub coeffs: BogoliubovCoeffs,
    /// How far `[G, L_j]` is from the span of the ladder basis on the safe
    /// block, for the squeeze generator `G`.
    pub closure_residual: f64,
}

fn masked_inner(u: &Csr, v: &Csr, mask: &[bool]) -> C {
    u.triplets()
        .filter(|&(r, c, _)| mask[r] && mask[c])
        .map(|(r, c, x)| x.conj() * v.get(r, c))
        .sum()
}

/// Gaussian elimination with partial pivoting on a 4x4 system.
fn solve4(mut a: [[C; 4]; 4], mut b: [C; 4]) -> [C; 4] {
    for k in 0..4 {
        let p = (k..4)
            .max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm()))
            .expect("non-empty range");
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..4 {
            let f = a[i][k] / a[k][k];
            let pivot = a[k];
            for (dst, v) in a[i][k..].iter_mut().zip(&pivot[k..]) {
                *dst -= f * v;
            }
            let v = b[k];
            b[i] -= f * v;
        }
    }
    let mut x = [ZERO; 4];
    for k in (0..4).rev() {
        let s: C = (k + 1..4).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    x
}

fn csr(op: &OperatorMatrix) -> &Csr {
    op.as_csr().expect("ladder operators and their commutators are sparse")
}

/// Measures `S L S^dagger` for `L` in `(a, b, a^dagger, b^dagger)`.
///
/// Truncated conjugation `S a S^dagger` is swamped by the top levels once
/// squeezed number states spread, so the map is taken through the adjoint
/// action instead: the commutators `[G, L_j]` of the squeeze generator with
/// the ladder basis are fitted on the safe block as `sum_i K_ij L_i`, and
/// `exp(ad G)` restricted to the basis is `exp(K)`.
pub fn fit_bogoliubov(ops: &OperatorSet, z: &SqueezeParam, buffer: usize) -> Result<BogoliubovFit> {
    let mask = ops.space.safe_mask(buffer);
    let g = ops.squeeze_generator(z);
    let basis = ops.ladder_basis();
    let gram: [[C; 4]; 4] =
        std::array::from_fn(|i| std::array::from_fn(|k| masked_inner(csr(&basis[i]), csr(&basis[k]), &mask)));
    let mut k = Array2::<C>::zeros((4, 4));
    let mut closure: f64 = 0.0;
    for (j, l) in basis.iter().enumerate() {
        let comm = g.commutator(l)?;
        let rhs: [C; 4] = std::array::from_fn(|i| masked_inner(csr(&basis[i]), csr(&comm), &mask));
        let col = solve4(gram, rhs);
        for i in 0..4 {
            k[[i, j]] = col[i];
        }
        let fitted = OperatorMatrix::linear_combination(
            ops.space,
            &[(col[0], &basis[0]), (col[1], &basis[1]), (col[2], &basis[2]), (col[3], &basis[3])],
        )?;
        let diff = comm.sub(&fitted)?;
        let worst = csr(&diff)
            .triplets()
            .filter(|&(r, c, _)| mask[r] && mask[c])
            .map(|(_, _, v)| v.norm())
            .fold(0.0, f64::max);
        closure = closure.max(worst);
    }
    let e = matrix_exp_dense(&k, 1e-15);
    let column = |j: usize| ModeMap::from_array(std::array::from_fn(|i| e[[i, j]]));
    Ok(BogoliubovFit {
        coeffs: BogoliubovCoeffs {
            a: column(0),
            b: column(1),
        },
        closure_residual: closure,
    })
}

fn comm_residual(a: &OperatorMatrix, b: &OperatorMatrix, value: C, mask: &[bool]) -> Result<f64> {
    Ok(a.commutator(b)?.block_residual(value, mask))
}

fn basis_vector(space: FockSpace, j: usize) -> Vec<C> {
    let mut v = vec![ZERO; space.dim()];
    v[j] = ONE;
    v
}

/// `||u - scale v||` over the safe rows.
fn safe_norm_diff(u: &[C], v: &[C], scale: C, mask: &[bool]) -> f64 {
    u.iter()
        .zip(v)
        .zip(mask)
        .filter(|(_, &m)| m)
        .map(|((x, y), _)| (x - scale * y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `max |(D^dagger L D - L - lambda)_{ij}|` over safe rows and those safe
/// columns whose displaced image stays inside the safe subspace.
fn displacement_residual(ops: &OperatorSet, amps: &ModeAmplitudes, mask: &[bool]) -> Result<f64> {
    let d = ops.displacement(amps)?;
    let d_adj = d.adjoint();
    let (la, lb) = coherent_eigenvalues(ops.params, amps);
    let mut worst: f64 = 0.0;
    let mut probes = 0usize;
    for j in (0..ops.space.dim()).filter(|&j| mask[j]) {
        let e = basis_vector(ops.space, j);
        let v = d.apply(&e);
        let leak: f64 = v.iter().zip(mask).filter(|(_, &m)| !m).map(|(x, _)| x.norm_sqr()).sum();
        if leak > PROBE_LEAKAGE {
            continue;
        }
        probes += 1;
        for (l, lambda) in [(&ops.a_def, la), (&ops.b_def, lb)] {
            let lhs = d_adj.apply(&l.apply(&v));
            let direct = l.apply(&e);
            for i in (0..lhs.len()).filter(|&i| mask[i]) {
                let target = direct[i] + if i == j { lambda } else { ZERO };
                worst = worst.max((lhs[i] - target).norm());
            }
        }
    }
    Ok(if probes == 0 { f64::INFINITY } else { worst })
}

/// Every operator identity on one parameter set: the phase-space and deformed
/// algebras, the kappa-map bosons, the two-mode commutator, the displacement
/// property, the Bogoliubov map and the eigenvalue relations. The squeezed
/// eigenvalue check is skipped when `z = 0`.
pub fn identity_suite(
    params: &NcParams,
    space: FockSpace,
    amps: &ModeAmplitudes,
    z: &SqueezeParam,
) -> Result<Vec<ResidualReport>> {
    identity_suite_buffered(params, space, SAFE_BUFFER, amps, z)
}

/// [`identity_suite`] on the subspace `n_a + n_b <= cutoff - buffer`.
pub fn identity_suite_buffered(
    params: &NcParams,
    space: FockSpace,
    buffer: usize,
    amps: &ModeAmplitudes,
    z: &SqueezeParam,
) -> Result<Vec<ResidualReport>> {
    if buffer > space.cutoff() {
        return Err(NcError::BufferTooLarge {
            buffer,
            cutoff: space.cutoff(),
        });
    }
    let ops = operator_set(params, space)?;
    let mask = space.safe_mask(buffer);
    let meta = CheckMeta::new(params).with_space(space, buffer);
    let report = |name: &str, residual: f64, tol: f64| ResidualReport::new(name, residual, tol, meta.clone());
    let i = |v: f64| C::new(0.0, v);
    let mut out = Vec::new();

    let hw = [
        comm_residual(&ops.x, &ops.y, i(params.mu()), &mask)?,
        comm_residual(&ops.px, &ops.py, i(params.nu()), &mask)?,
        comm_residual(&ops.x, &ops.px, i(params.hbar()), &mask)?,
        comm_residual(&ops.y, &ops.py, i(params.hbar()), &mask)?,
        comm_residual(&ops.x, &ops.py, ZERO, &mask)?,
        comm_residual(&ops.y, &ops.px, ZERO, &mask)?,
    ];
    out.push(report("heisenberg_weyl", hw.into_iter().fold(0.0, f64::max), IDENTITY_TOLERANCE));

    let (ad, bd) = (ops.a_def.adjoint(), ops.b_def.adjoint());
    let deformed = [
        comm_residual(&ops.a_def, &ad, ONE, &mask)?,
        comm_residual(&ops.b_def, &bd, ONE, &mask)?,
        comm_residual(&ops.a_def, &ops.b_def, ZERO, &mask)?,
        comm_residual(&ops.a_def, &bd, i(params.theta()), &mask)?,
    ];
    out.push(report("deformed_algebra", deformed.into_iter().fold(0.0, f64::max), IDENTITY_TOLERANCE));

    let (oa, ob) = (ops.a_ord.adjoint(), ops.b_ord.adjoint());
    let ordinary = [
        comm_residual(&ops.a_ord, &oa, ONE, &mask)?,
        comm_residual(&ops.b_ord, &ob, ONE, &mask)?,
        comm_residual(&ops.a_ord, &ops.b_ord, ZERO, &mask)?,
        comm_residual(&ops.a_ord, &ob, ZERO, &mask)?,
    ];
    out.push(report("ordinary_algebra", ordinary.into_iter().fold(0.0, f64::max), IDENTITY_TOLERANCE));

    let (xx, pp) = ops.two_mode_quadratures();
    out.push(report(
        "two_mode_commutator",
        comm_residual(&xx, &pp, i(params.hbar() / 2.0), &mask)?,
        IDENTITY_TOLERANCE,
    ));

    let herm = [&ops.x, &ops.y, &ops.px, &ops.py, &xx, &pp]
        .iter()
        .map(|o| o.hermiticity_residual())
        .fold(0.0, f64::max);
    out.push(report("hermiticity", herm, HERMITIAN_TOLERANCE));

    let d = ops.displacement(amps)?;
    let s = ops.squeeze(z)?;
    let unitarity = [&d, &s]
        .iter()
        .map(|u| u.adjoint().matmul(u).map(|m| m.identity_residual(ONE)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    out.push(report("unitarity", unitarity, UNITARY_TOLERANCE));

    out.push(report(
        "displacement_property",
        displacement_residual(&ops, amps, &mask)?,
        IDENTITY_TOLERANCE,
    ));

    let fit = fit_bogoliubov(&ops, z, buffer)?;
    let expected = bogoliubov_coefficients(params, z);
    out.push(report("bogoliubov", fit.coeffs.max_abs_diff(&expected), IDENTITY_TOLERANCE));
    out.push(report("bogoliubov_closure", fit.closure_residual, IDENTITY_TOLERANCE));

    let (la, lb) = coherent_eigenvalues(params, amps);
    let coherent = build_state(&ops, amps, None)?;
    let eig = [(&ops.a_def, la), (&ops.b_def, lb)]
        .iter()
        .map(|(l, lambda)| safe_norm_diff(&l.apply(coherent.data()), coherent.data(), *lambda, &mask))
        .fold(0.0, f64::max);
    out.push(report("eigenvalue_coherent", eig, IDENTITY_TOLERANCE));

    if !z.is_zero() {
        let squeezed = build_state(&ops, amps, Some(z))?;
        let s_adj = s.adjoint();
        let eig = [(&ops.a_def, la), (&ops.b_def, lb)]
            .iter()
            .map(|(l, lambda)| {
                let image = s.apply(&l.apply(&s_adj.apply(squeezed.data())));
                safe_norm_diff(&image, squeezed.data(), *lambda, &mask)
            })
            .fold(0.0, f64::max);
        out.push(report("eigenvalue_squeezed", eig, IDENTITY_TOLERANCE));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_params;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn solve4_inverts() {
        let a = [
            [c(2.0, 0.0), c(1.0, 1.0), ZERO, ZERO],
            [c(0.0, -1.0), c(3.0, 0.0), c(0.5, 0.0), ZERO],
            [ZERO, c(0.0, 2.0), c(1.0, 0.0), c(1.0, 0.0)],
            [c(1.0, 0.0), ZERO, ZERO, c(4.0, -1.0)],
        ];
        let x = [c(1.0, 2.0), c(-1.0, 0.0), c(0.0, 3.0), c(2.0, -2.0)];
        let b: [C; 4] = std::array::from_fn(|i| (0..4).map(|j| a[i][j] * x[j]).sum());
        let got = solve4(a, b);
        assert!(got.iter().zip(&x).all(|(g, e)| (g - e).norm() < 1e-14));
    }

    #[test]
    fn full_suite_passes() {
        let p = make_params(0.5, 0.5, 1.0).unwrap();
        let space = FockSpace::new(30).unwrap();
        let amps = ModeAmplitudes::new(c(0.5, 0.0), c(0.0, 0.2)).unwrap();
        let z = SqueezeParam::new(0.3, PI / 4.0).unwrap();
        let reports = identity_suite(&p, space, &amps, &z).unwrap();
        assert_eq!(reports.len(), 11);
        for r in &reports {
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn no_squeeze_skips_squeezed_eigenvalues() {
        let p = make_params(0.3, 0.3, 1.0).unwrap();
        let space = FockSpace::new(20).unwrap();
        let amps = ModeAmplitudes::new(c(0.4, 0.1), c(0.0, 0.0)).unwrap();
        let reports = identity_suite(&p, space, &amps, &SqueezeParam::zero()).unwrap();
        assert!(reports.iter().all(|r| r.check != "eigenvalue_squeezed"));
        let bog = reports.iter().find(|r| r.check == "bogoliubov").unwrap();
        assert_eq!(bog.residual, 0.0);
        assert!(reports.iter().all(|r| r.passed), "{reports:?}");
    }

    #[test]
    fn buffer_is_checked() {
        let p = make_params(0.3, 0.3, 1.0).unwrap();
        let space = FockSpace::new(10).unwrap();
        let err = identity_suite_buffered(&p, space, 11, &ModeAmplitudes::vacuum(), &SqueezeParam::zero());
        assert_eq!(err, Err(NcError::BufferTooLarge { buffer: 11, cutoff: 10 }));
    }

    #[test]
    fn small_theta_recovers_textbook_bogoliubov() {
        // The corrections are first order in theta.
        let p = make_params(1e-7, 1e-7, 1.0).unwrap();
        let ops = operator_set(&p, FockSpace::new(30).unwrap()).unwrap();
        let z = SqueezeParam::new(0.4, 0.6).unwrap();
        let fit = fit_bogoliubov(&ops, &z, SAFE_BUFFER).unwrap();
        let phase = Complex64::from_polar(1.0, 0.6);
        let textbook = BogoliubovCoeffs {
            a: ModeMap::from_array([c(0.4f64.cosh(), 0.0), ZERO, ZERO, phase * 0.4f64.sinh()]),
            b: ModeMap::from_array([ZERO, c(0.4f64.cosh(), 0.0), phase * 0.4f64.sinh(), ZERO]),
        };
        assert!(fit.coeffs.max_abs_diff(&textbook) < 1e-6, "{fit:?} {textbook:?}");
    }
}
