//! Matrix exponential by scaled Taylor series with repeated squaring.
//!
//! Generators that split as `A ⊗ I + I ⊗ B` exponentiate factor by factor,
//! `exp(A ⊗ I + I ⊗ B) = exp(A) ⊗ exp(B)`, which keeps displacement and
//! squeeze operators affordable at large cutoffs.

use ndarray::Array2;
use num_complex::Complex64;

use super::matrix::{Csr, OperatorMatrix, Storage};
use crate::error::{NcError, Result};

type C = Complex64;

pub const DEFAULT_EXPM_TOLERANCE: f64 = 1e-12;

const MAX_TERMS: usize = 64;

fn norm1(m: &Array2<C>) -> f64 {
    m.columns()
        .into_iter()
        .map(|c| c.iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(x)` for a dense square matrix. The series is truncated once a term
/// drops below `tol` after rescaling to `||x||_1 <= 1/2`; the remaining tail
/// is then bounded by a third of that term.
pub fn matrix_exp_dense(x: &Array2<C>, tol: f64) -> Array2<C> {
    let n = x.nrows();
    let norm = norm1(x);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scale = 0.5f64.powi(squarings);
    let xs = x.mapv(|v| v * scale);
    let stop = (tol * scale).max(f64::EPSILON / 8.0);
    let mut sum = Array2::<C>::eye(n);
    let mut term = Array2::<C>::eye(n);
    for k in 1..=MAX_TERMS {
        term = term.dot(&xs).mapv(|v| v / k as f64);
        sum += &term;
        if norm1(&term) <= stop {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.dot(&sum);
    }
    sum
}

fn check_finite(m: &OperatorMatrix) -> Result<()> {
    let bad = match m.storage() {
        Storage::Sparse(c) => c.triplets().map(|t| t.2).find(|v| !v.is_finite()),
        Storage::Dense(d) => d.iter().copied().find(|v| !v.is_finite()),
        Storage::Kron(a, b) => a.iter().chain(b.iter()).copied().find(|v| !v.is_finite()),
    };
    match bad {
        Some(v) => Err(NcError::NonFinite {
            name: "matrix entry",
            value: v.norm(),
        }),
        None => Ok(()),
    }
}

/// Splits `m = A ⊗ I + I ⊗ B` when that holds up to rounding, with `B[0,0] = 0`.
pub fn split_kronecker_sum(m: &OperatorMatrix) -> Option<(Array2<C>, Array2<C>)> {
    if matches!(m.storage(), Storage::Kron(..)) {
        return None;
    }
    let space = m.space();
    let n = space.modes();
    let a = Array2::from_shape_fn((n, n), |(i, j)| m.get(i * n, j * n));
    let a00 = a[[0, 0]];
    let b = Array2::from_shape_fn((n, n), |(k, l)| {
        let v = m.get(k, l);
        if k == l {
            v - a00
        } else {
            v
        }
    });
    let scale = m.max_abs();
    let allowed = 1e3 * f64::EPSILON * scale;
    let mut trips = Vec::new();
    for ((i, j), &v) in a.indexed_iter() {
        if v != C::new(0.0, 0.0) {
            for k in 0..n {
                trips.push((i * n + k, j * n + k, -v));
            }
        }
    }
    for ((k, l), &v) in b.indexed_iter() {
        if v != C::new(0.0, 0.0) {
            for i in 0..n {
                trips.push((i * n + k, i * n + l, -v));
            }
        }
    }
    let residual = match m.storage() {
        Storage::Sparse(c) => {
            trips.extend(c.triplets());
            Csr::from_triplets(space.dim(), trips).max_abs()
        }
        _ => {
            let mut d = m.to_dense();
            for (i, j, v) in trips {
                d[[i, j]] += v;
            }
            d.iter().map(|v| v.norm()).fold(0.0, f64::max)
        }
    };
    (residual <= allowed).then_some((a, b))
}

/// `exp(m)` to tolerance `tol`.
pub fn matrix_exp(m: &OperatorMatrix, tol: f64) -> Result<OperatorMatrix> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(NcError::InvalidTolerance(tol));
    }
    check_finite(m)?;
    let space = m.space();
    if let Some((a, b)) = split_kronecker_sum(m) {
        return Ok(OperatorMatrix::kron(
            space,
            matrix_exp_dense(&a, tol),
            matrix_exp_dense(&b, tol),
        ));
    }
    Ok(OperatorMatrix::dense(space, matrix_exp_dense(&m.to_dense(), tol)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::FockSpace;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn random_anti_hermitian(n: usize, scale: f64, seed: u64) -> Array2<C> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = Array2::from_shape_fn((n, n), |_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        (&g - &g.t().mapv(|v| v.conj())).mapv(|v| v * scale)
    }

    fn max_abs(m: &Array2<C>) -> f64 {
        m.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn zero_gives_identity() {
        let space = FockSpace::new(3).unwrap();
        let e = matrix_exp(&OperatorMatrix::zeros(space), DEFAULT_EXPM_TOLERANCE).unwrap();
        assert_eq!(e.identity_residual(c(1.0, 0.0)), 0.0);
    }

    #[test]
    fn scalar_phase() {
        let space = FockSpace::new(2).unwrap();
        let m = OperatorMatrix::identity(space).scale(c(0.0, PI));
        let e = matrix_exp(&m, DEFAULT_EXPM_TOLERANCE).unwrap();
        assert!(e.identity_residual(c(-1.0, 0.0)) < 1e-12);
    }

    #[test]
    fn unitary_for_random_anti_hermitian() {
        let space = FockSpace::new(10).unwrap();
        let x = random_anti_hermitian(space.dim(), 0.3, 7);
        let u = matrix_exp(&OperatorMatrix::dense(space, x), DEFAULT_EXPM_TOLERANCE).unwrap();
        let uu = u.matmul(&u.adjoint()).unwrap();
        assert!(uu.identity_residual(c(1.0, 0.0)) < 1e-11);
    }

    #[test]
    fn two_by_two_rotation() {
        // exp([[0, -t], [t, 0]]) is a rotation by t.
        let t = 2.7;
        let x = Array2::from_shape_vec((2, 2), vec![c(0.0, 0.0), c(-t, 0.0), c(t, 0.0), c(0.0, 0.0)]).unwrap();
        let e = matrix_exp_dense(&x, 1e-14);
        assert!((e[[0, 0]] - t.cos()).norm() < 1e-14);
        assert!((e[[1, 0]] - t.sin()).norm() < 1e-14);
    }

    #[test]
    fn kronecker_sum_exponentiates_by_factors() {
        let space = FockSpace::new(4).unwrap();
        let n = space.modes();
        let a = random_anti_hermitian(n, 0.8, 1);
        let mut b = random_anti_hermitian(n, 0.8, 2);
        b[[0, 0]] = c(0.0, 0.0);
        let eye = Array2::<C>::eye(n);
        let mut sum = Array2::<C>::zeros((space.dim(), space.dim()));
        for i in 0..space.dim() {
            for j in 0..space.dim() {
                let (i1, i2) = (i / n, i % n);
                let (j1, j2) = (j / n, j % n);
                sum[[i, j]] = a[[i1, j1]] * eye[[i2, j2]] + eye[[i1, j1]] * b[[i2, j2]];
            }
        }
        let m = OperatorMatrix::dense(space, sum.clone());
        let (sa, sb) = split_kronecker_sum(&m).expect("is a Kronecker sum");
        assert!(max_abs(&(&sa - &a)) < 1e-15 && max_abs(&(&sb - &b)) < 1e-15);
        let fast = matrix_exp(&m, DEFAULT_EXPM_TOLERANCE).unwrap();
        assert!(matches!(fast.storage(), Storage::Kron(..)));
        let slow = matrix_exp_dense(&sum, DEFAULT_EXPM_TOLERANCE);
        assert!(max_abs(&(&fast.to_dense() - &slow)) < 1e-12);

        let mut broken = sum;
        broken[[1, 7]] += c(1e-6, 0.0);
        assert!(split_kronecker_sum(&OperatorMatrix::dense(space, broken)).is_none());
    }

    #[test]
    fn rejects_bad_input() {
        let space = FockSpace::new(1).unwrap();
        let m = OperatorMatrix::identity(space).scale(c(f64::NAN, 0.0));
        assert!(matches!(matrix_exp(&m, 1e-12), Err(NcError::NonFinite { .. })));
        let ok = OperatorMatrix::identity(space);
        assert_eq!(matrix_exp(&ok, 0.0), Err(NcError::InvalidTolerance(0.0)));
    }
}
