//! Operator storage for the truncated two-mode space.
//!
//! Ladder operators and the quadratures built from them are banded, so they
//! live in compressed sparse rows. Exponentials of Kronecker-sum generators
//! (displacements, squeezes) factor into a tensor product of two small dense
//! blocks and are kept in that form. Everything else falls back to a dense
//! matrix.

use ndarray::{Array2, ArrayView2};
use num_complex::Complex64;

use super::FockSpace;
use crate::error::{NcError, Result};

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

/// Square complex matrix in compressed sparse row form.
#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<C>,
}

impl Csr {
    /// Builds from `(row, col, value)` triplets; duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets(n: usize, mut trips: Vec<(usize, usize, C)>) -> Self {
        trips.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut indptr = vec![0usize; n + 1];
        let mut indices = Vec::with_capacity(trips.len());
        let mut values: Vec<C> = Vec::with_capacity(trips.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows = Vec::with_capacity(trips.len());
        for (i, j, v) in trips {
            assert!(i < n && j < n, "triplet ({i}, {j}) outside {n}x{n}");
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(j);
                values.push(v);
                rows.push(i);
                last = Some((i, j));
            }
        }
        let mut keep_idx = Vec::with_capacity(indices.len());
        let mut keep_val = Vec::with_capacity(values.len());
        for ((i, j), v) in rows.into_iter().zip(indices).zip(values) {
            if v != ZERO {
                indptr[i + 1] += 1;
                keep_idx.push(j);
                keep_val.push(v);
            }
        }
        for i in 0..n {
            indptr[i + 1] += indptr[i];
        }
        Self {
            n,
            indptr,
            indices: keep_idx,
            values: keep_val,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            values: vec![ONE; n],
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            indptr: vec![0; n + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C)> + '_ {
        let span = self.indptr[i]..self.indptr[i + 1];
        self.indices[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> C {
        let span = self.indptr[i]..self.indptr[i + 1];
        match self.indices[span.clone()].binary_search(&j) {
            Ok(k) => self.values[span.start + k],
            Err(_) => ZERO,
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.n, self.triplets().map(|(i, j, v)| (j, i, v.conj())).collect())
    }

    pub fn scale(&self, c: C) -> Self {
        Self::from_triplets(self.n, self.triplets().map(|(i, j, v)| (i, j, c * v)).collect())
    }

    /// `c1 * self + c2 * other`.
    pub fn combine(&self, c1: C, other: &Self, c2: C) -> Self {
        let mut trips: Vec<_> = self.triplets().map(|(i, j, v)| (i, j, c1 * v)).collect();
        trips.extend(other.triplets().map(|(i, j, v)| (i, j, c2 * v)));
        Self::from_triplets(self.n, trips)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut acc = vec![ZERO; n];
        let mut seen = vec![false; n];
        let mut touched = Vec::new();
        let mut trips = Vec::new();
        for i in 0..n {
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    if !seen[j] {
                        seen[j] = true;
                        touched.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            for &j in &touched {
                trips.push((i, j, acc[j]));
                acc[j] = ZERO;
                seen[j] = false;
            }
            touched.clear();
        }
        Self::from_triplets(n, trips)
    }

    pub fn matvec(&self, v: &[C]) -> Vec<C> {
        (0..self.n)
            .map(|i| self.row(i).fold(ZERO, |s, (j, a)| s + a * v[j]))
            .collect()
    }

    pub fn to_dense(&self) -> Array2<C> {
        let mut m = Array2::zeros((self.n, self.n));
        for (i, j, v) in self.triplets() {
            m[[i, j]] = v;
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Kronecker product of two small sparse matrices.
pub fn kron_csr(a: &Csr, b: &Csr) -> Csr {
    let nb = b.n();
    let mut trips = Vec::with_capacity(a.nnz() * b.nnz());
    for (i1, j1, x) in a.triplets() {
        for (i2, j2, y) in b.triplets() {
            trips.push((i1 * nb + i2, j1 * nb + j2, x * y));
        }
    }
    Csr::from_triplets(a.n() * nb, trips)
}

/// Storage of an [`OperatorMatrix`].
#[derive(Debug, Clone, PartialEq)]
pub enum Storage {
    Sparse(Csr),
    Dense(Array2<C>),
    /// `a ⊗ b`; the first factor acts on the slow (first) mode index.
    Kron(Array2<C>, Array2<C>),
}

/// A linear operator on a [`FockSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    space: FockSpace,
    storage: Storage,
}

fn dense_adjoint(m: ArrayView2<C>) -> Array2<C> {
    m.t().mapv(|v| v.conj())
}

fn kron_entry(a: &Array2<C>, b: &Array2<C>, i: usize, j: usize) -> C {
    let n = b.nrows();
    a[[i / n, j / n]] * b[[i % n, j % n]]
}

impl OperatorMatrix {
    pub fn sparse(space: FockSpace, csr: Csr) -> Self {
        assert_eq!(csr.n(), space.dim(), "sparse matrix does not fit the space");
        Self {
            space,
            storage: Storage::Sparse(csr),
        }
    }

    pub fn dense(space: FockSpace, m: Array2<C>) -> Self {
        assert_eq!(m.dim(), (space.dim(), space.dim()), "dense matrix does not fit the space");
        Self {
            space,
            storage: Storage::Dense(m),
        }
    }

    pub fn kron(space: FockSpace, a: Array2<C>, b: Array2<C>) -> Self {
        let n = space.modes();
        assert_eq!((a.dim(), b.dim()), ((n, n), (n, n)), "Kronecker factors do not fit the space");
        Self {
            space,
            storage: Storage::Kron(a, b),
        }
    }

    pub fn identity(space: FockSpace) -> Self {
        Self::sparse(space, Csr::identity(space.dim()))
    }

    pub fn zeros(space: FockSpace) -> Self {
        Self::sparse(space, Csr::zeros(space.dim()))
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    pub fn as_csr(&self) -> Option<&Csr> {
        match &self.storage {
            Storage::Sparse(c) => Some(c),
            _ => None,
        }
    }

    fn check_space(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            return Err(NcError::SpaceMismatch {
                left: self.space.cutoff(),
                right: other.space.cutoff(),
            });
        }
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize) -> C {
        match &self.storage {
            Storage::Sparse(c) => c.get(i, j),
            Storage::Dense(m) => m[[i, j]],
            Storage::Kron(a, b) => kron_entry(a, b, i, j),
        }
    }

    pub fn to_dense(&self) -> Array2<C> {
        match &self.storage {
            Storage::Sparse(c) => c.to_dense(),
            Storage::Dense(m) => m.clone(),
            Storage::Kron(a, b) => {
                let dim = self.space.dim();
                Array2::from_shape_fn((dim, dim), |(i, j)| kron_entry(a, b, i, j))
            }
        }
    }

    pub fn adjoint(&self) -> Self {
        let storage = match &self.storage {
            Storage::Sparse(c) => Storage::Sparse(c.adjoint()),
            Storage::Dense(m) => Storage::Dense(dense_adjoint(m.view())),
            Storage::Kron(a, b) => Storage::Kron(dense_adjoint(a.view()), dense_adjoint(b.view())),
        };
        Self {
            space: self.space,
            storage,
        }
    }

    pub fn scale(&self, c: C) -> Self {
        let storage = match &self.storage {
            Storage::Sparse(m) => Storage::Sparse(m.scale(c)),
            Storage::Dense(m) => Storage::Dense(m.mapv(|v| c * v)),
            Storage::Kron(a, b) => Storage::Kron(a.mapv(|v| c * v), b.clone()),
        };
        Self {
            space: self.space,
            storage,
        }
    }

    /// `c1 * self + c2 * other`.
    pub fn combine(&self, c1: C, other: &Self, c2: C) -> Result<Self> {
        self.check_space(other)?;
        let storage = match (&self.storage, &other.storage) {
            (Storage::Sparse(a), Storage::Sparse(b)) => Storage::Sparse(a.combine(c1, b, c2)),
            _ => {
                let mut m = self.to_dense().mapv(|v| c1 * v);
                m.zip_mut_with(&other.to_dense(), |x, &y| *x += c2 * y);
                Storage::Dense(m)
            }
        };
        Ok(Self {
            space: self.space,
            storage,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(ONE, other, ONE)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(ONE, other, -ONE)
    }

    /// `sum_k c_k * ops_k` over operators on one space.
    pub fn linear_combination(space: FockSpace, terms: &[(C, &OperatorMatrix)]) -> Result<Self> {
        terms
            .iter()
            .try_fold(Self::zeros(space), |acc, (c, op)| acc.combine(ONE, op, *c))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        let storage = match (&self.storage, &other.storage) {
            (Storage::Sparse(a), Storage::Sparse(b)) => Storage::Sparse(a.matmul(b)),
            (Storage::Kron(a1, b1), Storage::Kron(a2, b2)) => Storage::Kron(a1.dot(a2), b1.dot(b2)),
            (Storage::Sparse(a), _) => {
                let rhs = other.to_dense();
                let mut out = Array2::zeros(rhs.dim());
                for (i, k, v) in a.triplets() {
                    out.row_mut(i).scaled_add(v, &rhs.row(k));
                }
                Storage::Dense(out)
            }
            (_, Storage::Sparse(b)) => {
                let lhs = self.to_dense();
                let mut out = Array2::zeros(lhs.dim());
                for (k, j, v) in b.triplets() {
                    out.column_mut(j).scaled_add(v, &lhs.column(k));
                }
                Storage::Dense(out)
            }
            _ => Storage::Dense(self.to_dense().dot(&other.to_dense())),
        };
        Ok(Self {
            space: self.space,
            storage,
        })
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C]) -> Vec<C> {
        assert_eq!(v.len(), self.space.dim(), "vector does not fit the space");
        match &self.storage {
            Storage::Sparse(c) => c.matvec(v),
            Storage::Dense(m) => (0..m.nrows())
                .map(|i| m.row(i).iter().zip(v).fold(ZERO, |s, (a, x)| s + a * x))
                .collect(),
            Storage::Kron(a, b) => {
                // (a ⊗ b) vec(V) = vec(a V b^T) in row-major order.
                let n = self.space.modes();
                let vm = ArrayView2::from_shape((n, n), v).expect("square reshape");
                let w = a.dot(&vm).dot(&b.t());
                w.iter().copied().collect()
            }
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        match &self.storage {
            Storage::Sparse(c) => c.max_abs(),
            Storage::Dense(m) => m.iter().map(|v| v.norm()).fold(0.0, f64::max),
            Storage::Kron(a, b) => {
                let ma = a.iter().map(|v| v.norm()).fold(0.0, f64::max);
                let mb = b.iter().map(|v| v.norm()).fold(0.0, f64::max);
                ma * mb
            }
        }
    }

    /// Max-norm distance to another operator.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_space(other)?;
        Ok(match (&self.storage, &other.storage) {
            (Storage::Sparse(a), Storage::Sparse(b)) => a.combine(ONE, b, -ONE).max_abs(),
            (Storage::Kron(..), _) | (_, Storage::Kron(..)) => {
                let dim = self.space.dim();
                let mut worst: f64 = 0.0;
                for i in 0..dim {
                    for j in 0..dim {
                        worst = worst.max((self.get(i, j) - other.get(i, j)).norm());
                    }
                }
                worst
            }
            _ => {
                let (a, b) = (self.to_dense(), other.to_dense());
                a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
            }
        })
    }

    /// Max-norm distance to `c * I` over the full matrix.
    pub fn identity_residual(&self, c: C) -> f64 {
        let mask = vec![true; self.space.dim()];
        self.block_residual(c, &mask)
    }

    /// `max |M_ij - c delta_ij|` over rows and columns selected by `mask`.
    pub fn block_residual(&self, c: C, mask: &[bool]) -> f64 {
        assert_eq!(mask.len(), self.space.dim(), "mask does not fit the space");
        match &self.storage {
            Storage::Sparse(m) => {
                let mut worst: f64 = 0.0;
                for i in (0..m.n()).filter(|&i| mask[i]) {
                    let mut diag = ZERO;
                    for (j, v) in m.row(i) {
                        if j == i {
                            diag = v;
                        } else if mask[j] {
                            worst = worst.max(v.norm());
                        }
                    }
                    worst = worst.max((diag - c).norm());
                }
                worst
            }
            _ => {
                let idx: Vec<usize> = (0..mask.len()).filter(|&i| mask[i]).collect();
                let mut worst: f64 = 0.0;
                for &i in &idx {
                    for &j in &idx {
                        let target = if i == j { c } else { ZERO };
                        worst = worst.max((self.get(i, j) - target).norm());
                    }
                }
                worst
            }
        }
    }

    /// `max |M - M^dagger|`.
    pub fn hermiticity_residual(&self) -> f64 {
        match &self.storage {
            Storage::Sparse(m) => m.combine(ONE, &m.adjoint(), -ONE).max_abs(),
            _ => {
                let d = self.to_dense();
                let dim = d.nrows();
                let mut worst: f64 = 0.0;
                for i in 0..dim {
                    for j in i..dim {
                        worst = worst.max((d[[i, j]] - d[[j, i]].conj()).norm());
                    }
                }
                worst
            }
        }
    }
}
