//! Dense symmetric matrices and the eigendecomposition used by ellipsoids.
//!
//! Factorizations run in `f64` through nalgebra and are cast back to the
//! working scalar; matrices here are at most a few hundred rows.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::point::dot;
use crate::scalar::Scalar;

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> SquareMatrix<T> {
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidSet("matrix must be nonempty".into()));
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidSet(format!(
                    "matrix row {i} has length {}, expected {n}",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidSet(format!("matrix row {i} has a non-finite entry")));
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![T::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = T::one();
        }
        Self { n, data }
    }

    pub fn from_row_major(n: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), n * n);
        Self { n, data }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.n).map(|i| dot(self.row(i), v)).collect()
    }

    /// Quadratic form `<v, M v>`.
    pub fn quad(&self, v: &[T]) -> T {
        dot(v, &self.mul_vec(v))
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Largest `|M_ij - M_ji|`.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j).to_f64_lossy())
    }
}

/// `M = V diag(values) V^T` with orthonormal eigenvectors stored as rows of `V^T`.
#[derive(Clone, Debug)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    /// Row `j` is the `j`-th unit eigenvector.
    vt: Vec<T>,
    n: usize,
}

impl<T: Scalar> SymmetricEigen<T> {
    /// Decomposes the symmetric part of `m`.
    pub fn new(m: &SquareMatrix<T>) -> Self {
        let n = m.n();
        let mut a = m.to_nalgebra();
        let at = a.transpose();
        a = (a + at) * 0.5;
        let eig = a.symmetric_eigen();
        let values = eig.eigenvalues.iter().map(|&v| T::lit(v)).collect();
        let mut vt = Vec::with_capacity(n * n);
        for j in 0..n {
            vt.extend(eig.eigenvectors.column(j).iter().map(|&v| T::lit(v)));
        }
        Self { values, vt, n }
    }

    pub fn min_value(&self) -> T {
        self.values.iter().fold(T::infinity(), |m, &v| m.min(v))
    }

    pub fn max_value(&self) -> T {
        self.values.iter().fold(T::neg_infinity(), |m, &v| m.max(v))
    }

    #[inline]
    pub fn vector(&self, j: usize) -> &[T] {
        &self.vt[j * self.n..(j + 1) * self.n]
    }

    /// Coordinates in the eigenbasis: `V^T v`.
    pub fn to_eigenbasis(&self, v: &[T]) -> Vec<T> {
        (0..self.n).map(|j| dot(self.vector(j), v)).collect()
    }

    /// Back to the standard basis: `V c`.
    pub fn from_eigenbasis(&self, c: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.n];
        for (j, &cj) in c.iter().enumerate() {
            if cj == T::zero() {
                continue;
            }
            for (o, &v) in out.iter_mut().zip(self.vector(j)) {
                *o = *o + cj * v;
            }
        }
        out
    }
}
