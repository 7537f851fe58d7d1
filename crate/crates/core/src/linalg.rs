//! Small dense complex matrices and the helpers built on them.

use std::ops::{Index, IndexMut};

use crate::error::{mismatch, Result};
use crate::scalar::{compensated_sum, Real, C};

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

/// A finite operator on a discretized Hilbert space, represented densely.
pub type FiniteOperator<T> = CMatrix<T>;

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C::new(T::zero(), T::zero()); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(mismatch(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C<T>>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(mismatch("columns of unequal length"));
        }
        Ok(Self::from_fn(rows, cols, |i, j| columns[j][i]))
    }

    pub fn diagonal(values: &[T]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C::new(v, T::zero());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(mismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let row = &other.data[l * other.cols..(l + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d = *d + a * *b;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C<T>, C<T>) -> C<T>) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(mismatch("matrix shapes differ"));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, c: C<T>) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| a * c).collect() }
    }

    pub fn map(&self, f: impl Fn(usize, usize, C<T>) -> C<T>) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| f(i, j, self[(i, j)]))
    }

    pub fn trace(&self) -> C<T> {
        let n = self.rows.min(self.cols);
        let re = compensated_sum((0..n).map(|i| self[(i, i)].re));
        let im = compensated_sum((0..n).map(|i| self[(i, i)].im));
        C::new(re, im)
    }

    /// Entrywise ℓ² norm.
    pub fn frobenius(&self) -> T {
        let scale = self.max_abs();
        if scale == T::zero() {
            return T::zero();
        }
        let s = compensated_sum(self.data.iter().map(|z| (z / scale).norm_sqr()));
        scale * s.sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    /// Largest entrywise deviation from the identity.
    pub fn identity_deviation(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((self[(i, j)] - C::new(target, T::zero())).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (i..self.cols).all(|j| (self[(i, j)] - self[(j, i)].conj()).norm() <= tol))
    }

    pub fn mul_vec(&self, v: &[C<T>]) -> Result<Vec<C<T>>> {
        if v.len() != self.cols {
            return Err(mismatch("vector length differs from column count"));
        }
        Ok((0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(v).fold(C::new(T::zero(), T::zero()), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = C<T>;
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.cols + j]
    }
}

pub fn inner<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    let re = compensated_sum(a.iter().zip(b).map(|(x, y)| (x.conj() * y).re));
    let im = compensated_sum(a.iter().zip(b).map(|(x, y)| (x.conj() * y).im));
    C::new(re, im)
}

pub fn norm2<T: Real>(a: &[C<T>]) -> T {
    let scale = a.iter().fold(T::zero(), |m, z| m.max(z.norm()));
    if scale == T::zero() {
        return T::zero();
    }
    scale * compensated_sum(a.iter().map(|z| (z / scale).norm_sqr())).sqrt()
}

/// Orthonormalizes vectors in place by modified Gram–Schmidt, run twice for
/// stability. Fails on (numerically) dependent input.
pub fn orthonormalize<T: Real>(vectors: &mut [Vec<C<T>>]) -> Result<()> {
    for _pass in 0..2 {
        for j in 0..vectors.len() {
            let (done, rest) = vectors.split_at_mut(j);
            let v = &mut rest[0];
            for q in done.iter() {
                let c = inner(q, v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi = *vi - c * qi;
                }
            }
            let n = norm2(v);
            if !(n > T::lit(1e3) * T::epsilon()) {
                return Err(crate::error::Error::Numeric("linearly dependent vectors".into()));
            }
            for vi in v.iter_mut() {
                *vi = *vi / n;
            }
        }
    }
    Ok(())
}

/// Gram matrix G_{ij} = ⟨v_i, v_j⟩.
pub fn gram<T: Real>(vectors: &[Vec<C<T>>]) -> CMatrix<T> {
    let n = vectors.len();
    CMatrix::from_fn(n, n, |i, j| inner(&vectors[i], &vectors[j]))
}

/// Unitary exp(−iτH) for Hermitian H.
pub fn hermitian_propagator<T: Real>(h: &CMatrix<T>, tau: T) -> Result<CMatrix<T>> {
    let (values, vectors) = T::hermitian_eigen(h)?;
    let n = values.len();
    let phases: Vec<C<T>> = values.iter().map(|&l| C::from_polar(T::one(), -tau * l)).collect();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = C::new(T::zero(), T::zero());
            for l in 0..n {
                acc = acc + vectors[(i, l)] * phases[l] * vectors[(j, l)].conj();
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}
