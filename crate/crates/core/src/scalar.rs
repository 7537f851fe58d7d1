//! Scalar abstraction shared by every numerical routine.
//!
//! Everything is generic over [`Real`], implemented for `f32` and `f64`.
//! Dense eigen/singular-value work is routed through the trait so that each
//! concrete type can pick its own backend.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use nalgebra::DMatrix;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

pub type C<T> = num_complex::Complex<T>;

pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + FftNum
    + Default
    + Display
    + Debug
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal; total for the implemented types.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn of_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Singular values of a dense complex matrix, in descending order.
    fn singular_values(m: &CMatrix<Self>) -> Result<Vec<Self>>;

    /// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and
    /// the matching orthonormal eigenvectors as columns.
    fn hermitian_eigen(m: &CMatrix<Self>) -> Result<(Vec<Self>, CMatrix<Self>)>;
}

fn to_dmatrix<T: Real + nalgebra::RealField>(m: &CMatrix<T>) -> DMatrix<C<T>> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            fn singular_values(m: &CMatrix<$t>) -> Result<Vec<$t>> {
                if m.rows() == 0 || m.cols() == 0 {
                    return Ok(Vec::new());
                }
                if m.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::Numeric("non-finite matrix entry".into()));
                }
                let svd = to_dmatrix(m).try_svd(false, false, <$t>::EPSILON, 0).ok_or_else(|| {
                    Error::Numeric("singular value decomposition did not converge".into())
                })?;
                let mut s: Vec<$t> = svd.singular_values.iter().copied().collect();
                s.sort_by(|a, b| b.partial_cmp(a).unwrap());
                Ok(s)
            }

            fn hermitian_eigen(m: &CMatrix<$t>) -> Result<(Vec<$t>, CMatrix<$t>)> {
                if m.rows() != m.cols() {
                    return Err(Error::Mismatch("eigen-decomposition needs a square matrix".into()));
                }
                if m.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::Numeric("non-finite matrix entry".into()));
                }
                let n = m.rows();
                let eig = to_dmatrix(m)
                    .try_symmetric_eigen(<$t>::EPSILON, 0)
                    .ok_or_else(|| Error::Numeric("Hermitian eigensolver did not converge".into()))?;
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
                let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
                let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
                Ok((values, vectors))
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

/// A Lebesgue or Schatten exponent; `Infinite` is kept symbolic.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum Exponent<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> Exponent<T> {
    /// Maps an `f64` onto an exponent, sending `f64::INFINITY` to `Infinite`.
    pub fn from_f64(x: f64) -> Self {
        if x.is_infinite() && x > 0.0 {
            Exponent::Infinite
        } else {
            Exponent::Finite(T::lit(x))
        }
    }

    pub fn finite(x: T) -> Self {
        Exponent::Finite(x)
    }

    /// Reciprocal 1/p, with 1/∞ = 0.
    pub fn recip(self) -> T {
        match self {
            Exponent::Finite(p) => p.recip(),
            Exponent::Infinite => T::zero(),
        }
    }

    /// Hölder conjugate p′ with 1/p + 1/p′ = 1.
    pub fn conjugate(self) -> Self {
        match self {
            Exponent::Infinite => Exponent::Finite(T::one()),
            Exponent::Finite(p) if p == T::one() => Exponent::Infinite,
            Exponent::Finite(p) => Exponent::Finite(p / (p - T::one())),
        }
    }

    /// Multiplies the exponent by a positive factor (∞ stays ∞).
    pub fn scale(self, c: T) -> Self {
        match self {
            Exponent::Finite(p) => Exponent::Finite(p * c),
            Exponent::Infinite => Exponent::Infinite,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    pub fn value(self) -> T {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinite => T::infinity(),
        }
    }

    pub(crate) fn at_least(self, floor: T) -> bool {
        match self {
            Exponent::Finite(p) => p >= floor,
            Exponent::Infinite => true,
        }
    }
}

impl<T: Real> Display for Exponent<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

/// e^{2πiθ}
pub fn cis_turns<T: Real>(theta: T) -> C<T> {
    let a = T::TAU() * theta;
    C::new(a.cos(), a.sin())
}

/// Fractional part of `t·n` for integer `n`, reduced so that integer `t` gives
/// exactly zero.
pub fn phase_turns<T: Real>(t: T, n: i64) -> T {
    let whole = t.trunc();
    let frac = t - whole;
    let nn = T::of_int(n);
    let p = frac * nn;
    p - p.floor()
}

/// Neumaier-compensated sum; order-fixed, so results are reproducible.
pub fn compensated_sum<T: Real>(values: impl IntoIterator<Item = T>) -> T {
    let mut sum = T::zero();
    let mut c = T::zero();
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c = c + ((sum - t) + v);
        } else {
            c = c + ((v - t) + sum);
        }
        sum = t;
    }
    sum + c
}
