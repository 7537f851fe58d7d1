//! Mixed Lebesgue, Sobolev, space-time and Schatten norms.
//!
//! Spatial integrals are uniform-grid Riemann sums on the unit-measure torus;
//! they are exact for trigonometric polynomials of degree below M and carry a
//! small aliasing bias for non-polynomial integrands such as |f|^r.

use rayon::prelude::*;

use crate::ensemble::OrthonormalEnsemble;
use crate::error::{domain, Error, Result};
use crate::field::{multipliers, SpectralField};
use crate::grid::TorusGrid;
use crate::linalg::CMatrix;
use crate::scalar::{compensated_sum, Exponent, Real, C};
use crate::trajectory::Trajectory;

pub use crate::littlewood_paley::mixed_besov_norm;

/// A real-valued function sampled on a grid (densities, moduli).
#[derive(Debug, Clone)]
pub struct GridFunction<T: Real> {
    pub grid: TorusGrid<T>,
    pub values: Vec<T>,
}

impl<T: Real> GridFunction<T> {
    pub fn new(grid: TorusGrid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Mismatch("sample count differs from grid size".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn integral(&self) -> T {
        compensated_sum(self.values.iter().copied()) * self.grid.cell_weight()
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    /// Mixed norm of |values|; exponents must be at least 1.
    pub fn mixed_norm(&self, r: Exponent<T>, rt: Exponent<T>) -> Result<T> {
        check_norm_exponents(r, rt)?;
        Ok(mixed_lebesgue(&self.grid, &self.values, r, rt))
    }

    /// Mixed (quasi-)norm admitting exponents in (0, 1).
    pub fn mixed_quasi_norm(&self, r: Exponent<T>, rt: Exponent<T>) -> Result<T> {
        if !(r.recip() >= T::zero() && r.value() > T::zero() && rt.value() > T::zero()) {
            return Err(domain("quasi-norm exponents must be positive"));
        }
        Ok(mixed_lebesgue(&self.grid, &self.values, r, rt))
    }

    /// Band-limited spectral representation on `lattice`.
    pub fn to_field(&self, lattice: std::sync::Arc<crate::lattice::FrequencyLattice>) -> Result<SpectralField<T>> {
        let samples: Vec<C<T>> = self.values.iter().map(|&v| C::new(v, T::zero())).collect();
        SpectralField::from_samples(lattice, self.grid.clone(), &samples)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::Mismatch("grid functions on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| a - b).collect();
        Ok(Self { grid: self.grid.clone(), values })
    }
}

fn check_norm_exponents<T: Real>(r: Exponent<T>, rt: Exponent<T>) -> Result<()> {
    if !r.at_least(T::one()) || !rt.at_least(T::one()) {
        return Err(domain(format!("mixed norm exponents ({r}, {rt}) must be at least 1")));
    }
    Ok(())
}

/// (mean |v|^p)^{1/p}, or max |v| for p = ∞.
pub fn lebesgue_mean<T: Real>(values: &[T], p: Exponent<T>) -> T {
    let top = values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if top == T::zero() || values.is_empty() {
        return T::zero();
    }
    match p {
        Exponent::Infinite => top,
        Exponent::Finite(p) => {
            let s = compensated_sum(values.iter().map(|v| (v.abs() / top).powf(p)));
            top * (s / T::of_int(values.len() as i64)).powf(p.recip())
        }
    }
}

/// ℓ^p norm of a vector (p > 0), max for p = ∞.
pub fn lp_norm<T: Real>(values: &[T], p: Exponent<T>) -> T {
    let top = values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if top == T::zero() {
        return T::zero();
    }
    match p {
        Exponent::Infinite => top,
        Exponent::Finite(p) => top * compensated_sum(values.iter().map(|v| (v.abs() / top).powf(p))).powf(p.recip()),
    }
}

/// Nested quadrature (∫_x (∫_y |f|^{r̃})^{r/r̃})^{1/r} of grid moduli.
pub fn mixed_lebesgue<T: Real>(grid: &TorusGrid<T>, moduli: &[T], r: Exponent<T>, rt: Exponent<T>) -> T {
    let inner: Vec<T> = moduli.chunks(grid.y_len()).map(|c| lebesgue_mean(c, rt)).collect();
    lebesgue_mean(&inner, r)
}

/// Weighted time norm (Σ w_i v_i^q)^{1/q}, max for q = ∞.
pub fn time_lebesgue<T: Real>(weights: &[T], values: &[T], q: Exponent<T>) -> Result<T> {
    if values.is_empty() {
        return Err(Error::Empty("time series".into()));
    }
    if weights.len() != values.len() {
        return Err(Error::Mismatch("weights and values differ in length".into()));
    }
    let top = values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if top == T::zero() {
        return Ok(T::zero());
    }
    Ok(match q {
        Exponent::Infinite => top,
        Exponent::Finite(q) => {
            let s = compensated_sum(weights.iter().zip(values).map(|(&w, v)| w * (v.abs() / top).powf(q)));
            top * s.powf(q.recip())
        }
    })
}

pub fn mixed_space_norm<T: Real>(field: &SpectralField<T>, r: Exponent<T>, rt: Exponent<T>) -> Result<T> {
    check_norm_exponents(r, rt)?;
    Ok(mixed_lebesgue(field.grid(), &field.moduli(), r, rt))
}

pub fn spacetime_norm<T: Real>(traj: &Trajectory<T>, q: Exponent<T>, r: Exponent<T>, rt: Exponent<T>) -> Result<T> {
    if traj.is_empty() {
        return Err(Error::Empty("trajectory".into()));
    }
    check_norm_exponents(r, rt)?;
    if !q.at_least(T::one()) {
        return Err(domain("time exponent must be at least 1"));
    }
    let per_time: Vec<T> =
        traj.fields.par_iter().map(|f| mixed_lebesgue(f.grid(), &f.moduli(), r, rt)).collect();
    time_lebesgue(traj.weights(), &per_time, q)
}

/// (Σ (1+|ξ|²)^s |a(ξ)|²)^{1/2}
pub fn sobolev_norm<T: Real>(field: &SpectralField<T>, s: T) -> T {
    let w: Vec<T> = field
        .lattice()
        .points()
        .zip(field.coeffs())
        .map(|(p, a)| (T::one() + T::of_int(p.norm_sq)).powf(s) * a.norm_sqr())
        .collect();
    compensated_sum(w).sqrt()
}

/// ‖⟨∇⟩^s f‖_{L^r}
pub fn lr_sobolev_norm<T: Real>(field: &SpectralField<T>, s: T, r: Exponent<T>) -> Result<T> {
    if r == Exponent::Finite(T::lit(2.0)) {
        return Ok(sobolev_norm(field, s));
    }
    let g = field.apply_multiplier(multipliers::bracket(s))?;
    mixed_space_norm(&g, r, r)
}

/// ‖⟨∇_y⟩^{s−1/q} f‖_{H^{1/q}}, with ∇_y acting on the last `k` coordinates.
pub fn partial_sobolev_norm<T: Real>(field: &SpectralField<T>, s: T, q: Exponent<T>, k: usize) -> Result<T> {
    let lat = field.lattice();
    if k == 0 || k > lat.d() {
        return Err(domain(format!("split index k={k} out of range for d={}", lat.d())));
    }
    let iq = q.recip();
    if s < iq || s > T::one() + iq {
        tracing::warn!(s = s.to_f64_lossy(), inv_q = iq.to_f64_lossy(), "partial regularity index outside [1/q, 1+1/q]");
    }
    let w: Vec<T> = lat
        .points()
        .zip(field.coeffs())
        .map(|(p, a)| {
            let ny: i64 = p.xi[lat.d() - k..].iter().map(|&c| (c as i64) * (c as i64)).sum();
            (T::one() + T::of_int(ny)).powf(s - iq) * (T::one() + T::of_int(p.norm_sq)).powf(iq) * a.norm_sqr()
        })
        .collect();
    Ok(compensated_sum(w).sqrt())
}

/// ℓ^α norm of the singular values.
pub fn schatten_norm<T: Real>(op: &CMatrix<T>, alpha: Exponent<T>) -> Result<T> {
    if !alpha.at_least(T::one()) {
        return Err(domain(format!("Schatten exponent {alpha} below 1")));
    }
    let s = T::singular_values(op)?;
    Ok(lp_norm(&s, alpha))
}

/// Nonzero singular values of ⟨∇⟩^s γ ⟨∇⟩^s for γ = Σ λ_j |f_j⟩⟨f_j|, λ_j ≥ 0.
///
/// With B the matrix of weighted frames scaled by √λ_j, the operator is BB*
/// and its singular values are the eigenvalues of the small Gram matrix B*B.
pub fn sobolev_schatten_spectrum<T: Real>(gamma: &OrthonormalEnsemble<T>, s: T) -> Result<Vec<T>> {
    if gamma.weights().iter().any(|&l| l < T::zero()) {
        return Err(domain("Sobolev-Schatten norm needs non-negative weights"));
    }
    let lat = gamma.lattice();
    let weight: Vec<T> = lat.points().map(|p| (T::one() + T::of_int(p.norm_sq)).powf(s / T::lit(2.0))).collect();
    let cols: Vec<Vec<C<T>>> = gamma
        .frames()
        .iter()
        .zip(gamma.weights())
        .map(|(f, &l)| f.iter().zip(&weight).map(|(&a, &w)| a * (w * l.sqrt())).collect())
        .collect();
    let g = crate::linalg::gram(&cols);
    let (values, _) = T::hermitian_eigen(&g)?;
    let mut out: Vec<T> = values.into_iter().map(|v| v.max(T::zero())).collect();
    out.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(out)
}

/// ‖⟨∇⟩^s γ ⟨∇⟩^s‖_{S^{α′}}
pub fn sobolev_schatten_norm<T: Real>(gamma: &OrthonormalEnsemble<T>, alpha_prime: Exponent<T>, s: T) -> Result<T> {
    if !alpha_prime.at_least(T::one()) {
        return Err(domain(format!("Schatten exponent {alpha_prime} below 1")));
    }
    Ok(lp_norm(&sobolev_schatten_spectrum(gamma, s)?, alpha_prime))
}
