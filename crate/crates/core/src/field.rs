use std::sync::{Arc, OnceLock};

use crate::error::{mismatch, Error, Result};
use crate::grid::TorusGrid;
use crate::lattice::{FrequencyLattice, Point};
use crate::linalg::{inner, norm2};
use crate::scalar::{cis_turns, phase_turns, Real, C};

/// A band-limited function on the torus, held as Fourier coefficients on a
/// lattice with grid samples synthesized on demand.
#[derive(Debug, Clone)]
pub struct SpectralField<T: Real> {
    lattice: Arc<FrequencyLattice>,
    grid: TorusGrid<T>,
    coeffs: Vec<C<T>>,
    samples: OnceLock<Vec<C<T>>>,
}

impl<T: Real> SpectralField<T> {
    pub fn from_coeffs(lattice: Arc<FrequencyLattice>, grid: TorusGrid<T>, coeffs: Vec<C<T>>) -> Result<Self> {
        grid.check_resolves(&lattice)?;
        if coeffs.len() != lattice.len() {
            return Err(mismatch(format!("{} coefficients for a lattice of {}", coeffs.len(), lattice.len())));
        }
        Ok(Self { lattice, grid, coeffs, samples: OnceLock::new() })
    }

    /// Projects grid samples onto the lattice band.
    pub fn from_samples(lattice: Arc<FrequencyLattice>, grid: TorusGrid<T>, samples: &[C<T>]) -> Result<Self> {
        let coeffs = grid.analyze(&lattice, samples)?;
        Self::from_coeffs(lattice, grid, coeffs)
    }

    pub fn zeros(lattice: Arc<FrequencyLattice>, grid: TorusGrid<T>) -> Result<Self> {
        let n = lattice.len();
        Self::from_coeffs(lattice, grid, vec![C::new(T::zero(), T::zero()); n])
    }

    /// amplitude · e^{2πi ξ·z}
    pub fn plane_wave(lattice: Arc<FrequencyLattice>, grid: TorusGrid<T>, xi: &[i32], amplitude: C<T>) -> Result<Self> {
        let idx = lattice
            .index_of(xi)
            .ok_or_else(|| Error::Domain(format!("frequency {xi:?} lies outside the lattice")))?;
        let mut f = Self::zeros(lattice, grid)?;
        f.coeffs[idx] = amplitude;
        Ok(f)
    }

    pub fn constant(lattice: Arc<FrequencyLattice>, grid: TorusGrid<T>, value: C<T>) -> Result<Self> {
        let zero = vec![0; lattice.d()];
        Self::plane_wave(lattice, grid, &zero, value)
    }

    pub fn lattice(&self) -> &FrequencyLattice {
        &self.lattice
    }

    pub fn lattice_arc(&self) -> &Arc<FrequencyLattice> {
        &self.lattice
    }

    pub fn grid(&self) -> &TorusGrid<T> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[C<T>] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C<T>> {
        self.coeffs
    }

    /// Grid samples, synthesized once and cached.
    pub fn samples(&self) -> &[C<T>] {
        self.samples.get_or_init(|| {
            self.grid.synthesize(&self.lattice, &self.coeffs).expect("resolution checked at construction")
        })
    }

    pub fn moduli(&self) -> Vec<T> {
        self.samples().iter().map(|z| z.norm()).collect()
    }

    fn with_coeffs(&self, coeffs: Vec<C<T>>) -> Self {
        Self { lattice: self.lattice.clone(), grid: self.grid.clone(), coeffs, samples: OnceLock::new() }
    }

    pub fn map_coeffs(&self, f: impl Fn(Point<'_>, C<T>) -> C<T>) -> Self {
        let coeffs = self.lattice.points().zip(&self.coeffs).map(|(p, &a)| f(p, a)).collect();
        self.with_coeffs(coeffs)
    }

    /// L² norm from the coefficients.
    pub fn l2_norm(&self) -> T {
        norm2(&self.coeffs)
    }

    pub fn inner(&self, other: &Self) -> Result<C<T>> {
        self.check_same(other)?;
        Ok(inner(&self.coeffs, &other.coeffs))
    }

    pub fn check_same(&self, other: &Self) -> Result<()> {
        if *self.lattice != *other.lattice || self.grid != other.grid {
            return Err(mismatch("fields live on different lattices or grids"));
        }
        Ok(())
    }

    pub fn scale(&self, c: C<T>) -> Self {
        self.with_coeffs(self.coeffs.iter().map(|&a| a * c).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.with_coeffs(self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| a + b).collect()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.with_coeffs(self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| a - b).collect()))
    }

    /// a(ξ) ↦ e^{2πi t|ξ|²} a(ξ).
    pub fn free_propagate(&self, t: T) -> Self {
        self.map_coeffs(|p, a| a * cis_turns(phase_turns(t, p.norm_sq)))
    }

    /// a(ξ) ↦ m(ξ) a(ξ); rejects non-finite multiplier values.
    pub fn apply_multiplier(&self, m: impl Fn(Point<'_>) -> C<T>) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (p, &a) in self.lattice.points().zip(&self.coeffs) {
            let v = m(p);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::Numeric(format!("multiplier is not finite at {:?}", p.xi)));
            }
            coeffs.push(v * a);
        }
        Ok(self.with_coeffs(coeffs))
    }

    /// Re-expresses the field on another lattice of the same split: modes
    /// outside the target cube are dropped, new modes are zero.
    pub fn to_lattice(&self, lattice: Arc<FrequencyLattice>) -> Result<Self> {
        if !lattice.same_split(&self.lattice) {
            return Err(mismatch("lattice splits differ"));
        }
        let mut coeffs = vec![C::new(T::zero(), T::zero()); lattice.len()];
        for p in self.lattice.points() {
            if let Some(j) = lattice.index_of(p.xi) {
                coeffs[j] = self.coeffs[p.index];
            }
        }
        Self::from_coeffs(lattice, self.grid.clone(), coeffs)
    }

    /// Same coefficients sampled on another grid of the same split.
    pub fn to_grid(&self, grid: TorusGrid<T>) -> Result<Self> {
        Self::from_coeffs(self.lattice.clone(), grid, self.coeffs.clone())
    }

    /// Largest deviation from conjugate symmetry a(−ξ) = conj a(ξ).
    pub fn reality_defect(&self) -> T {
        let n = self.coeffs.len();
        (0..n).fold(T::zero(), |m, i| {
            let j = self.lattice.mirror(i);
            m.max((self.coeffs[j] - self.coeffs[i].conj()).norm())
        })
    }
}

pub fn synthesize<T: Real>(lattice: Arc<FrequencyLattice>, grid: TorusGrid<T>, coeffs: Vec<C<T>>) -> Result<SpectralField<T>> {
    let f = SpectralField::from_coeffs(lattice, grid, coeffs)?;
    f.samples();
    Ok(f)
}

pub fn analyze<T: Real>(field: &SpectralField<T>) -> Result<Vec<C<T>>> {
    field.grid().analyze(field.lattice(), field.samples())
}

pub fn free_propagate<T: Real>(field: &SpectralField<T>, t: T) -> SpectralField<T> {
    field.free_propagate(t)
}

pub fn apply_multiplier<T: Real>(field: &SpectralField<T>, m: impl Fn(Point<'_>) -> C<T>) -> Result<SpectralField<T>> {
    field.apply_multiplier(m)
}

/// Standard Fourier multipliers.
pub mod multipliers {
    use super::*;

    /// ⟨∇⟩^s: (1+|ξ|²)^{s/2}
    pub fn bracket<T: Real>(s: T) -> impl Fn(Point<'_>) -> C<T> {
        move |p| C::new((T::one() + T::of_int(p.norm_sq)).powf(s / T::lit(2.0)), T::zero())
    }

    /// ⟨∇_y⟩^s: (1+|ξ₂|²)^{s/2}
    pub fn bracket_y<T: Real>(s: T) -> impl Fn(Point<'_>) -> C<T> {
        move |p| C::new((T::one() + T::of_int(p.norm_sq_y)).powf(s / T::lit(2.0)), T::zero())
    }

    /// |∇|^s: |ξ|^s, with value 0 at ξ = 0 unless s = 0.
    pub fn homogeneous<T: Real>(s: T) -> impl Fn(Point<'_>) -> C<T> {
        move |p| {
            let v = if p.norm_sq == 0 {
                if s == T::zero() {
                    T::one()
                } else {
                    T::zero()
                }
            } else {
                T::of_int(p.norm_sq).sqrt().powf(s)
            };
            C::new(v, T::zero())
        }
    }

    /// Indicator of the cube max|ξ_i| ≤ n.
    pub fn cube<T: Real>(n: usize) -> impl Fn(Point<'_>) -> C<T> {
        move |p| {
            let v = if p.max_abs() as usize <= n { T::one() } else { T::zero() };
            C::new(v, T::zero())
        }
    }
}
