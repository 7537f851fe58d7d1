//! Seeded random inputs. Every draw is a pure function of (seed, stream), so
//! sweeps give identical results regardless of how work is scheduled.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::field::SpectralField;
use crate::grid::TorusGrid;
use crate::lattice::FrequencyLattice;
use crate::scalar::{Real, C};

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn complex_normal<T: Real>(rng: &mut impl Rng) -> C<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C::new(T::lit(re), T::lit(im))
}

/// Independent standard complex Gaussian coefficients on every lattice point.
pub fn gaussian_field<T: Real>(
    lattice: Arc<FrequencyLattice>,
    grid: TorusGrid<T>,
    rng: &mut impl Rng,
) -> Result<SpectralField<T>> {
    let coeffs = (0..lattice.len()).map(|_| complex_normal(rng)).collect();
    SpectralField::from_coeffs(lattice, grid, coeffs)
}

/// Gaussian coefficients restricted to points where `keep` holds.
pub fn gaussian_field_on<T: Real>(
    lattice: Arc<FrequencyLattice>,
    grid: TorusGrid<T>,
    rng: &mut impl Rng,
    keep: impl Fn(crate::lattice::Point<'_>) -> bool,
) -> Result<SpectralField<T>> {
    let coeffs = lattice
        .points()
        .map(|p| {
            let z = complex_normal(rng);
            if keep(p) {
                z
            } else {
                C::new(T::zero(), T::zero())
            }
        })
        .collect();
    SpectralField::from_coeffs(lattice, grid, coeffs)
}

/// Real-valued (conjugate-symmetric) Gaussian field.
pub fn real_gaussian_field<T: Real>(
    lattice: Arc<FrequencyLattice>,
    grid: TorusGrid<T>,
    rng: &mut impl Rng,
) -> Result<SpectralField<T>> {
    let n = lattice.len();
    let mut coeffs = vec![C::new(T::zero(), T::zero()); n];
    for i in 0..n {
        let j = lattice.mirror(i);
        if j < i {
            continue;
        }
        let z: C<T> = complex_normal(rng);
        if i == j {
            coeffs[i] = C::new(z.re, T::zero());
        } else {
            coeffs[i] = z;
            coeffs[j] = z.conj();
        }
    }
    SpectralField::from_coeffs(lattice, grid, coeffs)
}
