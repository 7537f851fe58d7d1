//! Multiplication by a real potential, compressed to the frequency band.

use crate::error::{Error, Result};
use crate::grid::TorusGrid;
use crate::lattice::FrequencyLattice;
use crate::linalg::{hermitian_propagator, CMatrix};
use crate::scalar::{Real, C};

/// Fourier coefficients V̂(ζ) = ŵ(ζ)·ρ̂(ζ) of a convolution potential w ∗ ρ,
/// where ŵ lives on the band lattice and ρ is sampled on `grid`. Returned
/// as a lookup over the M^d bins of the grid.
pub fn convolution_potential<T: Real>(
    w_lattice: &FrequencyLattice,
    w_hat: &[C<T>],
    grid: &TorusGrid<T>,
    rho_samples: &[C<T>],
) -> Result<Vec<C<T>>> {
    let rho_hat = grid.analyze_full(rho_samples)?;
    let mut out = vec![C::new(T::zero(), T::zero()); grid.len()];
    for p in w_lattice.points() {
        let b = grid.bin_of(p.xi);
        out[b] = w_hat[p.index] * rho_hat[b];
    }
    Ok(out)
}

/// Matrix of u ↦ P(V u) on the band: H_{ξη} = V̂(ξ − η). Differences reach
/// 2N, so M ≥ 3N + 1 keeps them apart from the band-N potential modes.
pub fn band_matrix<T: Real>(lattice: &FrequencyLattice, grid: &TorusGrid<T>, v_hat: &[C<T>]) -> Result<CMatrix<T>> {
    let needed = 3 * lattice.n() + 1;
    if grid.m() < needed {
        return Err(Error::Aliasing { m: grid.m(), n: lattice.n(), needed });
    }
    let n = lattice.len();
    let mut diff = vec![0i32; lattice.d()];
    Ok(CMatrix::from_fn(n, n, |i, j| {
        for ((dst, a), b) in diff.iter_mut().zip(lattice.xi(i)).zip(lattice.xi(j)) {
            *dst = a - b;
        }
        v_hat[grid.bin_of(&diff)]
    }))
}

/// Symmetrizes a nearly Hermitian matrix, removing round-off asymmetry.
pub fn hermitian_part<T: Real>(h: &CMatrix<T>) -> CMatrix<T> {
    let half = T::lit(0.5);
    let adj = h.adjoint();
    h.map(|i, j, v| (v + adj[(i, j)]) * half)
}

/// exp(−iτ P V P) for the band compression of a real potential.
pub fn potential_propagator<T: Real>(lattice: &FrequencyLattice, grid: &TorusGrid<T>, v_hat: &[C<T>], tau: T) -> Result<CMatrix<T>> {
    hermitian_propagator(&hermitian_part(&band_matrix(lattice, grid, v_hat)?), tau)
}
