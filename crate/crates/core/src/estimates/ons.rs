//! Densities of orthonormal systems under the free flow.

use rayon::prelude::*;

use crate::admissibility::{AdmissibleTriple, ExponentScalar};
use crate::ensemble::OrthonormalEnsemble;
use crate::error::{Error, Result};
use crate::norms::{lp_norm, time_lebesgue, GridFunction};
use crate::scalar::{Exponent, Real};
use crate::trajectory::TimeGrid;

/// ρ(t, z) = Σ_j λ_j |e^{−itΔ} f_j(z)|² (frames are already on the band).
pub fn ons_density<T: Real>(ensemble: &OrthonormalEnsemble<T>, t: T) -> GridFunction<T> {
    ensemble.free_propagate(t).density()
}

/// ‖ρ‖_{L^q_t(I) L^r_x L^{r̃}_y} over the times of `grid`.
pub fn density_spacetime_norm<T: Real>(ensemble: &OrthonormalEnsemble<T>, grid: &TimeGrid<T>, triple: &AdmissibleTriple<T>) -> Result<T> {
    let norms: Vec<T> = grid
        .times
        .par_iter()
        .map(|&t| ons_density(ensemble, t).mixed_norm(triple.r, triple.rt))
        .collect::<Result<_>>()?;
    time_lebesgue(&grid.weights, &norms, triple.q)
}

/// ‖ρ‖_{L^q_t(𝕋) L^r_x L^{r̃}_y} / (N^{1/q} ‖λ‖_{ℓ^{α′}}), without checking
/// the hypotheses (used to report exponents above the proven range).
pub fn ons_strichartz_ratio_unchecked<T: Real>(
    ensemble: &OrthonormalEnsemble<T>,
    triple: &AdmissibleTriple<T>,
    alpha_prime: T,
    samples: Option<usize>,
) -> Result<T> {
    let lat = ensemble.lattice();
    if lat.d() != triple.d || lat.k() != triple.k {
        return Err(Error::Mismatch("ensemble split differs from the triple".into()));
    }
    let n_t = samples.unwrap_or_else(|| TimeGrid::<T>::torus_samples(lat.d(), lat.n()));
    let grid = TimeGrid::periodic(T::zero(), T::one(), n_t)?;
    let num = density_spacetime_norm(ensemble, &grid, triple)?;
    let lam = lp_norm(ensemble.weights(), Exponent::Finite(alpha_prime));
    if lam == T::zero() {
        return Err(Error::UndefinedRatio);
    }
    Ok(num / (T::of_int(lat.n() as i64).powf(triple.q.recip()) * lam))
}

/// Orthonormal Strichartz ratio; requires the sharp condition, the γ bound
/// and 1 ≤ α′ ≤ 2γ/(γ+1).
pub fn ons_strichartz_ratio<T: Real>(
    ensemble: &OrthonormalEnsemble<T>,
    triple: &AdmissibleTriple<T>,
    alpha_prime: T,
    samples: Option<usize>,
) -> Result<T> {
    if !triple.orthonormal_admissible(&alpha_prime) {
        return Err(Error::Inadmissible(format!(
            "({}, {}, {}) with α′={} is outside the orthonormal range (sharp={}, γ bound={}, α′ max={})",
            triple.q,
            triple.r,
            triple.rt,
            alpha_prime,
            triple.sharp,
            triple.gamma_below_threshold,
            triple.alpha_prime.as_f64()
        )));
    }
    ons_strichartz_ratio_unchecked(ensemble, triple, alpha_prime, samples)
}
