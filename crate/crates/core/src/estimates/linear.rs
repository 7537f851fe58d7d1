//! Single-function probes: fixed-time decay and Strichartz ratios.

use rayon::prelude::*;

use crate::admissibility::AdmissibleTriple;
use crate::error::{domain, Error, Result};
use crate::field::{multipliers, SpectralField};
use crate::norms::{mixed_lebesgue, mixed_space_norm, sobolev_norm, time_lebesgue};
use crate::scalar::{Exponent, Real};
use crate::trajectory::TimeGrid;

/// β(r, r̃) = (d−k)(½ − 1/r) + k(½ − 1/r̃).
pub fn decay_exponent<T: Real>(d: usize, k: usize, r: Exponent<T>, rt: Exponent<T>) -> T {
    let half = T::lit(0.5);
    T::of_int((d - k) as i64) * (half - r.recip()) + T::of_int(k as i64) * (half - rt.recip())
}

/// P_{≤N} with the cube cutoff; N need not be dyadic.
pub fn cube_projection<T: Real>(f: &SpectralField<T>, n: usize) -> SpectralField<T> {
    f.apply_multiplier(multipliers::cube(n)).expect("indicator is finite")
}

/// ‖e^{−itΔ}P_{≤N}f‖_{L^r_x L^{r̃}_y} |t|^β / ‖f‖_{L^{r′}_x L^{r̃′}_y}.
pub fn fixed_time_decay_ratio<T: Real>(f: &SpectralField<T>, t: T, n: usize, r: Exponent<T>, rt: Exponent<T>) -> Result<T> {
    let two = T::lit(2.0);
    if !(rt.at_least(two) && r.recip() <= rt.recip()) {
        return Err(domain(format!("fixed-time decay needs 2 ≤ r̃ ≤ r ≤ ∞, got ({r}, {rt})")));
    }
    let half_window = T::one() / T::of_int(2 * n as i64);
    if t == T::zero() || t.abs() > half_window {
        return Err(domain(format!("time {t} outside 0 < |t| ≤ 1/(2N) for N={n}")));
    }
    let lat = f.lattice();
    let beta = decay_exponent(lat.d(), lat.k(), r, rt);
    let g = cube_projection(f, n).free_propagate(t);
    let num = mixed_space_norm(&g, r, rt)? * t.abs().powf(beta);
    let den = mixed_space_norm(f, r.conjugate(), rt.conjugate())?;
    if den == T::zero() {
        return Err(Error::UndefinedRatio);
    }
    Ok(num / den)
}

/// Mixed norm of the free evolution at each time of `grid`.
pub fn free_mixed_norms<T: Real>(f: &SpectralField<T>, grid: &TimeGrid<T>, r: Exponent<T>, rt: Exponent<T>) -> Vec<T> {
    grid.times.par_iter().map(|&t| mixed_lebesgue(f.grid(), &f.free_propagate(t).moduli(), r, rt)).collect()
}

/// ‖e^{−itΔ}f‖_{L^q_t(I) L^r_x L^{r̃}_y} for I the span of `grid`.
pub fn free_spacetime_norm<T: Real>(f: &SpectralField<T>, grid: &TimeGrid<T>, q: Exponent<T>, r: Exponent<T>, rt: Exponent<T>) -> Result<T> {
    time_lebesgue(&grid.weights, &free_mixed_norms(f, grid, r, rt), q)
}

fn require_strichartz<T: Real>(triple: &AdmissibleTriple<T>) -> Result<()> {
    if !triple.strichartz_admissible() {
        return Err(Error::Inadmissible(format!(
            "({}, {}, {}) fails the scaling condition or the range 2 ≤ r̃ ≤ r < ∞, 2 < q ≤ ∞",
            triple.q, triple.r, triple.rt
        )));
    }
    Ok(())
}

/// ‖e^{−itΔ}f‖_{L^q_t(𝕋) L^r_x L^{r̃}_y} / ‖f‖_{H^{1/q}} with `samples` equally
/// spaced times on 𝕋 (default: four times the Nyquist count).
pub fn strichartz_ratio<T: Real>(f: &SpectralField<T>, triple: &AdmissibleTriple<T>, samples: Option<usize>) -> Result<T> {
    require_strichartz(triple)?;
    check_split(f, triple)?;
    let lat = f.lattice();
    let n_t = samples.unwrap_or_else(|| TimeGrid::<T>::torus_samples(lat.d(), lat.n()));
    let grid = TimeGrid::periodic(T::zero(), T::one(), n_t)?;
    let num = free_spacetime_norm(f, &grid, triple.q, triple.r, triple.rt)?;
    let den = sobolev_norm(f, triple.q.recip());
    if den == T::zero() {
        return Err(Error::UndefinedRatio);
    }
    Ok(num / den)
}

fn check_split<T: Real>(f: &SpectralField<T>, triple: &AdmissibleTriple<T>) -> Result<()> {
    if f.lattice().d() != triple.d || f.lattice().k() != triple.k {
        return Err(Error::Mismatch(format!(
            "field split ({}, {}) differs from triple split ({}, {})",
            f.lattice().d(),
            f.lattice().k(),
            triple.d,
            triple.k
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizedRatio<T> {
    /// ‖e^{−itΔ}P_{≤N}f‖_{L^q(I_N)…} / ‖f‖_{L²}
    pub localized: T,
    /// ‖e^{−itΔ}P_{≤N}f‖_{L^q(𝕋)…} / (N^{1/q}‖f‖_{L²})
    pub global: T,
    /// |I_N| = 1/N.
    pub window: T,
}

/// Frequency-localized ratios on I_N = [−1/(2N), 1/(2N)] and on 𝕋.
pub fn localized_strichartz_ratio<T: Real>(f: &SpectralField<T>, n: usize, triple: &AdmissibleTriple<T>) -> Result<LocalizedRatio<T>> {
    require_strichartz(triple)?;
    check_split(f, triple)?;
    if n == 0 {
        return Err(domain("N must be at least 1"));
    }
    let lat = f.lattice();
    let band = lat.n().min(n);
    let torus = TimeGrid::<T>::torus_samples(lat.d(), band);
    let half = T::one() / T::of_int(2 * n as i64);
    let local_grid = TimeGrid::trapezoid(-half, half, torus.div_ceil(n).max(16))?;
    let global_grid = TimeGrid::periodic(T::zero(), T::one(), torus)?;
    let g = cube_projection(f, n);
    let l2 = f.l2_norm();
    if l2 == T::zero() {
        return Err(Error::UndefinedRatio);
    }
    let localized = free_spacetime_norm(&g, &local_grid, triple.q, triple.r, triple.rt)? / l2;
    let global = free_spacetime_norm(&g, &global_grid, triple.q, triple.r, triple.rt)?
        / (T::of_int(n as i64).powf(triple.q.recip()) * l2);
    Ok(LocalizedRatio { localized, global, window: T::one() / T::of_int(n as i64) })
}
