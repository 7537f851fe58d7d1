//! Dyadic frequency projectors and Littlewood–Paley probes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::OrthonormalEnsemble;
use crate::error::{domain, Error, Result};
use crate::field::{multipliers, SpectralField};
use crate::lattice::{FrequencyLattice, Point};
use crate::norms::{mixed_lebesgue, mixed_space_norm, GridFunction};
use crate::scalar::{Exponent, Real, C};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutoffProfile {
    /// Indicator of the cube max|z_i| ≤ 1.
    Sharp,
    /// Radial C^∞ bump equal to 1 on |z| ≤ 1 and 0 on |z| ≥ 2.
    Smooth,
}

impl CutoffProfile {
    pub fn tag(self) -> &'static str {
        match self {
            CutoffProfile::Sharp => "sharp",
            CutoffProfile::Smooth => "smooth",
        }
    }
}

fn bump_h(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// φ(ρ) = h(2−ρ) / (h(2−ρ) + h(ρ−1)) with h(s) = e^{−1/s} for s > 0.
pub fn smooth_phi(rho: f64) -> f64 {
    if rho <= 1.0 {
        return 1.0;
    }
    if rho >= 2.0 {
        return 0.0;
    }
    let a = bump_h(2.0 - rho);
    let b = bump_h(rho - 1.0);
    a / (a + b)
}

/// η(ξ/N) for the chosen profile.
pub fn cutoff<T: Real>(profile: CutoffProfile, p: Point<'_>, n: usize) -> T {
    match profile {
        CutoffProfile::Sharp => {
            if p.max_abs() as usize <= n {
                T::one()
            } else {
                T::zero()
            }
        }
        CutoffProfile::Smooth => T::lit(smooth_phi((p.norm_sq as f64).sqrt() / n as f64)),
    }
}

/// ψ_N(ξ) = η(ξ/N) − η(2ξ/N) for N > 1, ψ_1 = η.
pub fn shell<T: Real>(profile: CutoffProfile, p: Point<'_>, n: usize) -> T {
    if n == 1 {
        cutoff(profile, p, 1)
    } else {
        cutoff::<T>(profile, p, n) - cutoff::<T>(profile, p, n / 2)
    }
}

fn check_dyadic(n: usize) -> Result<()> {
    if n == 0 || !n.is_power_of_two() {
        return Err(domain(format!("level {n} is not a dyadic integer ≥ 1")));
    }
    Ok(())
}

/// 1, 2, 4, …, n_max.
pub fn dyadic_levels(n_max: usize) -> Result<Vec<usize>> {
    check_dyadic(n_max)?;
    Ok((0..=n_max.trailing_zeros()).map(|e| 1usize << e).collect())
}

/// Smallest dyadic level whose cutoff equals 1 on the whole lattice.
pub fn covering_level(lattice: &FrequencyLattice, profile: CutoffProfile) -> usize {
    let reach = match profile {
        CutoffProfile::Sharp => lattice.n() as f64,
        CutoffProfile::Smooth => (lattice.max_norm_sq() as f64).sqrt(),
    };
    let mut n = 1usize;
    while (n as f64) < reach {
        n *= 2;
    }
    n
}

pub fn project_leq<T: Real>(field: &SpectralField<T>, n: usize, profile: CutoffProfile) -> Result<SpectralField<T>> {
    check_dyadic(n)?;
    field.apply_multiplier(|p| C::new(cutoff(profile, p, n), T::zero()))
}

pub fn project_dyadic<T: Real>(field: &SpectralField<T>, n: usize, profile: CutoffProfile) -> Result<SpectralField<T>> {
    check_dyadic(n)?;
    field.apply_multiplier(|p| C::new(shell(profile, p, n), T::zero()))
}

/// Cached ψ_N values on one lattice.
#[derive(Debug, Clone)]
pub struct ProjectorBank<T> {
    pub profile: CutoffProfile,
    pub levels: Vec<usize>,
    values: Vec<Vec<T>>,
}

impl<T: Real> ProjectorBank<T> {
    pub fn new(lattice: &FrequencyLattice, profile: CutoffProfile, n_max: usize) -> Result<Self> {
        let levels = dyadic_levels(n_max)?;
        let values = levels.iter().map(|&n| lattice.points().map(|p| shell(profile, p, n)).collect()).collect();
        Ok(Self { profile, levels, values })
    }

    /// Bank whose levels telescope to the identity on the lattice.
    pub fn covering(lattice: &FrequencyLattice, profile: CutoffProfile) -> Result<Self> {
        Self::new(lattice, profile, covering_level(lattice, profile))
    }

    pub fn multiplier(&self, level_index: usize) -> &[T] {
        &self.values[level_index]
    }

    pub fn project(&self, field: &SpectralField<T>, level_index: usize) -> SpectralField<T> {
        let v = &self.values[level_index];
        field.map_coeffs(|p, a| a * v[p.index])
    }

    /// Σ_N ψ_N(ξ) per lattice point.
    pub fn partition_sum(&self) -> Vec<T> {
        let n = self.values.first().map_or(0, Vec::len);
        (0..n).map(|i| self.values.iter().fold(T::zero(), |s, v| s + v[i])).collect()
    }
}

/// (Σ_j |f_j|²)^{1/2} on the grid.
pub fn l2_aggregate<T: Real>(fields: &[SpectralField<T>]) -> Result<GridFunction<T>> {
    let first = fields.first().ok_or_else(|| Error::Empty("family".into()))?;
    let mut acc = vec![T::zero(); first.grid().len()];
    for f in fields {
        first.check_same(f)?;
        for (a, z) in acc.iter_mut().zip(f.samples()) {
            *a = *a + z.norm_sqr();
        }
    }
    GridFunction::new(first.grid().clone(), acc.into_iter().map(T::sqrt).collect())
}

fn square_function<T: Real>(field: &SpectralField<T>, bank: &ProjectorBank<T>) -> Result<GridFunction<T>> {
    let parts: Vec<SpectralField<T>> = (0..bank.levels.len()).map(|i| bank.project(field, i)).collect();
    l2_aggregate(&parts)
}

fn check_open_range<T: Real>(r: Exponent<T>, rt: Exponent<T>, floor: T) -> Result<()> {
    let ok = |e: Exponent<T>| matches!(e, Exponent::Finite(v) if v > floor);
    if !(ok(r) && ok(rt)) {
        return Err(domain(format!("exponents ({r}, {rt}) must lie in ({}, ∞)", floor)));
    }
    Ok(())
}

/// ‖(Σ_N |P_N f|²)^{1/2}‖_{L^r_x L^{r̃}_y} over levels covering the band.
pub fn square_function_norm<T: Real>(field: &SpectralField<T>, r: Exponent<T>, rt: Exponent<T>, profile: CutoffProfile) -> Result<T> {
    check_open_range(r, rt, T::one())?;
    let bank = ProjectorBank::covering(field.lattice(), profile)?;
    square_function(field, &bank)?.mixed_norm(r, rt)
}

/// sup over dyadic N ≤ 2·band of N^s ‖P_N f‖_{L^r_x L^{r̃}_y}.
pub fn mixed_besov_norm<T: Real>(field: &SpectralField<T>, s: T, r: Exponent<T>, rt: Exponent<T>, profile: CutoffProfile) -> Result<T> {
    let top = (2 * field.lattice().n()).next_power_of_two();
    let top = if top > 2 * field.lattice().n() { top / 2 } else { top };
    let mut best = T::zero();
    for n in dyadic_levels(top)? {
        let v = mixed_space_norm(&project_dyadic(field, n, profile)?, r, rt)?;
        best = best.max(T::of_int(n as i64).powf(s) * v);
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioRange<T> {
    pub min_ratio: T,
    pub max_ratio: T,
}

impl<T: Real> RatioRange<T> {
    pub fn spread(&self) -> T {
        self.max_ratio / self.min_ratio
    }

    pub fn from_values(values: &[T]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("ratio sample".into()));
        }
        let min_ratio = values.iter().copied().fold(T::infinity(), T::min);
        let max_ratio = values.iter().copied().fold(T::neg_infinity(), T::max);
        Ok(Self { min_ratio, max_ratio })
    }
}

/// Extreme values of ‖Sf‖/‖f‖ over `trials` fields drawn by `sampler(trial)`.
pub fn lp_equivalence_scan<T: Real>(
    sampler: impl Fn(u64) -> Result<SpectralField<T>> + Sync,
    r: Exponent<T>,
    rt: Exponent<T>,
    trials: usize,
    profile: CutoffProfile,
) -> Result<RatioRange<T>> {
    if trials == 0 {
        return Err(domain("scan needs at least one trial"));
    }
    let ratios: Vec<T> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let f = sampler(i)?;
            let num = square_function_norm(&f, r, rt, profile)?;
            let den = mixed_space_norm(&f, r, rt)?;
            if den == T::zero() {
                return Err(Error::UndefinedRatio);
            }
            Ok(num / den)
        })
        .collect::<Result<_>>()?;
    RatioRange::from_values(&ratios)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityLp<T> {
    /// ‖Σ_N Σ_k λ_k |P_N u_k|²‖
    pub shells: T,
    /// ‖Σ_k λ_k |u_k|²‖
    pub density: T,
    /// Set when an exponent lies in (½, 1), where the functional is only a quasi-norm.
    pub quasi_norm: bool,
}

impl<T: Real> DensityLp<T> {
    pub fn ratio(&self) -> T {
        self.shells / self.density
    }
}

/// Both sides of the operator-density Littlewood–Paley equivalence.
pub fn density_square_norm<T: Real>(
    ensemble: &OrthonormalEnsemble<T>,
    r: Exponent<T>,
    rt: Exponent<T>,
    profile: CutoffProfile,
) -> Result<DensityLp<T>> {
    check_open_range(r, rt, T::lit(0.5))?;
    if ensemble.weights().iter().any(|&l| !(l > T::zero())) {
        return Err(domain("density Littlewood-Paley probe needs positive weights"));
    }
    let bank = ProjectorBank::covering(ensemble.lattice(), profile)?;
    let fields = ensemble.fields();
    let grid = ensemble.grid().clone();
    let mut shells = vec![T::zero(); grid.len()];
    for (f, &l) in fields.iter().zip(ensemble.weights()) {
        for i in 0..bank.levels.len() {
            let g = bank.project(f, i);
            for (a, z) in shells.iter_mut().zip(g.samples()) {
                *a = *a + l * z.norm_sqr();
            }
        }
    }
    let rho = ensemble.density();
    let quasi_norm = r.value() < T::one() || rt.value() < T::one();
    Ok(DensityLp {
        shells: mixed_lebesgue(&grid, &shells, r, rt),
        density: mixed_lebesgue(&grid, &rho.values, r, rt),
        quasi_norm,
    })
}

/// ‖(Σ_j |P_N⟨∇⟩^ρ g_j|²)^{1/2}‖ / (N^ρ ‖(Σ_j |P_N g_j|²)^{1/2}‖).
pub fn bernstein_ratio<T: Real>(
    family: &[SpectralField<T>],
    rho: T,
    n: usize,
    r: Exponent<T>,
    rt: Exponent<T>,
    profile: CutoffProfile,
) -> Result<T> {
    let base: Vec<SpectralField<T>> = family.iter().map(|g| project_dyadic(g, n, profile)).collect::<Result<_>>()?;
    let lifted: Vec<SpectralField<T>> =
        base.iter().map(|g| g.apply_multiplier(multipliers::bracket(rho))).collect::<Result<_>>()?;
    let den = l2_aggregate(&base)?.mixed_norm(r, rt)? * T::of_int(n as i64).powf(rho);
    if den == T::zero() {
        return Err(Error::UndefinedRatio);
    }
    Ok(l2_aggregate(&lifted)?.mixed_norm(r, rt)? / den)
}
