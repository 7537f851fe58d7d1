use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::DensityMatrix;
use crate::error::{domain, mismatch, Error, Result};
use crate::grid::TorusGrid;
use crate::lattice::FrequencyLattice;
use crate::linalg::CMatrix;
use crate::meanfield::band_matrix;
use crate::nls::{PicardHistory, PotentialSpec};
use crate::norms::{lp_norm, mixed_lebesgue, time_lebesgue};
use crate::scalar::{cis_turns, phase_turns, Exponent, Real, C};
use crate::trajectory::TimeGrid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorPicardConfig<T> {
    /// Time samples on [0, T], endpoints included.
    pub n_t: usize,
    pub max_picard: usize,
    pub tol: T,
    pub alpha_prime: T,
    pub s: T,
    /// (q, r, r̃) for the density part of the update norm.
    pub triple: [Exponent<T>; 3],
}

impl<T: Real> OperatorPicardConfig<T> {
    pub fn new(n_t: usize) -> Self {
        let q = T::lit(4.0);
        Self {
            n_t,
            max_picard: 50,
            tol: T::lit(1e-12),
            alpha_prime: T::lit(2.0) * q / (q + T::one()),
            s: T::lit(0.75),
            triple: [Exponent::Finite(q), Exponent::Finite(T::lit(2.0)), Exponent::Finite(T::lit(2.0))],
        }
    }
}

#[derive(Debug, Clone)]
pub struct OperatorPicardSolution<T: Real> {
    pub grid: TimeGrid<T>,
    /// γ(t_n) as band matrices.
    pub gammas: Vec<CMatrix<T>>,
    /// ρ(t_n) on the spatial grid.
    pub densities: Vec<Vec<T>>,
    pub history: PicardHistory<T>,
}

struct Setup<'a, T: Real> {
    lattice: &'a FrequencyLattice,
    grid: &'a TorusGrid<T>,
    doubled: Arc<FrequencyLattice>,
    w_hat: &'a [C<T>],
}

impl<T: Real> Setup<'_, T> {
    /// ρ̂(ζ) = Σ_{ξ−η=ζ} γ_{ξη} on the doubled band.
    fn density_hat(&self, g: &CMatrix<T>) -> Vec<C<T>> {
        let mut out = vec![C::new(T::zero(), T::zero()); self.doubled.len()];
        let mut diff = vec![0i32; self.lattice.d()];
        for i in 0..self.lattice.len() {
            for j in 0..self.lattice.len() {
                for ((dst, a), b) in diff.iter_mut().zip(self.lattice.xi(i)).zip(self.lattice.xi(j)) {
                    *dst = a - b;
                }
                let z = self.doubled.index_of(&diff).expect("difference lies in the doubled band");
                out[z] = out[z] + g[(i, j)];
            }
        }
        out
    }

    fn density_samples(&self, g: &CMatrix<T>) -> Result<Vec<T>> {
        let s = self.grid.synthesize(&self.doubled, &self.density_hat(g))?;
        Ok(s.into_iter().map(|z| z.re).collect())
    }

    /// P(w ∗ ρ_γ)P
    fn potential(&self, g: &CMatrix<T>) -> Result<CMatrix<T>> {
        let rho_hat = self.density_hat(g);
        let mut v_hat = vec![C::new(T::zero(), T::zero()); self.grid.len()];
        for p in self.lattice.points() {
            let z = self.doubled.index_of(p.xi).expect("band inside doubled band");
            v_hat[self.grid.bin_of(p.xi)] = self.w_hat[p.index] * rho_hat[z];
        }
        band_matrix(self.lattice, self.grid, &v_hat)
    }

    /// e^{−iτ(−Δ)} A e^{iτ(−Δ)}
    fn conjugate(&self, a: &CMatrix<T>, tau: T) -> CMatrix<T> {
        let lat = self.lattice;
        a.map(|i, j, v| v * cis_turns(-phase_turns(tau, lat.norm_sq(i) - lat.norm_sq(j))))
    }

    fn sobolev_schatten(&self, a: &CMatrix<T>, alpha: T, s: T) -> Result<T> {
        let wts: Vec<T> = self.lattice.points().map(|p| (T::one() + T::of_int(p.norm_sq)).powf(s / T::lit(2.0))).collect();
        let b = a.map(|i, j, v| v * (wts[i] * wts[j]));
        Ok(lp_norm(&T::singular_values(&b)?, Exponent::Finite(alpha)))
    }
}

fn commutator<T: Real>(v: &CMatrix<T>, g: &CMatrix<T>) -> Result<CMatrix<T>> {
    v.matmul(g)?.sub(&g.matmul(v)?)
}

/// Φ₁(γ)(t_n) = S(t_n) − i∫₀^{t_n} e^{−i(t_n−t′)(−Δ)}[w ∗ ρ(t′), γ(t′)]e^{i(t_n−t′)(−Δ)}dt′
/// with the cumulative trapezoid rule, ρ being the density of the input.
fn phi<T: Real>(setup: &Setup<'_, T>, grid: &TimeGrid<T>, free: &[CMatrix<T>], gammas: &[CMatrix<T>]) -> Result<Vec<CMatrix<T>>> {
    let comms: Vec<CMatrix<T>> = gammas.par_iter().map(|g| commutator(&setup.potential(g)?, g)).collect::<Result<_>>()?;
    let minus_i = C::new(T::zero(), -T::one());
    let mut out = Vec::with_capacity(gammas.len());
    let mut acc = CMatrix::zeros(gammas[0].rows(), gammas[0].cols());
    out.push(free[0].clone());
    for n in 1..gammas.len() {
        let h = grid.times[n] - grid.times[n - 1];
        let half = C::new(h / T::lit(2.0), T::zero());
        acc = setup.conjugate(&acc.add(&comms[n - 1].scale(half))?, h).add(&comms[n].scale(half))?;
        out.push(free[n].add(&acc.scale(minus_i))?);
    }
    Ok(out)
}

/// Fixed point of the pair map (γ, ρ) ↦ (Φ₁(γ, ρ), ρ[Φ₁(γ, ρ)]) on [0, T],
/// iterated from the free conjugation flow. The update is measured by
/// max_t ‖⟨∇⟩^s Δγ ⟨∇⟩^s‖_{S^{α′}} + ‖Δρ‖_{L^q_t L^r_x L^{r̃}_y}.
pub fn picard_operator_solve<T: Real>(
    gamma0: &DensityMatrix<T>,
    w: &PotentialSpec<T>,
    t_final: T,
    config: &OperatorPicardConfig<T>,
) -> Result<OperatorPicardSolution<T>> {
    if config.n_t < 2 || !(config.tol > T::zero()) || config.max_picard == 0 {
        return Err(domain("need at least two time samples, a positive tolerance and one iteration"));
    }
    if !(t_final > T::zero()) {
        return Err(domain("final time must be positive"));
    }
    let ens = gamma0.ensemble();
    if *ens.lattice() != *w.w.lattice() || ens.grid() != w.w.grid() {
        return Err(mismatch("potential and state live on different bands or grids"));
    }
    let lat = ens.lattice();
    let doubled = Arc::new(FrequencyLattice::new(lat.d(), lat.k(), 2 * lat.n())?);
    ens.grid().check_resolves(&doubled)?;
    let setup = Setup { lattice: lat, grid: ens.grid(), doubled, w_hat: w.hat() };
    let grid = TimeGrid::trapezoid(T::zero(), t_final, config.n_t - 1)?;
    let g0 = gamma0.to_matrix();
    let free: Vec<CMatrix<T>> = grid.times.iter().map(|&t| setup.conjugate(&g0, t)).collect();
    let [q, r, rt] = config.triple;

    let mut gammas = free.clone();
    let mut densities: Vec<Vec<T>> = gammas.par_iter().map(|g| setup.density_samples(g)).collect::<Result<_>>()?;
    let mut history = PicardHistory { distances: Vec::new(), ratios: Vec::new(), converged: false, certificate: None };
    let mut streak = 0;
    let distance = |a: &[CMatrix<T>], b: &[CMatrix<T>], ra: &[Vec<T>], rb: &[Vec<T>]| -> Result<T> {
        let ss = a
            .par_iter()
            .zip(b)
            .map(|(x, y)| setup.sobolev_schatten(&x.sub(y)?, config.alpha_prime, config.s))
            .collect::<Result<Vec<T>>>()?
            .into_iter()
            .fold(T::zero(), T::max);
        let per_time: Vec<T> = ra
            .iter()
            .zip(rb)
            .map(|(x, y)| {
                let diff: Vec<T> = x.iter().zip(y).map(|(&u, &v)| (u - v).abs()).collect();
                mixed_lebesgue(setup.grid, &diff, r, rt)
            })
            .collect();
        Ok(ss + time_lebesgue(&grid.weights, &per_time, q)?)
    };
    for _ in 0..config.max_picard {
        let next = phi(&setup, &grid, &free, &gammas)?;
        if next.iter().any(|g| g.as_slice().iter().any(|c| !(c.re.is_finite() && c.im.is_finite()))) {
            return Err(Error::Numeric("operator Picard produced non-finite entries".into()));
        }
        let next_rho: Vec<Vec<T>> = next.par_iter().map(|g| setup.density_samples(g)).collect::<Result<_>>()?;
        let dist = distance(&next, &gammas, &next_rho, &densities)?;
        if let Some(&prev) = history.distances.last() {
            if prev > T::zero() {
                let ratio = dist / prev;
                history.ratios.push(ratio);
                streak = if ratio >= T::one() { streak + 1 } else { 0 };
                if streak >= 3 {
                    return Err(Error::Divergence { ratio: ratio.to_f64_lossy(), streak });
                }
            }
        }
        history.distances.push(dist);
        gammas = next;
        densities = next_rho;
        if dist < config.tol {
            history.converged = true;
            break;
        }
    }
    Ok(OperatorPicardSolution { grid, gammas, densities, history })
}

/// Relative L²_{t,z} distance between two sampled density histories.
pub fn rho_l2_distance<T: Real>(weights: &[T], a: &[Vec<T>], b: &[Vec<T>]) -> Result<T> {
    if a.len() != b.len() || a.len() != weights.len() {
        return Err(mismatch("density histories differ in length"));
    }
    let mut num = T::zero();
    let mut den = T::zero();
    for ((x, y), &w) in a.iter().zip(b).zip(weights) {
        if x.len() != y.len() {
            return Err(mismatch("density samples differ in size"));
        }
        let n = T::of_int(x.len() as i64);
        num = num + w * x.iter().zip(y).map(|(&u, &v)| (u - v) * (u - v)).sum::<T>() / n;
        den = den + w * x.iter().map(|&u| u * u).sum::<T>() / n;
    }
    if den == T::zero() {
        return Ok(num.sqrt());
    }
    Ok((num / den).sqrt())
}
