use serde::Serialize;

use super::{mean_field_hamiltonian, DensityMatrix, FermionTrajectory, HartreeConfig};
use crate::error::{domain, Result};
use crate::nls::PotentialSpec;
use crate::norms::sobolev_schatten_norm;
use crate::scalar::{compensated_sum, Exponent, Real, C};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConservationRow<T> {
    pub step: usize,
    pub t: T,
    /// Σ λ_j ‖u_j‖²
    pub trace: T,
    /// ∫ρ on the grid.
    pub mass: T,
    pub gram_dev: T,
    /// ‖γ‖_{S^{α′}} from the assembled matrix.
    pub schatten: T,
    /// ‖λ‖_{ℓ^{α′}}
    pub schatten_weights: T,
    pub sobolev_schatten: T,
    /// ‖ρ‖_{L^q_t([0,t]) L^r_x L^{r̃}_y}
    pub rho_mixed_norm_running: T,
    pub energy: T,
}

/// Σ λ_j ⟨u_j, −Δ u_j⟩ + ½ ∫ (w ∗ ρ) ρ with −Δ ↔ 2π|ξ|².
pub fn energy<T: Real>(gamma: &DensityMatrix<T>, w: &PotentialSpec<T>) -> Result<T> {
    let ens = gamma.ensemble();
    let lat = ens.lattice();
    let two_pi = T::lit(2.0) * T::PI();
    let kinetic = compensated_sum(ens.frames().iter().zip(ens.weights()).map(|(f, &l)| {
        l * compensated_sum(lat.points().map(|p| two_pi * T::of_int(p.norm_sq) * f[p.index].norm_sqr()))
    }));
    let rho: Vec<C<T>> = gamma.density().values.into_iter().map(|v| C::new(v, T::zero())).collect();
    let rho_hat = ens.grid().analyze_full(&rho)?;
    let interaction = compensated_sum(lat.points().map(|p| (w.hat()[p.index] * rho_hat[ens.grid().bin_of(p.xi)].norm_sqr()).re));
    Ok(kinetic + interaction / T::lit(2.0))
}

/// Per recorded time: trace, mass, Gram deviation, Schatten norms and the
/// running space-time norm of ρ.
pub fn conservation_report<T: Real>(traj: &FermionTrajectory<T>, config: &HartreeConfig<T>) -> Result<Vec<ConservationRow<T>>> {
    let alpha = Exponent::Finite(config.alpha_prime);
    let [q, r, rt] = config.triple;
    let mut rows = Vec::with_capacity(traj.len());
    let mut acc = T::zero();
    let mut prev: Option<(T, T)> = None;
    for ((&step, &t), gamma) in traj.steps.iter().zip(&traj.times).zip(&traj.states) {
        let rho = gamma.density();
        let a = rho.mixed_norm(r, rt)?;
        let running = match q {
            Exponent::Infinite => {
                acc = acc.max(a);
                acc
            }
            Exponent::Finite(qv) => {
                if let Some((t0, a0)) = prev {
                    acc = acc + (t - t0) * (a0.powf(qv) + a.powf(qv)) / T::lit(2.0);
                }
                acc.powf(qv.recip())
            }
        };
        prev = Some((t, a));
        rows.push(ConservationRow {
            step,
            t,
            trace: gamma.trace(),
            mass: rho.integral(),
            gram_dev: gamma.gram_deviation(),
            schatten: gamma.schatten_norm(alpha)?,
            schatten_weights: gamma.weight_norm(alpha),
            sobolev_schatten: sobolev_schatten_norm(gamma.ensemble(), alpha, config.s)?,
            rho_mixed_norm_running: running,
            energy: energy(gamma, &config.w)?,
        });
    }
    Ok(rows)
}

/// ‖i∂_tγ − [−Δ + w ∗ ρ_γ, γ]‖_{S²} / ‖γ‖_{S²} at an interior recorded
/// index, with ∂_t by central difference.
pub fn commutator_residual<T: Real>(traj: &FermionTrajectory<T>, w: &PotentialSpec<T>, index: usize) -> Result<T> {
    if index == 0 || index + 1 >= traj.len() {
        return Err(domain(format!("index {index} has no central difference in a trajectory of {}", traj.len())));
    }
    let g = traj.states[index].to_matrix();
    let gp = traj.states[index + 1].to_matrix();
    let gm = traj.states[index - 1].to_matrix();
    let span = traj.times[index + 1] - traj.times[index - 1];
    let h = mean_field_hamiltonian(&traj.states[index], w)?;
    let comm = h.matmul(&g)?.sub(&g.matmul(&h)?)?;
    let dt = gp.sub(&gm)?.scale(C::new(T::zero(), T::one() / span));
    let norm = g.frobenius();
    if norm == T::zero() {
        return Ok(dt.sub(&comm)?.frobenius());
    }
    Ok(dt.sub(&comm)?.frobenius() / norm)
}
