//! Self-consistent Hartree flow of finite-rank density matrices on the band:
//! i∂_t γ = [−Δ + w ∗ ρ_γ, γ].

mod diagnostics;
mod operator;

use std::sync::Arc;

use rayon::prelude::*;

use crate::ensemble::OrthonormalEnsemble;
use crate::error::{domain, mismatch, Error, Result};
use crate::field::SpectralField;
use crate::lattice::FrequencyLattice;
use crate::linalg::CMatrix;
use crate::meanfield::{band_matrix, convolution_potential, potential_propagator};
use crate::nls::PotentialSpec;
use crate::norms::{lp_norm, GridFunction};
use crate::scalar::{Exponent, Real, C};

pub use diagnostics::{commutator_residual, conservation_report, energy, ConservationRow};
pub use operator::{picard_operator_solve, rho_l2_distance, OperatorPicardConfig, OperatorPicardSolution};

/// γ = Σ λ_j |u_j⟩⟨u_j| with λ_j ≥ 0.
#[derive(Debug, Clone)]
pub struct DensityMatrix<T: Real> {
    ensemble: OrthonormalEnsemble<T>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(ensemble: OrthonormalEnsemble<T>) -> Result<Self> {
        if ensemble.weights().iter().any(|&l| l < T::zero()) {
            return Err(domain("density matrix weights must be non-negative"));
        }
        Ok(Self { ensemble })
    }

    pub fn ensemble(&self) -> &OrthonormalEnsemble<T> {
        &self.ensemble
    }

    pub fn weights(&self) -> &[T] {
        self.ensemble.weights()
    }

    pub fn rank(&self) -> usize {
        self.ensemble.rank()
    }

    pub fn trace(&self) -> T {
        self.ensemble.trace()
    }

    pub fn gram_deviation(&self) -> T {
        self.ensemble.gram_deviation()
    }

    pub fn to_matrix(&self) -> CMatrix<T> {
        self.ensemble.to_matrix()
    }

    /// ρ on the grid.
    pub fn density(&self) -> GridFunction<T> {
        self.ensemble.density()
    }

    /// ‖λ‖_{ℓ^{α′}}
    pub fn weight_norm(&self, alpha_prime: Exponent<T>) -> T {
        lp_norm(self.weights(), alpha_prime)
    }

    /// ‖γ‖_{S^{α′}} from the eigenvalues of the assembled band matrix.
    pub fn schatten_norm(&self, alpha_prime: Exponent<T>) -> Result<T> {
        let (values, _) = T::hermitian_eigen(&self.to_matrix())?;
        Ok(lp_norm(&values.into_iter().map(|v| v.abs()).collect::<Vec<_>>(), alpha_prime))
    }

    fn with_frames(&self, frames: Vec<Vec<C<T>>>) -> Result<Self> {
        Ok(Self { ensemble: self.ensemble.with_frames(frames)? })
    }
}

/// ρ_γ as a real field on the doubled band 2N (exact: ρ has no higher modes).
pub fn density_of<T: Real>(gamma: &DensityMatrix<T>) -> Result<SpectralField<T>> {
    let ens = gamma.ensemble();
    let lat = ens.lattice();
    let doubled = Arc::new(FrequencyLattice::new(lat.d(), lat.k(), 2 * lat.n())?);
    let samples: Vec<C<T>> = gamma.density().values.into_iter().map(|v| C::new(v, T::zero())).collect();
    SpectralField::from_samples(doubled, ens.grid().clone(), &samples)
}

#[derive(Debug, Clone)]
pub struct HartreeConfig<T: Real> {
    pub dt: T,
    pub n_steps: usize,
    pub w: PotentialSpec<T>,
    pub n: usize,
    pub m: usize,
    /// Record a state every `cadence` steps (the last step is always kept).
    pub cadence: usize,
    pub alpha_prime: T,
    /// Regularity of the Sobolev–Schatten diagnostic; the condition s > 2/q
    /// is reported, not enforced.
    pub s: T,
    /// (q, r, r̃) for the running density norm.
    pub triple: [Exponent<T>; 3],
}

impl<T: Real> HartreeConfig<T> {
    /// Defaults: cadence 1, (q, r, r̃) = (4, 2, 2), α′ = 2q/(q+1), s = 2/q + ¼.
    pub fn new(dt: T, n_steps: usize, w: PotentialSpec<T>) -> Self {
        let q = T::lit(4.0);
        let n = w.w.lattice().n();
        let m = w.w.grid().m();
        Self {
            dt,
            n_steps,
            w,
            n,
            m,
            cadence: 1,
            alpha_prime: T::lit(2.0) * q / (q + T::one()),
            s: T::lit(2.0) / q + T::lit(0.25),
            triple: [Exponent::Finite(q), Exponent::Finite(T::lit(2.0)), Exponent::Finite(T::lit(2.0))],
        }
    }

    pub fn t_final(&self) -> T {
        self.dt * T::of_int(self.n_steps as i64)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > T::zero()) || self.n_steps == 0 || self.cadence == 0 {
            return Err(domain("need dt > 0, at least one step and a positive cadence"));
        }
        if self.t_final() > T::one() + T::lit(1e-12) {
            return Err(domain(format!("dt·n_steps = {} exceeds 1", self.t_final())));
        }
        if !(self.alpha_prime >= T::one()) {
            return Err(domain("α′ must be at least 1"));
        }
        Ok(())
    }

    /// Whether s > 2/q holds for the configured triple.
    pub fn s_hypothesis_holds(&self) -> bool {
        self.s > T::lit(2.0) * self.triple[0].recip()
    }

    fn check_state(&self, gamma: &DensityMatrix<T>) -> Result<()> {
        let ens = gamma.ensemble();
        if ens.lattice().n() != self.n || ens.grid().m() != self.m {
            return Err(mismatch("initial state does not match the configured band and grid"));
        }
        if *ens.lattice() != *self.w.w.lattice() || ens.grid() != self.w.w.grid() {
            return Err(mismatch("potential and state live on different bands or grids"));
        }
        Ok(())
    }
}

/// Recorded states of a Hartree run.
#[derive(Debug, Clone)]
pub struct FermionTrajectory<T: Real> {
    pub steps: Vec<usize>,
    pub times: Vec<T>,
    pub states: Vec<DensityMatrix<T>>,
}

impl<T: Real> FermionTrajectory<T> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct HartreeRun<T: Real> {
    pub trajectory: FermionTrajectory<T>,
    pub diagnostics: Vec<ConservationRow<T>>,
}

/// V̂ = ŵ·ρ̂ over the grid bins for the current state.
pub(crate) fn potential_hat<T: Real>(gamma: &DensityMatrix<T>, w: &PotentialSpec<T>) -> Result<Vec<C<T>>> {
    let ens = gamma.ensemble();
    let rho: Vec<C<T>> = gamma.density().values.into_iter().map(|v| C::new(v, T::zero())).collect();
    convolution_potential(ens.lattice(), w.hat(), ens.grid(), &rho)
}

/// Band matrix of −Δ + w ∗ ρ_γ.
pub fn mean_field_hamiltonian<T: Real>(gamma: &DensityMatrix<T>, w: &PotentialSpec<T>) -> Result<CMatrix<T>> {
    let ens = gamma.ensemble();
    let mut h = band_matrix(ens.lattice(), ens.grid(), &potential_hat(gamma, w)?)?;
    let two_pi = T::lit(2.0) * T::PI();
    for (i, p) in ens.lattice().points().enumerate() {
        h[(i, i)] = h[(i, i)] + C::new(two_pi * T::of_int(p.norm_sq), T::zero());
    }
    Ok(h)
}

fn apply_to_frames<T: Real>(gamma: &DensityMatrix<T>, u: &CMatrix<T>) -> Result<DensityMatrix<T>> {
    let frames = gamma.ensemble().frames().par_iter().map(|f| u.mul_vec(f)).collect::<Result<Vec<_>>>()?;
    gamma.with_frames(frames)
}

/// exp(−iτ P V P) with V sampled at the midpoint of the substep.
fn potential_substep<T: Real>(gamma: &DensityMatrix<T>, w: &PotentialSpec<T>, tau: T) -> Result<DensityMatrix<T>> {
    let ens = gamma.ensemble();
    let (lat, grid) = (ens.lattice(), ens.grid());
    let first = potential_propagator(lat, grid, &potential_hat(gamma, w)?, tau / T::lit(2.0))?;
    let mid = apply_to_frames(gamma, &first)?;
    let full = potential_propagator(lat, grid, &potential_hat(&mid, w)?, tau)?;
    apply_to_frames(gamma, &full)
}

/// Orbitals under e^{−iτ(−Δ)}: a(ξ) ↦ e^{−2πiτ|ξ|²} a(ξ).
fn free_substep<T: Real>(gamma: &DensityMatrix<T>, tau: T) -> Result<DensityMatrix<T>> {
    Ok(DensityMatrix { ensemble: gamma.ensemble().free_propagate(-tau) })
}

/// One Strang step: half potential, free flight, half potential; the mean
/// field is recomputed from the current density inside every substep.
pub fn hartree_step<T: Real>(gamma: &DensityMatrix<T>, w: &PotentialSpec<T>, dt: T) -> Result<DensityMatrix<T>> {
    if w.is_zero() {
        return free_substep(gamma, dt);
    }
    let half = dt / T::lit(2.0);
    let a = potential_substep(gamma, w, half)?;
    let b = free_substep(&a, dt)?;
    potential_substep(&b, w, half)
}

/// Advances every orbital by the shared mean field for `n_steps` steps.
pub fn evolve_fermions<T: Real>(gamma0: &DensityMatrix<T>, config: &HartreeConfig<T>) -> Result<HartreeRun<T>> {
    config.validate()?;
    config.check_state(gamma0)?;
    if !config.s_hypothesis_holds() {
        tracing::info!(s = %config.s, "s ≤ 2/q: outside the regularity hypothesis, diagnostics still reported");
    }
    let mut traj = FermionTrajectory { steps: vec![0], times: vec![T::zero()], states: vec![gamma0.clone()] };
    let mut gamma = gamma0.clone();
    for step in 1..=config.n_steps {
        gamma = hartree_step(&gamma, &config.w, config.dt)?;
        let finite = gamma.ensemble().frames().iter().flatten().all(|c| c.re.is_finite() && c.im.is_finite());
        if !finite {
            return Err(Error::Numeric(format!("non-finite orbital coefficients at step {step}")));
        }
        if step % config.cadence == 0 || step == config.n_steps {
            traj.steps.push(step);
            traj.times.push(config.dt * T::of_int(step as i64));
            traj.states.push(gamma.clone());
        }
    }
    let diagnostics = conservation_report(&traj, config)?;
    Ok(HartreeRun { trajectory: traj, diagnostics })
}
