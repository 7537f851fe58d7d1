//! Fourier extension ℰ_N a(t, z) = Σ a(ξ) e^{2πi(z·ξ + t|ξ|²)} and its adjoint.

use std::sync::Arc;

use crate::error::{mismatch, Result};
use crate::field::SpectralField;
use crate::grid::TorusGrid;
use crate::lattice::FrequencyLattice;
use crate::scalar::{cis_turns, phase_turns, Real, C};
use crate::trajectory::{TimeGrid, Trajectory};

pub fn extension_apply<T: Real>(
    a: &[C<T>],
    lattice: Arc<FrequencyLattice>,
    grid: TorusGrid<T>,
    times: TimeGrid<T>,
) -> Result<Trajectory<T>> {
    let f = SpectralField::from_coeffs(lattice, grid, a.to_vec())?;
    Ok(Trajectory::free(&f, times))
}

/// ℰ_N* F(ξ) = Σ_i w_i ∫ F(t_i, z) e^{−2πi(z·ξ + t_i|ξ|²)} dz on the cube S_{d,N}.
pub fn restriction_apply<T: Real>(traj: &Trajectory<T>, lattice: &FrequencyLattice) -> Result<Vec<C<T>>> {
    let mut out = vec![C::new(T::zero(), T::zero()); lattice.len()];
    for (field, (&t, &w)) in traj.fields.iter().zip(traj.times().iter().zip(traj.weights())) {
        if !field.lattice().same_split(lattice) {
            return Err(mismatch("trajectory and target lattice have different splits"));
        }
        for p in field.lattice().points() {
            if let Some(j) = lattice.index_of(p.xi) {
                let phase = cis_turns(-phase_turns(t, p.norm_sq));
                out[j] = out[j] + field.coeffs()[p.index] * phase * w;
            }
        }
    }
    Ok(out)
}

/// ℰ_N ℰ_N* F sampled at the trajectory's own times.
pub fn extension_restriction<T: Real>(traj: &Trajectory<T>, lattice: Arc<FrequencyLattice>) -> Result<Trajectory<T>> {
    let first = traj.fields.first().ok_or_else(|| crate::error::Error::Empty("trajectory".into()))?;
    let a = restriction_apply(traj, &lattice)?;
    extension_apply(&a, lattice, first.grid().clone(), traj.grid.clone())
}

/// Space-time inner product Σ_i w_i ∫ conj(F) G dz.
pub fn spacetime_inner<T: Real>(f: &Trajectory<T>, g: &Trajectory<T>) -> Result<C<T>> {
    if f.len() != g.len() {
        return Err(mismatch("trajectories differ in length"));
    }
    let mut acc = C::new(T::zero(), T::zero());
    for ((a, b), &w) in f.fields.iter().zip(&g.fields).zip(f.weights()) {
        let cw = a.grid().cell_weight();
        let s = a
            .samples()
            .iter()
            .zip(b.samples())
            .fold(C::new(T::zero(), T::zero()), |s, (x, y)| s + x.conj() * y);
        acc = acc + s * (cw * w);
    }
    Ok(acc)
}
