use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, mismatch, Result};
use crate::field::SpectralField;
use crate::grid::TorusGrid;
use crate::lattice::FrequencyLattice;
use crate::linalg::{gram, orthonormalize, CMatrix};
use crate::norms::GridFunction;
use crate::sampling::{complex_normal, rng};
use crate::scalar::{compensated_sum, Real, C};

/// Weighted family of coefficient frames on a lattice; as an operator,
/// γ = Σ λ_j |f_j⟩⟨f_j|.
#[derive(Debug, Clone)]
pub struct OrthonormalEnsemble<T: Real> {
    lattice: Arc<FrequencyLattice>,
    grid: TorusGrid<T>,
    frames: Vec<Vec<C<T>>>,
    weights: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleKind {
    PlaneWaves,
    Random,
}

impl<T: Real> OrthonormalEnsemble<T> {
    pub fn new(lattice: Arc<FrequencyLattice>, grid: TorusGrid<T>, frames: Vec<Vec<C<T>>>, weights: Vec<T>) -> Result<Self> {
        grid.check_resolves(&lattice)?;
        if frames.len() != weights.len() {
            return Err(mismatch(format!("{} frames but {} weights", frames.len(), weights.len())));
        }
        if frames.iter().any(|f| f.len() != lattice.len()) {
            return Err(mismatch("frame length differs from lattice size"));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(domain("weights must be finite"));
        }
        let dev = gram(&frames).identity_deviation();
        if !(dev <= T::lit(1e-8)) {
            return Err(domain(format!("frames are not orthonormal (Gram deviation {dev})")));
        }
        Ok(Self { lattice, grid, frames, weights })
    }

    pub fn from_fields(fields: &[SpectralField<T>], weights: Vec<T>) -> Result<Self> {
        let first = fields.first().ok_or_else(|| domain("ensemble needs at least one frame"))?;
        for f in fields {
            first.check_same(f)?;
        }
        Self::new(
            first.lattice_arc().clone(),
            first.grid().clone(),
            fields.iter().map(|f| f.coeffs().to_vec()).collect(),
            weights,
        )
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

    pub fn frames(&self) -> &[Vec<C<T>>] {
        &self.frames
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn rank(&self) -> usize {
        self.frames.len()
    }

    pub fn with_weights(&self, weights: Vec<T>) -> Result<Self> {
        Self::new(self.lattice.clone(), self.grid.clone(), self.frames.clone(), weights)
    }

    pub fn with_frames(&self, frames: Vec<Vec<C<T>>>) -> Result<Self> {
        Self::new(self.lattice.clone(), self.grid.clone(), frames, self.weights.clone())
    }

    pub fn with_grid(&self, grid: TorusGrid<T>) -> Result<Self> {
        Self::new(self.lattice.clone(), grid, self.frames.clone(), self.weights.clone())
    }

    pub fn field(&self, j: usize) -> SpectralField<T> {
        SpectralField::from_coeffs(self.lattice.clone(), self.grid.clone(), self.frames[j].clone())
            .expect("validated at construction")
    }

    pub fn fields(&self) -> Vec<SpectralField<T>> {
        (0..self.rank()).map(|j| self.field(j)).collect()
    }

    pub fn gram(&self) -> CMatrix<T> {
        gram(&self.frames)
    }

    /// max |G − I| entrywise.
    pub fn gram_deviation(&self) -> T {
        self.gram().identity_deviation()
    }

    /// Tr γ = Σ λ_j ‖f_j‖².
    pub fn trace(&self) -> T {
        compensated_sum(self.frames.iter().zip(&self.weights).map(|(f, &l)| {
            l * compensated_sum(f.iter().map(|a| a.norm_sqr()))
        }))
    }

    /// Every frame advanced by e^{2πi t|ξ|²}.
    pub fn free_propagate(&self, t: T) -> Self {
        let frames = self.frames.iter().map(|f| self.field_from(f).free_propagate(t).into_coeffs()).collect();
        Self { frames, ..self.clone() }
    }

    fn field_from(&self, f: &[C<T>]) -> SpectralField<T> {
        SpectralField::from_coeffs(self.lattice.clone(), self.grid.clone(), f.to_vec()).expect("validated")
    }

    /// ρ(z) = Σ λ_j |f_j(z)|² on the grid.
    pub fn density(&self) -> GridFunction<T> {
        let parts: Vec<Vec<T>> = self
            .frames
            .par_iter()
            .zip(self.weights.par_iter())
            .map(|(f, &l)| self.field_from(f).samples().iter().map(|z| l * z.norm_sqr()).collect())
            .collect();
        let mut values = vec![T::zero(); self.grid.len()];
        for p in &parts {
            for (v, &x) in values.iter_mut().zip(p) {
                *v = *v + x;
            }
        }
        GridFunction::new(self.grid.clone(), values).expect("grid sized")
    }

    /// Dense band matrix γ_{ξη} = Σ λ_j f_j(ξ) conj f_j(η).
    pub fn to_matrix(&self) -> CMatrix<T> {
        let n = self.lattice.len();
        let mut out = CMatrix::zeros(n, n);
        for (f, &l) in self.frames.iter().zip(&self.weights) {
            for i in 0..n {
                let a = f[i] * l;
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + a * f[j].conj();
                }
            }
        }
        out
    }
}

/// Orthonormal frames on the lattice: the first `j` characters in lattice
/// order, or `j` columns of a seeded random unitary.
pub fn make_ons<T: Real>(
    kind: EnsembleKind,
    j: usize,
    lattice: Arc<FrequencyLattice>,
    grid: TorusGrid<T>,
    seed: u64,
) -> Result<OrthonormalEnsemble<T>> {
    let dim = lattice.len();
    if j == 0 || j > dim {
        return Err(domain(format!("ensemble rank {j} must lie in 1..={dim}")));
    }
    let zero = C::new(T::zero(), T::zero());
    let frames = match kind {
        EnsembleKind::PlaneWaves => (0..j)
            .map(|i| {
                let mut v = vec![zero; dim];
                v[i] = C::new(T::one(), T::zero());
                v
            })
            .collect(),
        EnsembleKind::Random => {
            let mut r = rng(seed, 0x0e5e_3b1e);
            let mut v: Vec<Vec<C<T>>> = (0..j).map(|_| (0..dim).map(|_| complex_normal(&mut r)).collect()).collect();
            orthonormalize(&mut v)?;
            v
        }
    };
    OrthonormalEnsemble::new(lattice, grid, frames, vec![T::one(); j])
}
