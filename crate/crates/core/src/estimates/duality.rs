//! The operator F ↦ W·1_{I_N}·ℰ_Nℰ_N*(1_{I_N} W F) as a dense matrix on the
//! quadrature-weighted space-time grid, and the two sides of its Schatten bound.

use rayon::prelude::*;
use serde::Serialize;

use crate::admissibility::AdmissibleTriple;
use crate::error::{domain, Error, Result};
use crate::grid::TorusGrid;
use crate::lattice::FrequencyLattice;
use crate::linalg::CMatrix;
use crate::norms::{lebesgue_mean, lp_norm, time_lebesgue};
use crate::scalar::{cis_turns, phase_turns, Exponent, Real, C};
use crate::estimates::kernel::kernel_1d;
use crate::trajectory::TimeGrid;

/// Largest dense dimension accepted by [`duality_schatten_check`].
pub const DENSE_LIMIT: usize = 4096;

/// A real potential sampled on a time grid × spatial grid (time-major).
#[derive(Debug, Clone)]
pub struct SpaceTimePotential<T: Real> {
    pub times: TimeGrid<T>,
    pub grid: TorusGrid<T>,
    pub values: Vec<T>,
}

impl<T: Real> SpaceTimePotential<T> {
    pub fn new(times: TimeGrid<T>, grid: TorusGrid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != times.len() * grid.len() {
            return Err(Error::Mismatch("potential sample count differs from time × space grid".into()));
        }
        Ok(Self { times, grid, values })
    }

    pub fn from_fn(times: TimeGrid<T>, grid: TorusGrid<T>, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut values = Vec::with_capacity(times.len() * grid.len());
        for i in 0..times.len() {
            for m in 0..grid.len() {
                values.push(f(i, m));
            }
        }
        Self { times, grid, values }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// √(time weight · cell weight) per space-time point.
    fn root_measure(&self) -> Vec<T> {
        let cw = self.grid.cell_weight();
        let n = self.grid.len();
        (0..self.dim()).map(|p| (self.times.weights[p / n] * cw).sqrt()).collect()
    }

    /// ‖W‖_{L^a_t L^b_x L^c_y} over the sampled window.
    pub fn mixed_norm(&self, a: Exponent<T>, b: Exponent<T>, c: Exponent<T>) -> Result<T> {
        let n = self.grid.len();
        let per_time: Vec<T> = self
            .values
            .chunks(n)
            .map(|chunk| {
                let inner: Vec<T> = chunk.chunks(self.grid.y_len()).map(|y| lebesgue_mean(y, c)).collect();
                lebesgue_mean(&inner, b)
            })
            .collect();
        time_lebesgue(&self.times.weights, &per_time, a)
    }
}

/// Time grid on I_N = [−1/(2N), 1/(2N)] with spacing matched to the torus rule.
pub fn window_times<T: Real>(d: usize, n: usize) -> Result<TimeGrid<T>> {
    let half = T::one() / T::of_int(2 * n as i64);
    let intervals = TimeGrid::<T>::torus_samples(d, n).div_ceil(n).max(8);
    TimeGrid::trapezoid(-half, half, intervals)
}

/// Dense matrix √μ_p W(p) K_N(p − p′) W(p′) √μ_{p′}.
pub fn duality_matrix<T: Real>(w: &SpaceTimePotential<T>, lattice: &FrequencyLattice) -> Result<CMatrix<T>> {
    let dim = w.dim();
    if dim > DENSE_LIMIT {
        return Err(Error::TooLarge { dim, limit: DENSE_LIMIT });
    }
    w.grid.check_resolves(lattice)?;
    let n = lattice.n();
    let m = w.grid.m();
    let d = w.grid.d();
    let nt = w.times.len();
    // 1-D kernel table indexed by (time pair, spatial offset).
    let table: Vec<C<T>> = (0..nt * nt * m)
        .into_par_iter()
        .map(|idx| {
            let (pair, off) = (idx / m, idx % m);
            let (i, j) = (pair / nt, pair % nt);
            kernel_1d(w.times.times[i] - w.times.times[j], T::of_int(off as i64) / T::of_int(m as i64), n)
        })
        .collect();
    let mu = w.root_measure();
    let npts = w.grid.len();
    let coords: Vec<Vec<usize>> = (0..npts).map(|p| w.grid.sample_coords(p)).collect();
    let rows: Vec<Vec<C<T>>> = (0..dim)
        .into_par_iter()
        .map(|p| {
            let (i, a) = (p / npts, p % npts);
            (0..dim)
                .map(|q| {
                    let (j, b) = (q / npts, q % npts);
                    let base = (i * nt + j) * m;
                    let mut k = C::new(T::one(), T::zero());
                    for ax in 0..d {
                        let off = (coords[a][ax] + m - coords[b][ax]) % m;
                        k = k * table[base + off];
                    }
                    k * (mu[p] * w.values[p] * w.values[q] * mu[q])
                })
                .collect()
        })
        .collect();
    CMatrix::from_row_major(dim, dim, rows.into_iter().flatten().collect())
}

/// Factor B with duality_matrix = B B*: B_{p,ξ} = √μ_p W(p) e^{2πi(z_p·ξ + t_p|ξ|²)}.
pub fn duality_factor<T: Real>(w: &SpaceTimePotential<T>, lattice: &FrequencyLattice) -> Result<CMatrix<T>> {
    w.grid.check_resolves(lattice)?;
    let mu = w.root_measure();
    let npts = w.grid.len();
    let m = w.grid.m() as i64;
    let coords: Vec<Vec<usize>> = (0..npts).map(|p| w.grid.sample_coords(p)).collect();
    Ok(CMatrix::from_fn(w.dim(), lattice.len(), |p, l| {
        let (i, a) = (p / npts, p % npts);
        let pt = lattice.point(l);
        let dot: i64 = pt.xi.iter().zip(&coords[a]).map(|(&x, &c)| x as i64 * c as i64).sum();
        let space = T::of_int(dot.rem_euclid(m)) / T::of_int(m);
        let time = phase_turns(w.times.times[i], pt.norm_sq);
        cis_turns(space + time) * (mu[p] * w.values[p])
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualityCheck<T> {
    /// Schatten-α norm from the dense matrix.
    pub lhs: T,
    /// Same quantity from the factored Gram route.
    pub lhs_factored: T,
    /// ‖W‖²_{L^{2q′}_t L^{2r′}_x L^{2γ′}_y}
    pub rhs: T,
    pub alpha: T,
    pub dim: usize,
}

impl<T: Real> DualityCheck<T> {
    pub fn ratio(&self) -> T {
        if self.rhs == T::zero() {
            T::zero()
        } else {
            self.lhs / self.rhs
        }
    }
}

/// Both sides of the Schatten duality bound for a potential sampled on I_N.
/// The Schatten exponent is α = 2γ′ from the triple.
pub fn duality_schatten_check<T: Real>(
    w: &SpaceTimePotential<T>,
    lattice: &FrequencyLattice,
    triple: &AdmissibleTriple<T>,
) -> Result<DualityCheck<T>> {
    let gamma_conj = triple.gamma.conjugate();
    let alpha = match gamma_conj {
        Exponent::Finite(g) => g * T::lit(2.0),
        Exponent::Infinite => return Err(domain("γ = 1 gives α = ∞; not supported by the dense check")),
    };
    let a = schatten_dense(w, lattice, alpha)?;
    let b = schatten_factored(w, lattice, alpha)?;
    let two = T::lit(2.0);
    let rhs = w.mixed_norm(triple.q.conjugate().scale(two), triple.r.conjugate().scale(two), gamma_conj.scale(two))?;
    Ok(DualityCheck { lhs: a, lhs_factored: b, rhs: rhs * rhs, alpha, dim: w.dim() })
}

pub fn schatten_dense<T: Real>(w: &SpaceTimePotential<T>, lattice: &FrequencyLattice, alpha: T) -> Result<T> {
    let a = duality_matrix(w, lattice)?;
    let s: Vec<T> = if a.is_hermitian(T::lit(1e-12) * a.max_abs().max(T::one())) {
        T::hermitian_eigen(&a)?.0.into_iter().map(|v| v.abs()).collect()
    } else {
        T::singular_values(&a)?
    };
    Ok(lp_norm(&s, Exponent::Finite(alpha)))
}

pub fn schatten_factored<T: Real>(w: &SpaceTimePotential<T>, lattice: &FrequencyLattice, alpha: T) -> Result<T> {
    let b = duality_factor(w, lattice)?;
    let g = b.adjoint().matmul(&b)?;
    let s: Vec<T> = T::hermitian_eigen(&g)?.0.into_iter().map(|v| v.max(T::zero())).collect();
    Ok(lp_norm(&s, Exponent::Finite(alpha)))
}
