use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::{domain, Error, Result};
use crate::lattice::FrequencyLattice;
use crate::scalar::{Real, C};

/// Uniform sampling of 𝕋^{d−k}×𝕋^k with M points per axis.
///
/// Samples are stored row-major with axis 0 slowest, so the y-block (last k
/// axes) is contiguous: each x-sample owns a run of M^k values.
#[derive(Clone)]
pub struct TorusGrid<T: Real> {
    d: usize,
    k: usize,
    m: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> fmt::Debug for TorusGrid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorusGrid").field("d", &self.d).field("k", &self.k).field("m", &self.m).finish()
    }
}

impl<T: Real> PartialEq for TorusGrid<T> {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.k == other.k && self.m == other.m
    }
}

/// Default samples per axis: 4(2N+1) rounded up to a power of two.
pub fn default_grid_size(n: usize) -> usize {
    (4 * (2 * n + 1)).next_power_of_two()
}

impl<T: Real> TorusGrid<T> {
    pub fn new(d: usize, k: usize, m: usize) -> Result<Self> {
        if d == 0 || k == 0 || k > d {
            return Err(domain(format!("grid split (d={d}, k={k}) invalid")));
        }
        if m == 0 {
            return Err(domain("grid needs at least one sample per axis"));
        }
        if m.checked_pow(d as u32).map_or(true, |c| c > 1 << 28) {
            return Err(domain(format!("grid M^d with M={m}, d={d} is too large")));
        }
        let mut planner = FftPlanner::new();
        Ok(Self { d, k, m, forward: planner.plan_fft_forward(m), inverse: planner.plan_fft_inverse(m) })
    }

    /// Grid matching a lattice with the default dealiasing size.
    pub fn for_lattice(lattice: &FrequencyLattice) -> Result<Self> {
        Self::new(lattice.d(), lattice.k(), default_grid_size(lattice.n()))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Samples per axis.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.m.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of samples in one y-block (M^k).
    pub fn y_len(&self) -> usize {
        self.m.pow(self.k as u32)
    }

    /// Number of x-samples (M^{d−k}).
    pub fn x_len(&self) -> usize {
        self.m.pow((self.d - self.k) as u32)
    }

    /// Quadrature weight of one cell, M^{−d}.
    pub fn cell_weight(&self) -> T {
        T::one() / T::of_int(self.len() as i64)
    }

    /// Integer coordinates (m₁, …, m_d) of sample `idx`; the point is m/M.
    pub fn sample_coords(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.d];
        for slot in out.iter_mut().rev() {
            *slot = idx % self.m;
            idx /= self.m;
        }
        out
    }

    pub fn point(&self, idx: usize) -> Vec<T> {
        let m = T::of_int(self.m as i64);
        self.sample_coords(idx).into_iter().map(|c| T::of_int(c as i64) / m).collect()
    }

    pub fn check_resolves(&self, lattice: &FrequencyLattice) -> Result<()> {
        if !(lattice.d() == self.d && lattice.k() == self.k) {
            return Err(Error::Mismatch(format!(
                "lattice split ({}, {}) differs from grid split ({}, {})",
                lattice.d(),
                lattice.k(),
                self.d,
                self.k
            )));
        }
        let needed = 2 * lattice.n() + 1;
        if self.m < needed {
            return Err(Error::Aliasing { m: self.m, n: lattice.n(), needed });
        }
        Ok(())
    }

    /// Flat grid index holding frequency ξ (taken mod M).
    pub fn bin_of(&self, xi: &[i32]) -> usize {
        let m = self.m as i64;
        xi.iter().fold(0usize, |acc, &c| acc * self.m + (c as i64).rem_euclid(m) as usize)
    }

    fn transform(&self, data: &mut [C<T>], plan: &Arc<dyn Fft<T>>) {
        let m = self.m;
        let total = data.len();
        let mut line = vec![C::new(T::zero(), T::zero()); m];
        let mut scratch = vec![C::new(T::zero(), T::zero()); plan.get_inplace_scratch_len()];
        for axis in 0..self.d {
            let stride = m.pow((self.d - 1 - axis) as u32);
            if stride == 1 {
                for chunk in data.chunks_exact_mut(m) {
                    plan.process_with_scratch(chunk, &mut scratch);
                }
                continue;
            }
            let block = m * stride;
            for start in (0..total).step_by(block) {
                for off in 0..stride {
                    let base = start + off;
                    for (j, v) in line.iter_mut().enumerate() {
                        *v = data[base + j * stride];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (j, v) in line.iter().enumerate() {
                        data[base + j * stride] = *v;
                    }
                }
            }
        }
    }

    /// samples(z) = Σ_ξ a(ξ) e^{2πi z·ξ}.
    pub fn synthesize(&self, lattice: &FrequencyLattice, coeffs: &[C<T>]) -> Result<Vec<C<T>>> {
        self.check_resolves(lattice)?;
        if coeffs.len() != lattice.len() {
            return Err(Error::Mismatch("coefficient count differs from lattice size".into()));
        }
        let mut data = vec![C::new(T::zero(), T::zero()); self.len()];
        for (p, &a) in lattice.points().zip(coeffs) {
            data[self.bin_of(p.xi)] = a;
        }
        self.transform(&mut data, &self.inverse);
        Ok(data)
    }

    /// Discrete Fourier coefficients of grid samples, restricted to the lattice.
    pub fn analyze(&self, lattice: &FrequencyLattice, samples: &[C<T>]) -> Result<Vec<C<T>>> {
        self.check_resolves(lattice)?;
        let full = self.analyze_full(samples)?;
        Ok(lattice.points().map(|p| full[self.bin_of(p.xi)]).collect())
    }

    /// All M^d discrete Fourier coefficients, indexed by grid bin.
    pub fn analyze_full(&self, samples: &[C<T>]) -> Result<Vec<C<T>>> {
        if samples.len() != self.len() {
            return Err(Error::Mismatch("sample count differs from grid size".into()));
        }
        let mut data = samples.to_vec();
        self.transform(&mut data, &self.forward);
        let w = self.cell_weight();
        for v in data.iter_mut() {
            *v = *v * w;
        }
        Ok(data)
    }
}
