//! i∂_t u − Δu = w ∗ F_p(u) on the band: Duhamel–Picard iteration and a
//! split-step reference integrator.

mod duhamel;
mod picard;
mod probe;
mod splitstep;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::admissibility::nonlinear_triple;
use crate::error::{domain, mismatch, Error, Result};
use crate::field::SpectralField;
use crate::grid::TorusGrid;
use crate::lattice::FrequencyLattice;
use crate::meanfield::convolution_potential;
use crate::scalar::{Exponent, Real, C};

pub use duhamel::{duhamel_apply, duhamel_trajectory};
pub use picard::{picard_refine, picard_solve, spacetime_distance, PicardHistory, PicardSolution, Refinement};
pub use probe::{nonlinear_estimate_probe, EstimateProbe};
pub use splitstep::{self_convergence, splitstep_solve, SelfConvergence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// F_p(u) = ±|u|^{p−1}u, nonlinearity w ∗ F_p(u).
    Gauge,
    /// F_p(u) = ±|u|^p, nonlinearity w ∗ F_p(u).
    NonGauge,
    /// Mean-field form ±(w ∗ |u|^{p−1})u; gauge invariant and L²-conserving.
    Hartree,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlinearitySpec<T> {
    pub p: T,
    pub variant: Variant,
    /// +1 or −1.
    pub sign: i8,
}

impl<T: Real> NonlinearitySpec<T> {
    pub fn new(p: T, variant: Variant, sign: i8) -> Result<Self> {
        if !(p > T::one()) {
            return Err(domain(format!("growth exponent must exceed 1, got {p}")));
        }
        if sign != 1 && sign != -1 {
            return Err(domain(format!("sign must be ±1, got {sign}")));
        }
        Ok(Self { p, variant, sign })
    }

    fn signed(&self) -> T {
        T::of_int(self.sign as i64)
    }

    /// Pointwise F_p(z).
    pub fn apply(&self, z: C<T>) -> C<T> {
        let m = z.norm();
        let v = match self.variant {
            Variant::NonGauge => C::new(m.powf(self.p), T::zero()),
            Variant::Gauge | Variant::Hartree => z * m.powf(self.p - T::one()),
        };
        v * self.signed()
    }
}

/// A real convolution kernel on the band, with a free-form regularity tag.
#[derive(Debug, Clone)]
pub struct PotentialSpec<T: Real> {
    pub w: SpectralField<T>,
    pub class: String,
}

impl<T: Real> PotentialSpec<T> {
    /// Accepts `w` only if it is real on the grid to 10⁻¹⁰.
    pub fn new(w: SpectralField<T>, class: impl Into<String>) -> Result<Self> {
        let defect = w.reality_defect();
        if defect.to_f64_lossy() > 1e-10 {
            return Err(domain(format!("potential is not real: conjugate-symmetry defect {defect}")));
        }
        Ok(Self { w, class: class.into() })
    }

    fn from_hat(lattice: Arc<FrequencyLattice>, grid: TorusGrid<T>, class: &str, f: impl Fn(&[i32], i64) -> T) -> Result<Self> {
        let coeffs = lattice.points().map(|p| C::new(f(p.xi, p.norm_sq), T::zero())).collect();
        Self::new(SpectralField::from_coeffs(lattice, grid, coeffs)?, class)
    }

    pub fn zero(lattice: Arc<FrequencyLattice>, grid: TorusGrid<T>) -> Result<Self> {
        Self::from_hat(lattice, grid, "zero", |_, _| T::zero())
    }

    /// ŵ ≡ 1 on the band: the band-limited stand-in for δ.
    pub fn dirac(lattice: Arc<FrequencyLattice>, grid: TorusGrid<T>) -> Result<Self> {
        Self::from_hat(lattice, grid, "dirac-band", |_, _| T::one())
    }

    /// w ≡ c (mean mode only).
    pub fn constant(lattice: Arc<FrequencyLattice>, grid: TorusGrid<T>, c: T) -> Result<Self> {
        Self::from_hat(lattice, grid, "constant", |_, n2| if n2 == 0 { c } else { T::zero() })
    }

    /// Periodized unit-mass Gaussian of width σ: ŵ(ξ) = e^{−2π²σ²|ξ|²}.
    pub fn gaussian(lattice: Arc<FrequencyLattice>, grid: TorusGrid<T>, sigma: T) -> Result<Self> {
        if !(sigma > T::zero()) {
            return Err(domain("gaussian width must be positive"));
        }
        let c = T::lit(2.0) * T::PI() * T::PI() * sigma * sigma;
        Self::from_hat(lattice, grid, "W^{s,1} smooth", move |_, n2| (-c * T::of_int(n2)).exp())
    }

    /// Band truncation of |z|^{−a}: ŵ(ξ) = |ξ|^{−(d−a)} for ξ ≠ 0, ŵ(0) = 0.
    pub fn singular_power(lattice: Arc<FrequencyLattice>, grid: TorusGrid<T>, a: T) -> Result<Self> {
        let d = T::of_int(lattice.d() as i64);
        if !(a > T::zero() && a < d) {
            return Err(domain(format!("singular power needs 0 < a < d, got {a}")));
        }
        let class = format!("besov truncation |z|^-{a}");
        Self::from_hat(lattice, grid, &class, move |_, n2| {
            if n2 == 0 {
                T::zero()
            } else {
                T::of_int(n2).sqrt().powf(a - d)
            }
        })
    }

    pub fn hat(&self) -> &[C<T>] {
        self.w.coeffs()
    }

    pub fn is_zero(&self) -> bool {
        self.hat().iter().all(|c| c.norm() == T::zero())
    }

    /// ŵ ≥ 0 on every mode.
    pub fn is_positive_definite(&self) -> bool {
        self.hat().iter().all(|c| c.re >= T::zero() && c.im.abs() <= T::lit(1e-14))
    }

    fn check_compatible(&self, u: &SpectralField<T>) -> Result<()> {
        if *self.w.lattice() != *u.lattice() || self.w.grid() != u.grid() {
            return Err(mismatch("potential and field live on different bands or grids"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig<T> {
    /// Final time T.
    pub t_final: T,
    /// Number of time samples on [0, T], endpoints included.
    pub n_t: usize,
    pub max_picard: usize,
    pub tol: T,
    pub n: usize,
    pub m: usize,
    /// Triples (q, r, r̃) defining the Picard distance; empty means the default.
    #[serde(default)]
    pub metric: Vec<[Exponent<T>; 3]>,
}

impl<T: Real> SolverConfig<T> {
    pub fn new(t_final: T, n_t: usize, n: usize, m: usize) -> Self {
        Self { t_final, n_t, max_picard: 50, tol: T::lit(1e-12), n, m, metric: Vec::new() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_t < 16 {
            return Err(domain(format!("need at least 16 time samples, got {}", self.n_t)));
        }
        if !(self.tol > T::zero()) {
            return Err(domain("tolerance must be positive"));
        }
        if !(self.t_final > T::zero()) {
            return Err(domain("final time must be positive"));
        }
        if self.max_picard == 0 {
            return Err(domain("need at least one Picard iteration"));
        }
        Ok(())
    }

    pub(crate) fn check_field(&self, f: &SpectralField<T>) -> Result<()> {
        if f.lattice().n() != self.n || f.grid().m() != self.m {
            return Err(mismatch(format!(
                "field has band {} and grid {}, config expects {} and {}",
                f.lattice().n(),
                f.grid().m(),
                self.n,
                self.m
            )));
        }
        Ok(())
    }

    /// The configured distance triples, or the default: the triple built for
    /// the nonlinear estimate when d ≥ 3, and L^∞_t L²_z otherwise.
    pub fn metric_triples(&self, d: usize, p: T) -> Vec<[Exponent<T>; 3]> {
        if !self.metric.is_empty() {
            return self.metric.clone();
        }
        match nonlinear_triple(d, p.to_f64_lossy(), 0.5) {
            Ok((_, t)) => vec![[conv(t.q), conv(t.r), conv(t.rt)]],
            Err(_) => vec![[Exponent::Infinite, Exponent::Finite(T::lit(2.0)), Exponent::Finite(T::lit(2.0))]],
        }
    }
}

fn conv<T: Real>(e: Exponent<f64>) -> Exponent<T> {
    match e {
        Exponent::Finite(v) => Exponent::Finite(T::lit(v)),
        Exponent::Infinite => Exponent::Infinite,
    }
}

/// F_p applied to the samples and projected back onto the band.
pub fn eval_nonlinearity<T: Real>(field: &SpectralField<T>, spec: &NonlinearitySpec<T>) -> Result<SpectralField<T>> {
    if !(spec.p > T::one()) {
        return Err(domain("growth exponent must exceed 1"));
    }
    let values: Vec<C<T>> = field.samples().iter().map(|&z| spec.apply(z)).collect();
    SpectralField::from_samples(field.lattice_arc().clone(), field.grid().clone(), &values)
}

/// The full nonlinearity G(u): ŵ·F̂_p(u) for the local variants,
/// P[(w ∗ ±|u|^{p−1}) u] for the mean-field variant.
pub fn hartree_term<T: Real>(u: &SpectralField<T>, w: &PotentialSpec<T>, spec: &NonlinearitySpec<T>) -> Result<SpectralField<T>> {
    w.check_compatible(u)?;
    match spec.variant {
        Variant::Gauge | Variant::NonGauge => {
            let f = eval_nonlinearity(u, spec)?;
            let coeffs = f.coeffs().iter().zip(w.hat()).map(|(&a, &b)| a * b).collect();
            SpectralField::from_coeffs(u.lattice_arc().clone(), u.grid().clone(), coeffs)
        }
        Variant::Hartree => {
            let v = mean_field(u, w, spec)?;
            let values: Vec<C<T>> = u.samples().iter().zip(&v).map(|(&z, &vz)| z * vz).collect();
            SpectralField::from_samples(u.lattice_arc().clone(), u.grid().clone(), &values)
        }
    }
}

/// Real samples of V = ±w ∗ |u|^{p−1} (ŵ vanishes off the band, so V is
/// band-limited).
pub(crate) fn mean_field<T: Real>(u: &SpectralField<T>, w: &PotentialSpec<T>, spec: &NonlinearitySpec<T>) -> Result<Vec<T>> {
    let s = spec.signed();
    let rho: Vec<C<T>> = u.moduli().into_iter().map(|m| C::new(s * m.powf(spec.p - T::one()), T::zero())).collect();
    let rho_hat = u.grid().analyze(u.lattice(), &rho)?;
    let coeffs = rho_hat.iter().zip(w.hat()).map(|(&a, &b)| a * b).collect();
    let v = SpectralField::from_coeffs(u.lattice_arc().clone(), u.grid().clone(), coeffs)?;
    Ok(v.samples().iter().map(|z| z.re).collect())
}

/// V̂ over the grid bins for V = ±w ∗ |u|^{p−1}.
pub(crate) fn mean_field_hat<T: Real>(u: &SpectralField<T>, w: &PotentialSpec<T>, spec: &NonlinearitySpec<T>) -> Result<Vec<C<T>>> {
    let s = spec.signed();
    let rho: Vec<C<T>> = u.moduli().into_iter().map(|m| C::new(s * m.powf(spec.p - T::one()), T::zero())).collect();
    convolution_potential(u.lattice(), w.hat(), u.grid(), &rho)
}

/// The error raised when a step produces non-finite values.
pub(crate) fn check_finite<T: Real>(f: &SpectralField<T>, what: &str) -> Result<()> {
    if f.coeffs().iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numeric(format!("{what} produced non-finite coefficients")))
    }
}
