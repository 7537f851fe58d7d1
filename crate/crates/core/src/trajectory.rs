use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::field::SpectralField;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureRule {
    /// Composite trapezoid on a closed interval, endpoints included.
    Trapezoid,
    /// Equal weights on a full period; exact for trigonometric polynomials
    /// of degree below the sample count.
    Periodic,
}

/// Time samples and quadrature weights over an interval.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid<T> {
    pub start: T,
    pub end: T,
    pub times: Vec<T>,
    pub weights: Vec<T>,
    pub rule: QuadratureRule,
}

impl<T: Real> TimeGrid<T> {
    /// n + 1 points on [a, b] with trapezoid weights.
    pub fn trapezoid(a: T, b: T, intervals: usize) -> Result<Self> {
        if intervals == 0 || !(b > a) {
            return Err(domain("trapezoid grid needs b > a and at least one interval"));
        }
        let h = (b - a) / T::of_int(intervals as i64);
        let times = (0..=intervals).map(|i| a + h * T::of_int(i as i64)).collect();
        let mut weights = vec![h; intervals + 1];
        weights[0] = h / T::lit(2.0);
        weights[intervals] = h / T::lit(2.0);
        Ok(Self { start: a, end: b, times, weights, rule: QuadratureRule::Trapezoid })
    }

    /// n equally weighted points a + i·L/n covering one period of length L.
    pub fn periodic(a: T, length: T, n: usize) -> Result<Self> {
        if n == 0 || !(length > T::zero()) {
            return Err(domain("periodic grid needs a positive length and at least one sample"));
        }
        let h = length / T::of_int(n as i64);
        let times = (0..n).map(|i| a + h * T::of_int(i as i64)).collect();
        Ok(Self { start: a, end: a + length, times, weights: vec![h; n], rule: QuadratureRule::Periodic })
    }

    /// Sample count covering 𝕋 at four times the Nyquist rate for the
    /// integer phases |ξ|² ≤ dN².
    pub fn torus_samples(d: usize, n: usize) -> usize {
        4 * (d * n * n + 1)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn length(&self) -> T {
        self.end - self.start
    }

    pub fn step(&self) -> T {
        match self.rule {
            QuadratureRule::Periodic => self.weights[0],
            QuadratureRule::Trapezoid => self.times.get(1).map_or(T::zero(), |&t1| t1 - self.times[0]),
        }
    }
}

/// A time-sampled sequence of fields with its quadrature rule.
#[derive(Debug, Clone)]
pub struct Trajectory<T: Real> {
    pub grid: TimeGrid<T>,
    pub fields: Vec<SpectralField<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn new(grid: TimeGrid<T>, fields: Vec<SpectralField<T>>) -> Result<Self> {
        if grid.len() != fields.len() {
            return Err(Error::Mismatch(format!("{} times but {} fields", grid.len(), fields.len())));
        }
        Ok(Self { grid, fields })
    }

    pub fn from_fn(grid: TimeGrid<T>, f: impl Fn(T) -> SpectralField<T> + Sync) -> Self {
        use rayon::prelude::*;
        let fields = grid.times.par_iter().map(|&t| f(t)).collect();
        Self { grid, fields }
    }

    /// Free evolution of `f` sampled on `grid`.
    pub fn free(f: &SpectralField<T>, grid: TimeGrid<T>) -> Self {
        Self::from_fn(grid, |t| f.free_propagate(t))
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn times(&self) -> &[T] {
        &self.grid.times
    }

    pub fn weights(&self) -> &[T] {
        &self.grid.weights
    }

    pub fn last(&self) -> Option<&SpectralField<T>> {
        self.fields.last()
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::Mismatch("trajectories have different lengths".into()));
        }
        let fields = self.fields.iter().zip(&other.fields).map(|(a, b)| a.sub(b)).collect::<Result<_>>()?;
        Ok(Self { grid: self.grid.clone(), fields })
    }
}
