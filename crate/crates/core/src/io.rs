//! Field, trajectory and checkpoint records.
//!
//! Binary field layout (`TSF1`), all integers and floats little-endian:
//!
//! | offset | size | content |
//! |-------:|-----:|---------|
//! | 0 | 4 | magic `TSF1` |
//! | 4 | 4×4 | d, k, N, M as u32 |
//! | 20 | 8 | coefficient count L = (2N+1)^d as u64 |
//! | 28 | 16·L | (re, im) as f64 pairs in lexicographic ξ order |
//!
//! The JSON form carries the same data: `{d, k, n, m, coeffs}` with `coeffs`
//! the interleaved list `[re₀, im₀, re₁, im₁, …]`.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::ensemble::OrthonormalEnsemble;
use crate::error::{mismatch, Error, Result};
use crate::field::SpectralField;
use crate::grid::TorusGrid;
use crate::lattice::FrequencyLattice;
use crate::scalar::{Real, C};
use crate::trajectory::{QuadratureRule, TimeGrid, Trajectory};

const MAGIC: &[u8; 4] = b"TSF1";
const HEADER: usize = 28;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldRecord {
    pub d: usize,
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub coeffs: Vec<f64>,
}

fn interleave<T: Real>(coeffs: &[C<T>]) -> Vec<f64> {
    coeffs.iter().flat_map(|c| [c.re.to_f64_lossy(), c.im.to_f64_lossy()]).collect()
}

fn deinterleave<T: Real>(values: &[f64]) -> Vec<C<T>> {
    values.chunks_exact(2).map(|p| C::new(T::lit(p[0]), T::lit(p[1]))).collect()
}

fn shape<T: Real>(lattice: Arc<FrequencyLattice>, grid: TorusGrid<T>, coeffs: &[f64]) -> Result<(Arc<FrequencyLattice>, TorusGrid<T>)> {
    if coeffs.len() != 2 * lattice.len() {
        return Err(mismatch(format!("record holds {} reals, band needs {}", coeffs.len(), 2 * lattice.len())));
    }
    Ok((lattice, grid))
}

impl FieldRecord {
    pub fn from_field<T: Real>(f: &SpectralField<T>) -> Self {
        let lat = f.lattice();
        Self { d: lat.d(), k: lat.k(), n: lat.n(), m: f.grid().m(), coeffs: interleave(f.coeffs()) }
    }

    pub fn to_field<T: Real>(&self) -> Result<SpectralField<T>> {
        let lattice = Arc::new(FrequencyLattice::new(self.d, self.k, self.n)?);
        let grid = TorusGrid::new(self.d, self.k, self.m)?;
        let (lattice, grid) = shape(lattice, grid, &self.coeffs)?;
        SpectralField::from_coeffs(lattice, grid, deinterleave(&self.coeffs))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER + 8 * self.coeffs.len());
        out.extend_from_slice(MAGIC);
        for v in [self.d, self.k, self.n, self.m] {
            out.extend_from_slice(&(v as u32).to_le_bytes());
        }
        out.extend_from_slice(&((self.coeffs.len() / 2) as u64).to_le_bytes());
        for v in &self.coeffs {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER || &bytes[..4] != MAGIC {
            return Err(Error::Numeric("not a TSF1 field record".into()));
        }
        let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap()) as usize;
        let len = u64::from_le_bytes(bytes[20..28].try_into().unwrap()) as usize;
        let body = &bytes[HEADER..];
        if body.len() != 16 * len {
            return Err(mismatch(format!("TSF1 body has {} bytes, header announces {len} coefficients", body.len())));
        }
        let coeffs = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        Ok(Self { d: u32_at(4), k: u32_at(8), n: u32_at(12), m: u32_at(16), coeffs })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub d: usize,
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub rule: QuadratureRule,
    pub start: f64,
    pub end: f64,
    pub times: Vec<f64>,
    pub weights: Vec<f64>,
    /// One interleaved coefficient list per time.
    pub coeffs: Vec<Vec<f64>>,
}

impl TrajectoryRecord {
    pub fn from_trajectory<T: Real>(traj: &Trajectory<T>) -> Result<Self> {
        let first = traj.fields.first().ok_or_else(|| Error::Empty("trajectory".into()))?;
        let lat = first.lattice();
        let g = &traj.grid;
        Ok(Self {
            d: lat.d(),
            k: lat.k(),
            n: lat.n(),
            m: first.grid().m(),
            rule: g.rule,
            start: g.start.to_f64_lossy(),
            end: g.end.to_f64_lossy(),
            times: g.times.iter().map(|t| t.to_f64_lossy()).collect(),
            weights: g.weights.iter().map(|w| w.to_f64_lossy()).collect(),
            coeffs: traj.fields.iter().map(|f| interleave(f.coeffs())).collect(),
        })
    }

    pub fn to_trajectory<T: Real>(&self) -> Result<Trajectory<T>> {
        let lattice = Arc::new(FrequencyLattice::new(self.d, self.k, self.n)?);
        let grid = TorusGrid::new(self.d, self.k, self.m)?;
        let times = TimeGrid {
            start: T::lit(self.start),
            end: T::lit(self.end),
            times: self.times.iter().map(|&t| T::lit(t)).collect(),
            weights: self.weights.iter().map(|&w| T::lit(w)).collect(),
            rule: self.rule,
        };
        let fields = self
            .coeffs
            .iter()
            .map(|c| {
                let (lattice, grid) = shape(lattice.clone(), grid.clone(), c)?;
                SpectralField::from_coeffs(lattice, grid, deinterleave(c))
            })
            .collect::<Result<_>>()?;
        Trajectory::new(times, fields)
    }
}

/// Orbitals and weights of a Hartree state at a recorded step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub d: usize,
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub step: usize,
    pub t: f64,
    pub weights: Vec<f64>,
    pub frames: Vec<Vec<f64>>,
}

impl Checkpoint {
    pub fn from_ensemble<T: Real>(ens: &OrthonormalEnsemble<T>, step: usize, t: T) -> Self {
        let lat = ens.lattice();
        Self {
            d: lat.d(),
            k: lat.k(),
            n: lat.n(),
            m: ens.grid().m(),
            step,
            t: t.to_f64_lossy(),
            weights: ens.weights().iter().map(|w| w.to_f64_lossy()).collect(),
            frames: ens.frames().iter().map(|f| interleave(f)).collect(),
        }
    }

    pub fn to_ensemble<T: Real>(&self) -> Result<OrthonormalEnsemble<T>> {
        let lattice = Arc::new(FrequencyLattice::new(self.d, self.k, self.n)?);
        let grid = TorusGrid::new(self.d, self.k, self.m)?;
        for f in &self.frames {
            shape(lattice.clone(), grid.clone(), f)?;
        }
        let frames = self.frames.iter().map(|f| deinterleave(f)).collect();
        OrthonormalEnsemble::new(lattice, grid, frames, self.weights.iter().map(|&w| T::lit(w)).collect())
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io { path: path.display().to_string(), message: e.to_string() }
}

pub fn write_json<V: Serialize>(path: &Path, value: &V) -> Result<()> {
    let text = serde_json::to_string(value).map_err(|e| io_err(path, e))?;
    fs::write(path, text).map_err(|e| io_err(path, e))
}

pub fn read_json<V: for<'de> Deserialize<'de>>(path: &Path) -> Result<V> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| io_err(path, e))
}

pub fn write_field<T: Real>(path: &Path, f: &SpectralField<T>) -> Result<()> {
    fs::write(path, FieldRecord::from_field(f).to_bytes()).map_err(|e| io_err(path, e))
}

pub fn read_field<T: Real>(path: &Path) -> Result<SpectralField<T>> {
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    FieldRecord::from_bytes(&bytes)?.to_field()
}
