use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// The frequency cube ℤ^d ∩ [−N, N]^d with a (d−k, k) coordinate split.
///
/// Points are enumerated lexicographically with the first coordinate varying
/// slowest; the x-block is the first `d − k` coordinates and the y-block the
/// last `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LatticeShape", into = "LatticeShape")]
pub struct FrequencyLattice {
    d: usize,
    k: usize,
    n: usize,
    coords: Vec<i32>,
    norms_sq: Vec<i64>,
    norms_sq_y: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct LatticeShape {
    d: usize,
    k: usize,
    n: usize,
}

impl TryFrom<LatticeShape> for FrequencyLattice {
    type Error = crate::error::Error;
    fn try_from(s: LatticeShape) -> Result<Self> {
        FrequencyLattice::new(s.d, s.k, s.n)
    }
}

impl From<FrequencyLattice> for LatticeShape {
    fn from(l: FrequencyLattice) -> Self {
        LatticeShape { d: l.d, k: l.k, n: l.n }
    }
}

/// A view of one lattice point.
#[derive(Debug, Clone, Copy)]
pub struct Point<'a> {
    pub index: usize,
    pub xi: &'a [i32],
    pub norm_sq: i64,
    pub norm_sq_y: i64,
}

impl Point<'_> {
    pub fn max_abs(&self) -> i32 {
        self.xi.iter().map(|c| c.abs()).max().unwrap_or(0)
    }
}

impl FrequencyLattice {
    pub fn new(d: usize, k: usize, n: usize) -> Result<Self> {
        if d == 0 {
            return Err(domain("dimension d must be at least 1"));
        }
        if k == 0 || k > d {
            return Err(domain(format!("split index k={k} must satisfy 1 <= k <= d={d}")));
        }
        if n == 0 {
            return Err(domain("truncation radius N must be at least 1"));
        }
        let side = 2 * n + 1;
        let card = side
            .checked_pow(d as u32)
            .filter(|&c| c <= 1 << 26)
            .ok_or_else(|| domain(format!("lattice (2N+1)^d with N={n}, d={d} is too large")))?;
        let mut coords = Vec::with_capacity(card * d);
        let mut norms_sq = Vec::with_capacity(card);
        let mut norms_sq_y = Vec::with_capacity(card);
        let mut digits = vec![0usize; d];
        for _ in 0..card {
            let mut s = 0i64;
            let mut sy = 0i64;
            for (axis, &dg) in digits.iter().enumerate() {
                let c = dg as i32 - n as i32;
                coords.push(c);
                s += (c as i64) * (c as i64);
                if axis >= d - k {
                    sy += (c as i64) * (c as i64);
                }
            }
            norms_sq.push(s);
            norms_sq_y.push(sy);
            for dg in digits.iter_mut().rev() {
                *dg += 1;
                if *dg < side {
                    break;
                }
                *dg = 0;
            }
        }
        Ok(Self { d, k, n, coords, norms_sq, norms_sq_y })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Truncation radius N.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.norms_sq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norms_sq.is_empty()
    }

    pub fn xi(&self, i: usize) -> &[i32] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn norm_sq(&self, i: usize) -> i64 {
        self.norms_sq[i]
    }

    pub fn norm_sq_y(&self, i: usize) -> i64 {
        self.norms_sq_y[i]
    }

    pub fn norms_sq(&self) -> &[i64] {
        &self.norms_sq
    }

    pub fn point(&self, i: usize) -> Point<'_> {
        Point { index: i, xi: self.xi(i), norm_sq: self.norms_sq[i], norm_sq_y: self.norms_sq_y[i] }
    }

    pub fn points(&self) -> impl Iterator<Item = Point<'_>> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    /// Position of ξ in the enumeration, or `None` off the cube.
    pub fn index_of(&self, xi: &[i32]) -> Option<usize> {
        if xi.len() != self.d {
            return None;
        }
        let side = 2 * self.n as i64 + 1;
        let mut idx = 0i64;
        for &c in xi {
            if c.unsigned_abs() as usize > self.n {
                return None;
            }
            idx = idx * side + (c as i64 + self.n as i64);
        }
        Some(idx as usize)
    }

    /// Index of −ξ.
    pub fn mirror(&self, i: usize) -> usize {
        self.len() - 1 - i
    }

    pub fn same_split(&self, other: &Self) -> bool {
        self.d == other.d && self.k == other.k
    }

    /// Largest |ξ|² on the cube, d·N².
    pub fn max_norm_sq(&self) -> i64 {
        (self.d * self.n * self.n) as i64
    }
}

pub fn build_lattice(d: usize, k: usize, n: usize) -> Result<FrequencyLattice> {
    FrequencyLattice::new(d, k, n)
}
