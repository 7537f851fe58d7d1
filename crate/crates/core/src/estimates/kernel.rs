use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::lattice::FrequencyLattice;
use crate::scalar::{cis_turns, phase_turns, Real, C};

/// K_N(t, x) = Σ_{|ξ| ≤ N} e^{2πi(xξ + tξ²)} in one dimension.
pub fn kernel_1d<T: Real>(t: T, x: T, n: usize) -> C<T> {
    let mut acc = C::new(T::one(), T::zero());
    for xi in 1..=n as i64 {
        let c = T::lit(2.0) * (T::TAU() * phase_turns(x, xi)).cos();
        acc = acc + cis_turns(phase_turns(t, xi * xi)) * c;
    }
    acc
}

/// Σ_{ξ ∈ S_{d,N}} e^{2πi(z·ξ + t|ξ|²)}, evaluated as a product of 1-D kernels.
pub fn kernel_value<T: Real>(t: T, z: &[T], lattice: &FrequencyLattice) -> C<T> {
    z.iter().fold(C::new(T::one(), T::zero()), |acc, &zi| acc * kernel_1d(t, zi, lattice.n()))
}

/// Sup-in-x record of the one-dimensional kernel over a set of times.
#[derive(Debug, Clone, Serialize)]
pub struct KernelProbe<T> {
    pub n: usize,
    pub x_points: usize,
    pub times: Vec<T>,
    /// sup_x |K_N(t, x)| per time.
    pub sup: Vec<T>,
    /// max_t |t|^{1/2} sup_x |K_N(t, x)|.
    pub sup_weighted: T,
    pub argmax_t: T,
}

/// sup_x |K_N(t, ·)| on an `x_points` grid for each time; times must be
/// nonzero and inside [−1/N, 1/N].
pub fn kernel_probe<T: Real>(n: usize, times: &[T], x_points: usize) -> Result<KernelProbe<T>> {
    if n == 0 {
        return Err(domain("N must be at least 1"));
    }
    if x_points < 2 * n + 1 {
        return Err(crate::error::Error::Aliasing { m: x_points, n, needed: 2 * n + 1 });
    }
    let window = T::one() / T::of_int(n as i64);
    for &t in times {
        if t == T::zero() || t.abs() > window {
            return Err(domain(format!("time {t} outside the window 0 < |t| ≤ 1/N")));
        }
    }
    let plan = FftPlanner::<T>::new().plan_fft_inverse(x_points);
    let sup: Vec<T> = times
        .par_iter()
        .map(|&t| {
            let mut buf = vec![C::new(T::zero(), T::zero()); x_points];
            for xi in -(n as i64)..=n as i64 {
                buf[xi.rem_euclid(x_points as i64) as usize] = cis_turns(phase_turns(t, xi * xi));
            }
            plan.process(&mut buf);
            buf.iter().fold(T::zero(), |m, z| m.max(z.norm()))
        })
        .collect();
    let (mut sup_weighted, mut argmax_t) = (T::zero(), times.first().copied().unwrap_or(T::zero()));
    for (&t, &s) in times.iter().zip(&sup) {
        let w = t.abs().sqrt() * s;
        if w > sup_weighted {
            sup_weighted = w;
            argmax_t = t;
        }
    }
    Ok(KernelProbe { n, x_points, times: times.to_vec(), sup, sup_weighted, argmax_t })
}

/// `count` log-spaced times in [eps, 1/(2N)].
pub fn log_times<T: Real>(eps: T, n: usize, count: usize) -> Result<Vec<T>> {
    let hi = T::one() / T::of_int(2 * n as i64);
    if !(eps > T::zero()) || eps >= hi || count < 2 {
        return Err(domain(format!("need 0 < eps < 1/(2N) and at least two samples (eps={eps}, N={n})")));
    }
    let ratio = (hi / eps).ln();
    Ok((0..count)
        .map(|i| {
            if i + 1 == count {
                hi
            } else {
                eps * (ratio * T::of_int(i as i64) / T::of_int(count as i64 - 1)).exp()
            }
        })
        .collect())
}

/// Weighted kernel sup per N over t ∈ [eps, 1/(2N)].
pub fn kernel_decay_scan<T: Real>(n_list: &[usize], eps: T, time_samples: usize, x_points: usize) -> Result<Vec<KernelProbe<T>>> {
    n_list.iter().map(|&n| kernel_probe(n, &log_times(eps, n, time_samples)?, x_points)).collect()
}
