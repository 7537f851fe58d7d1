use rayon::prelude::*;
use serde::Serialize;

use super::{check_finite, duhamel_trajectory, hartree_term, NonlinearitySpec, PotentialSpec, SolverConfig};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::norms::spacetime_norm;
use crate::scalar::{Exponent, Real};
use crate::trajectory::{TimeGrid, Trajectory};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PicardHistory<T> {
    /// d(u^{(n+1)}, u^{(n)}) per iteration.
    pub distances: Vec<T>,
    /// Successive distance ratios.
    pub ratios: Vec<T>,
    pub converged: bool,
    /// Distance moved by one extra application of Φ after convergence.
    pub certificate: Option<T>,
}

#[derive(Debug, Clone)]
pub struct PicardSolution<T: Real> {
    pub trajectory: Trajectory<T>,
    pub history: PicardHistory<T>,
}

/// sup over the triples of ‖u − v‖_{L^q_t L^r_x L^{r̃}_y}.
pub fn spacetime_distance<T: Real>(u: &Trajectory<T>, v: &Trajectory<T>, metric: &[[Exponent<T>; 3]]) -> Result<T> {
    let diff = u.sub(v)?;
    metric
        .iter()
        .map(|[q, r, rt]| spacetime_norm(&diff, *q, *r, *rt))
        .try_fold(T::zero(), |m, d| d.map(|d| m.max(d)))
}

fn forcing<T: Real>(u: &Trajectory<T>, w: &PotentialSpec<T>, spec: &NonlinearitySpec<T>) -> Result<Trajectory<T>> {
    let fields: Vec<SpectralField<T>> = u.fields.par_iter().map(|ui| hartree_term(ui, w, spec)).collect::<Result<_>>()?;
    Trajectory::new(u.grid.clone(), fields)
}

/// Φ(u)(t) = e^{−itΔ}f − i∫₀^t e^{−i(t−t′)Δ}G(u(t′))dt′ on the sample times of u.
pub fn picard_map<T: Real>(f: &SpectralField<T>, u: &Trajectory<T>, w: &PotentialSpec<T>, spec: &NonlinearitySpec<T>) -> Result<Trajectory<T>> {
    let out = duhamel_trajectory(f, &forcing(u, w, spec)?)?;
    if let Some(last) = out.last() {
        check_finite(last, "Picard step")?;
    }
    Ok(out)
}

/// Iterates Φ from the free evolution until the distance between successive
/// iterates drops below `config.tol`. Three consecutive distance ratios ≥ 1
/// abort with [`Error::Divergence`].
pub fn picard_solve<T: Real>(
    f: &SpectralField<T>,
    w: &PotentialSpec<T>,
    spec: &NonlinearitySpec<T>,
    config: &SolverConfig<T>,
) -> Result<PicardSolution<T>> {
    config.validate()?;
    config.check_field(f)?;
    let grid = TimeGrid::trapezoid(T::zero(), config.t_final, config.n_t - 1)?;
    picard_on(f, w, spec, config, grid)
}

fn picard_on<T: Real>(
    f: &SpectralField<T>,
    w: &PotentialSpec<T>,
    spec: &NonlinearitySpec<T>,
    config: &SolverConfig<T>,
    grid: TimeGrid<T>,
) -> Result<PicardSolution<T>> {
    let metric = config.metric_triples(f.lattice().d(), spec.p);
    let mut u = Trajectory::free(f, grid);
    let mut history = PicardHistory { distances: Vec::new(), ratios: Vec::new(), converged: false, certificate: None };
    let mut streak = 0;
    for _ in 0..config.max_picard {
        let next = picard_map(f, &u, w, spec)?;
        let dist = spacetime_distance(&next, &u, &metric)?;
        if let Some(&prev) = history.distances.last() {
            if prev > T::zero() {
                let ratio = dist / prev;
                history.ratios.push(ratio);
                streak = if ratio >= T::one() { streak + 1 } else { 0 };
                if streak >= 3 {
                    return Err(Error::Divergence { ratio: ratio.to_f64_lossy(), streak });
                }
            }
        }
        history.distances.push(dist);
        u = next;
        if dist < config.tol {
            history.converged = true;
            let again = picard_map(f, &u, w, spec)?;
            history.certificate = Some(spacetime_distance(&again, &u, &metric)?);
            break;
        }
    }
    tracing::debug!(iterations = history.distances.len(), converged = history.converged, "picard finished");
    Ok(PicardSolution { trajectory: u, history })
}

#[derive(Debug, Clone)]
pub struct Refinement<T: Real> {
    pub solution: PicardSolution<T>,
    /// Distance between consecutive refinements on the coarser time samples.
    pub moves: Vec<T>,
    pub n_t: usize,
}

/// Repeats [`picard_solve`] with the time step halved until the solution
/// moves by less than tol/4 on the shared samples.
pub fn picard_refine<T: Real>(
    f: &SpectralField<T>,
    w: &PotentialSpec<T>,
    spec: &NonlinearitySpec<T>,
    config: &SolverConfig<T>,
    max_doublings: usize,
) -> Result<Refinement<T>> {
    let metric = config.metric_triples(f.lattice().d(), spec.p);
    let mut current = picard_solve(f, w, spec, config)?;
    let mut n_t = config.n_t;
    let mut moves = Vec::new();
    for _ in 0..max_doublings {
        let finer_n = 2 * (n_t - 1) + 1;
        let grid = TimeGrid::trapezoid(T::zero(), config.t_final, finer_n - 1)?;
        let finer = picard_on(f, w, spec, config, grid)?;
        let coarse_view = Trajectory::new(
            current.trajectory.grid.clone(),
            finer.trajectory.fields.iter().step_by(2).cloned().collect(),
        )?;
        let mv = spacetime_distance(&coarse_view, &current.trajectory, &metric)?;
        moves.push(mv);
        current = finer;
        n_t = finer_n;
        if mv < config.tol / T::lit(4.0) {
            break;
        }
    }
    Ok(Refinement { solution: current, moves, n_t })
}
