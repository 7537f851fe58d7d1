use serde::Serialize;

use super::{check_finite, hartree_term, mean_field_hat, NonlinearitySpec, PotentialSpec, SolverConfig, Variant};
use crate::error::Result;
use crate::field::SpectralField;
use crate::meanfield::potential_propagator;
use crate::scalar::{Real, C};
use crate::trajectory::{TimeGrid, Trajectory};

enum Substep {
    /// Band-unitary exponential of the (real) potential multiplying u.
    Unitary,
    /// Explicit midpoint on i∂_t u = G(u).
    Midpoint,
}

fn substep_kind<T: Real>(w: &PotentialSpec<T>, spec: &NonlinearitySpec<T>) -> Substep {
    match spec.variant {
        Variant::Hartree => Substep::Unitary,
        Variant::Gauge if w.hat().iter().all(|c| *c == C::new(T::one(), T::zero())) => Substep::Unitary,
        _ => Substep::Midpoint,
    }
}

/// V̂ over grid bins for the potential that multiplies u in the unitary
/// substep: ±w ∗ |u|^{p−1} for the mean-field form, ±|u|^{p−1} unfiltered for
/// the local gauge form.
fn potential_hat<T: Real>(u: &SpectralField<T>, w: &PotentialSpec<T>, spec: &NonlinearitySpec<T>) -> Result<Vec<C<T>>> {
    match spec.variant {
        Variant::Hartree => mean_field_hat(u, w, spec),
        _ => {
            let s = T::of_int(spec.sign as i64);
            let v: Vec<C<T>> = u.moduli().into_iter().map(|m| C::new(s * m.powf(spec.p - T::one()), T::zero())).collect();
            u.grid().analyze_full(&v)
        }
    }
}

fn unitary_apply<T: Real>(u: &SpectralField<T>, v_hat: &[C<T>], tau: T) -> Result<SpectralField<T>> {
    let prop = potential_propagator(u.lattice(), u.grid(), v_hat, tau)?;
    SpectralField::from_coeffs(u.lattice_arc().clone(), u.grid().clone(), prop.mul_vec(u.coeffs())?)
}

fn nonlinear_step<T: Real>(u: &SpectralField<T>, w: &PotentialSpec<T>, spec: &NonlinearitySpec<T>, h: T, kind: &Substep) -> Result<SpectralField<T>> {
    match kind {
        Substep::Unitary => {
            let half = unitary_apply(u, &potential_hat(u, w, spec)?, h / T::lit(2.0))?;
            unitary_apply(u, &potential_hat(&half, w, spec)?, h)
        }
        Substep::Midpoint => {
            let g0 = hartree_term(u, w, spec)?;
            let mid = u.add(&g0.scale(C::new(T::zero(), -h / T::lit(2.0))))?;
            let g1 = hartree_term(&mid, w, spec)?;
            u.add(&g1.scale(C::new(T::zero(), -h)))
        }
    }
}

/// Strang splitting: half free flight, nonlinear substep, half free flight.
/// Returns the solution at all n_t sample times of [0, T].
pub fn splitstep_solve<T: Real>(
    f: &SpectralField<T>,
    w: &PotentialSpec<T>,
    spec: &NonlinearitySpec<T>,
    config: &SolverConfig<T>,
) -> Result<Trajectory<T>> {
    config.validate()?;
    config.check_field(f)?;
    let grid = TimeGrid::trapezoid(T::zero(), config.t_final, config.n_t - 1)?;
    let h = grid.step();
    let kind = substep_kind(w, spec);
    let skip = w.is_zero();
    let mut fields = Vec::with_capacity(grid.len());
    let mut u = f.clone();
    fields.push(u.clone());
    for n in 1..grid.len() {
        u = if skip {
            f.free_propagate(grid.times[n])
        } else {
            let a = u.free_propagate(h / T::lit(2.0));
            let b = nonlinear_step(&a, w, spec, h, &kind)?;
            b.free_propagate(h / T::lit(2.0))
        };
        check_finite(&u, "split step")?;
        fields.push(u.clone());
    }
    Trajectory::new(grid, fields)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfConvergence<T> {
    pub steps: Vec<usize>,
    /// ‖u_h(T) − u_{h/2}(T)‖_{L²} for consecutive step counts.
    pub differences: Vec<T>,
    /// log₂ of consecutive difference ratios.
    pub orders: Vec<T>,
}

/// Step-halving study of [`splitstep_solve`] at the final time.
pub fn self_convergence<T: Real>(
    f: &SpectralField<T>,
    w: &PotentialSpec<T>,
    spec: &NonlinearitySpec<T>,
    config: &SolverConfig<T>,
    levels: usize,
) -> Result<SelfConvergence<T>> {
    let mut steps = Vec::new();
    let mut finals = Vec::new();
    let mut intervals = config.n_t - 1;
    for _ in 0..levels.max(3) {
        let cfg = SolverConfig { n_t: intervals + 1, ..config.clone() };
        let traj = splitstep_solve(f, w, spec, &cfg)?;
        finals.push(traj.fields.last().cloned().expect("nonempty trajectory"));
        steps.push(intervals);
        intervals *= 2;
    }
    let differences: Vec<T> = finals.windows(2).map(|p| p[0].sub(&p[1]).map(|d| d.l2_norm())).collect::<Result<_>>()?;
    let orders = differences.windows(2).map(|p| (p[0] / p[1]).log2()).collect();
    Ok(SelfConvergence { steps, differences, orders })
}
