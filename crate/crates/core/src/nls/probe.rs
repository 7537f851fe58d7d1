use rayon::prelude::*;
use serde::Serialize;

use super::{hartree_term, NonlinearitySpec, PotentialSpec};
use crate::admissibility::AdmissibleTriple;
use crate::error::{domain, Error, Result};
use crate::field::multipliers::{bracket, bracket_y};
use crate::field::SpectralField;
use crate::norms::{lr_sobolev_norm, spacetime_norm};
use crate::scalar::{Exponent, Real};
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateProbe<T> {
    pub ratio: T,
    /// ‖⟨∇_y⟩^s⟨∇⟩^{2/q} G(u)‖_{L^{q′}L^{r′}L^{r̃′}}
    pub numerator: T,
    /// ‖w‖_{W^{2/q,1}}
    pub w_norm: T,
    /// ‖u‖_{L^q L^r W^{s,r̃}_y}
    pub u_norm: T,
    /// Set when both sides vanish and the ratio is reported as 0.
    pub degenerate: bool,
}

/// Ratio of the two sides of the nonlinear estimate over the time window of `u`.
pub fn nonlinear_estimate_probe<T: Real>(
    u: &Trajectory<T>,
    w: &PotentialSpec<T>,
    spec: &NonlinearitySpec<T>,
    s: T,
    triple: &AdmissibleTriple<T>,
) -> Result<EstimateProbe<T>> {
    if !(s >= T::zero() && s < T::one()) {
        return Err(domain(format!("need 0 ≤ s < 1, got {s}")));
    }
    let first = u.fields.first().ok_or_else(|| Error::Empty("trajectory".into()))?;
    if !triple.refined || triple.d != first.lattice().d() {
        return Err(Error::Inadmissible(format!(
            "({}, {}, {}) is not in the refined set for d = {}",
            triple.q,
            triple.r,
            triple.rt,
            first.lattice().d()
        )));
    }
    let two_q = T::lit(2.0) * triple.q.recip();
    let g: Vec<SpectralField<T>> = u
        .fields
        .par_iter()
        .map(|ui| {
            let gi = hartree_term(ui, w, spec)?;
            let by = bracket_y(s);
            let b = bracket(two_q);
            gi.apply_multiplier(|p| by(p) * b(p))
        })
        .collect::<Result<_>>()?;
    let g = Trajectory::new(u.grid.clone(), g)?;
    let numerator = spacetime_norm(&g, triple.q.conjugate(), triple.r.conjugate(), triple.rt.conjugate())?;
    let w_norm = lr_sobolev_norm(&w.w, two_q, Exponent::Finite(T::one()))?;
    let uy: Vec<SpectralField<T>> = u.fields.iter().map(|ui| ui.apply_multiplier(bracket_y(s))).collect::<Result<_>>()?;
    let u_norm = spacetime_norm(&Trajectory::new(u.grid.clone(), uy)?, triple.q, triple.r, triple.rt)?;
    let denominator = w_norm * u_norm.powf(spec.p);
    if denominator == T::zero() {
        if numerator == T::zero() {
            return Ok(EstimateProbe { ratio: T::zero(), numerator, w_norm, u_norm, degenerate: true });
        }
        return Err(Error::UndefinedRatio);
    }
    Ok(EstimateProbe { ratio: numerator / denominator, numerator, w_norm, u_norm, degenerate: false })
}
