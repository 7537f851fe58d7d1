use crate::error::{domain, Error, Result};
use crate::field::SpectralField;
use crate::scalar::{Real, C};
use crate::trajectory::{QuadratureRule, Trajectory};

fn minus_i<T: Real>() -> C<T> {
    C::new(T::zero(), -T::one())
}

/// e^{−itΔ}f − i∫₀^t e^{−i(t−t′)Δ}G(t′)dt′ by the composite trapezoid on the
/// samples of `g` (which must start at 0); a partial last interval uses the
/// linear interpolant of G.
pub fn duhamel_apply<T: Real>(f: &SpectralField<T>, g: &Trajectory<T>, t: T) -> Result<SpectralField<T>> {
    if g.is_empty() {
        return Err(Error::Empty("forcing trajectory".into()));
    }
    if g.grid.rule != QuadratureRule::Trapezoid || g.times()[0] != T::zero() {
        return Err(domain("forcing must be sampled by a trapezoid grid starting at 0"));
    }
    let end = *g.times().last().unwrap();
    let slack = T::lit(1e-12) * end.abs().max(T::one());
    if t < T::zero() || t > end + slack {
        return Err(domain(format!("t = {t} lies outside the forcing span [0, {end}]")));
    }
    let free = f.free_propagate(t);
    if t == T::zero() {
        return Ok(free);
    }
    let times = g.times();
    let mut acc = f.scale(C::new(T::zero(), T::zero()));
    let mut j = 0;
    while j + 1 < times.len() && times[j + 1] <= t + slack {
        let h = times[j + 1] - times[j];
        let a = g.fields[j].free_propagate(t - times[j]);
        let b = g.fields[j + 1].free_propagate(t - times[j + 1]);
        acc = acc.add(&a.add(&b)?.scale(C::new(h / T::lit(2.0), T::zero())))?;
        j += 1;
    }
    if j + 1 < times.len() && t > times[j] + slack {
        let h = t - times[j];
        let theta = h / (times[j + 1] - times[j]);
        let gt = g.fields[j]
            .scale(C::new(T::one() - theta, T::zero()))
            .add(&g.fields[j + 1].scale(C::new(theta, T::zero())))?;
        let a = g.fields[j].free_propagate(h);
        acc = acc.add(&a.add(&gt)?.scale(C::new(h / T::lit(2.0), T::zero())))?;
    }
    free.add(&acc.scale(minus_i()))
}

/// The Duhamel map evaluated at every sample time of `g`, using the
/// cumulative form I_n = U(h)I_{n−1} + (h/2)(U(h)G_{n−1} + G_n).
pub fn duhamel_trajectory<T: Real>(f: &SpectralField<T>, g: &Trajectory<T>) -> Result<Trajectory<T>> {
    if g.is_empty() {
        return Err(Error::Empty("forcing trajectory".into()));
    }
    if g.grid.rule != QuadratureRule::Trapezoid || g.times()[0] != T::zero() {
        return Err(domain("forcing must be sampled by a trapezoid grid starting at 0"));
    }
    f.check_same(&g.fields[0])?;
    let times = g.times();
    let mut out = Vec::with_capacity(g.len());
    let mut acc = f.scale(C::new(T::zero(), T::zero()));
    out.push(f.clone());
    for n in 1..g.len() {
        let h = times[n] - times[n - 1];
        let half = C::new(h / T::lit(2.0), T::zero());
        acc = acc.add(&g.fields[n - 1].scale(half))?.free_propagate(h).add(&g.fields[n].scale(half))?;
        out.push(f.free_propagate(times[n]).add(&acc.scale(minus_i()))?);
    }
    Trajectory::new(g.grid.clone(), out)
}
