//! Exponent algebra for Strichartz-type triples (q, r, r̃).
//!
//! All tests are phrased in reciprocals so that ∞ is the exact value 0.
//! Rational inputs (`Ratio<i64>`) are classified exactly; floating inputs use
//! a 10⁻⁹ tolerance on every equality and inequality.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Sub};

use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Exponent, Real};

pub trait ExponentScalar:
    Clone + Debug + PartialOrd + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self>
{
    fn ratio(num: i64, den: i64) -> Self;
    fn near(&self, other: &Self) -> bool;
    fn as_f64(&self) -> f64;

    fn ge_tol(&self, other: &Self) -> bool {
        self > other || self.near(other)
    }

    fn gt_tol(&self, other: &Self) -> bool {
        self > other && !self.near(other)
    }
}

impl<T: Real> ExponentScalar for T {
    fn ratio(num: i64, den: i64) -> Self {
        T::of_int(num) / T::of_int(den)
    }

    fn near(&self, other: &Self) -> bool {
        (*self - *other).abs() <= T::lit(1e-9)
    }

    fn as_f64(&self) -> f64 {
        self.to_f64_lossy()
    }
}

impl ExponentScalar for Ratio<i64> {
    fn ratio(num: i64, den: i64) -> Self {
        Ratio::new(num, den)
    }

    fn near(&self, other: &Self) -> bool {
        self == other
    }

    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// 1/p with 1/∞ = 0.
pub fn inv<Q: ExponentScalar>(p: &Exponent<Q>) -> Q {
    match p {
        Exponent::Finite(v) => Q::one() / v.clone(),
        Exponent::Infinite => Q::zero(),
    }
}

fn from_inv<Q: ExponentScalar>(a: Q) -> Exponent<Q> {
    if a.near(&Q::zero()) {
        Exponent::Infinite
    } else {
        Exponent::Finite(Q::one() / a)
    }
}

/// Position of (1/r, 1/q) in the unit-half square for the diagonal r = r̃.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    /// 2/q + d/r < d/2.
    DinhSide,
    /// 2/q + d/r = d/2.
    SharpLine,
    /// 2/q + d/r > d/2.
    TheoremSide,
    /// r = 2, q = ∞.
    EnergyCorner,
    /// 1/q = 1/2 with 1/r ≥ (d−2)/(2d): the excluded segment [B, D].
    BoundaryExcluded,
    OutsideSquare,
}

impl Region {
    pub fn tag(self) -> &'static str {
        match self {
            Region::DinhSide => "dinh-side",
            Region::SharpLine => "sharp-line",
            Region::TheoremSide => "theorem-side",
            Region::EnergyCorner => "energy-corner",
            Region::BoundaryExcluded => "boundary-excluded",
            Region::OutsideSquare => "outside-square",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibleTriple<Q> {
    pub d: usize,
    pub k: usize,
    pub q: Exponent<Q>,
    pub r: Exponent<Q>,
    pub rt: Exponent<Q>,
    /// 1/γ = (1/r)(1 − k/d) + (1/r̃)(k/d).
    pub gamma: Exponent<Q>,
    /// 2γ/(γ+1).
    pub alpha_prime: Q,
    /// (d−k)(½ − 1/r) + k(½ − 1/r̃).
    pub beta: Q,
    /// All exponents are at least 1 and 1 ≤ k ≤ d.
    pub well_formed: bool,
    /// 2/q ≥ β.
    pub scaling_condition: bool,
    /// 2 ≤ r̃ ≤ r < ∞ and 2 < q ≤ ∞.
    pub strichartz_range: bool,
    /// 1/q + ½((d−k)/r + k/r̃) = d/2.
    pub sharp: bool,
    /// Member of 𝔸(d, k): needs 1 ≤ k < d, the Strichartz range and 2/q + (d−k)/r + k/r̃ = d/2.
    pub refined: bool,
    /// γ < (d+1)/(d−1) (always true for d = 1).
    pub gamma_below_threshold: bool,
    /// Diagonal classification, present when r = r̃.
    pub region: Option<Region>,
}

impl<Q: ExponentScalar> AdmissibleTriple<Q> {
    /// Scaling condition plus the single-function exponent range.
    pub fn strichartz_admissible(&self) -> bool {
        self.well_formed && self.strichartz_range && self.scaling_condition
    }

    /// Hypotheses of the orthonormal estimate for the given α′.
    pub fn orthonormal_admissible(&self, alpha_prime: &Q) -> bool {
        self.well_formed
            && self.sharp
            && inv(&self.r).le_tol(&inv(&self.rt))
            && self.gamma_below_threshold
            && alpha_prime.ge_tol(&Q::one())
            && self.alpha_prime.ge_tol(alpha_prime)
    }

    pub fn inv_q(&self) -> Q {
        inv(&self.q)
    }

    pub fn to_f64(&self) -> AdmissibleTriple<f64> {
        let conv = |e: &Exponent<Q>| match e {
            Exponent::Finite(v) => Exponent::Finite(v.as_f64()),
            Exponent::Infinite => Exponent::Infinite,
        };
        AdmissibleTriple {
            d: self.d,
            k: self.k,
            q: conv(&self.q),
            r: conv(&self.r),
            rt: conv(&self.rt),
            gamma: conv(&self.gamma),
            alpha_prime: self.alpha_prime.as_f64(),
            beta: self.beta.as_f64(),
            well_formed: self.well_formed,
            scaling_condition: self.scaling_condition,
            strichartz_range: self.strichartz_range,
            sharp: self.sharp,
            refined: self.refined,
            gamma_below_threshold: self.gamma_below_threshold,
            region: self.region,
        }
    }
}

trait LeTol {
    fn le_tol(&self, other: &Self) -> bool;
}

impl<Q: ExponentScalar> LeTol for Q {
    fn le_tol(&self, other: &Self) -> bool {
        other.ge_tol(self)
    }
}

pub fn classify_triple<Q: ExponentScalar>(
    q: Exponent<Q>,
    r: Exponent<Q>,
    rt: Exponent<Q>,
    d: usize,
    k: usize,
) -> AdmissibleTriple<Q> {
    let one = Q::one();
    let two = Q::ratio(2, 1);
    let half = Q::ratio(1, 2);
    let dq = Q::ratio(d as i64, 1);
    let kq = Q::ratio(k as i64, 1);
    let dk = Q::ratio(d as i64 - k as i64, 1);
    let (iq, ir, irt) = (inv(&q), inv(&r), inv(&rt));

    let exponent_ok = |a: &Q| a.ge_tol(&Q::zero()) && a.le_tol(&one);
    let well_formed = d >= 1 && k >= 1 && k <= d && exponent_ok(&iq) && exponent_ok(&ir) && exponent_ok(&irt);

    let dd = if d == 0 { one.clone() } else { dq.clone() };
    let inv_gamma = ir.clone() * (one.clone() - kq.clone() / dd.clone()) + irt.clone() * (kq.clone() / dd);
    let gamma = from_inv(inv_gamma.clone());
    let alpha_prime = two.clone() / (one.clone() + inv_gamma.clone());
    let beta = dk.clone() * (half.clone() - ir.clone()) + kq.clone() * (half.clone() - irt.clone());

    let scaling_condition = well_formed && (two.clone() * iq.clone()).ge_tol(&beta);
    let strichartz_range = well_formed
        && irt.le_tol(&half)
        && ir.le_tol(&irt)
        && ir.gt_tol(&Q::zero())
        && iq.clone() < half.clone()
        && !iq.near(&half);
    let half_d = dq.clone() * half.clone();
    let sharp = well_formed
        && (iq.clone() + half.clone() * (dk.clone() * ir.clone() + kq.clone() * irt.clone())).near(&half_d);
    let refined_sum = two.clone() * iq.clone() + dk.clone() * ir.clone() + kq.clone() * irt.clone();
    let refined = well_formed && k < d && strichartz_range && refined_sum.near(&half_d);
    let gamma_below_threshold = if d <= 1 {
        true
    } else {
        // γ < (d+1)/(d−1)  ⇔  1/γ > (d−1)/(d+1)
        let thr = Q::ratio(d as i64 - 1, d as i64 + 1);
        inv_gamma.gt_tol(&thr)
    };

    let region = if ir.near(&irt) { Some(diagonal_region(d, ir.clone(), iq.clone())) } else { None };

    AdmissibleTriple {
        d,
        k,
        q,
        r,
        rt,
        gamma,
        alpha_prime,
        beta,
        well_formed,
        scaling_condition,
        strichartz_range,
        sharp,
        refined,
        gamma_below_threshold,
        region,
    }
}

/// Classifies (a, b) = (1/r, 1/q) on the diagonal r = r̃.
pub fn diagonal_region<Q: ExponentScalar>(d: usize, a: Q, b: Q) -> Region {
    let zero = Q::zero();
    let half = Q::ratio(1, 2);
    let inside = |v: &Q| v.ge_tol(&zero) && v.le_tol(&half);
    if !(inside(&a) && inside(&b)) {
        return Region::OutsideSquare;
    }
    let bx = Q::ratio(d as i64 - 2, 2 * d as i64);
    let bx = if bx < zero { zero.clone() } else { bx };
    if b.near(&half) && a.ge_tol(&bx) {
        return Region::BoundaryExcluded;
    }
    if a.near(&half) && b.near(&zero) {
        return Region::EnergyCorner;
    }
    let lhs = Q::ratio(2, 1) * b + Q::ratio(d as i64, 1) * a;
    let rhs = Q::ratio(d as i64, 2);
    if lhs.near(&rhs) {
        Region::SharpLine
    } else if lhs > rhs {
        Region::TheoremSide
    } else {
        Region::DinhSide
    }
}

/// The sharp triple for given (r, r̃): 1/q = d/2 − ½((d−k)/r + k/r̃).
pub fn sharp_q<Q: ExponentScalar>(r: &Exponent<Q>, rt: &Exponent<Q>, d: usize, k: usize) -> Exponent<Q> {
    let half = Q::ratio(1, 2);
    let iq = Q::ratio(d as i64, 2)
        - half * (Q::ratio(d as i64 - k as i64, 1) * inv(r) + Q::ratio(k as i64, 1) * inv(rt));
    from_inv(iq)
}

/// One row of the diagonal region map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionSample {
    pub inv_r: f64,
    pub inv_q: f64,
    pub region: Region,
}

/// Classifies a (res+1)² grid over [0, ½]² of exact rational points (i/(2res), j/(2res)).
pub fn region_plotdata(d: usize, resolution: usize) -> Result<Vec<RegionSample>> {
    if d == 0 || resolution == 0 {
        return Err(Error::Domain("region map needs d ≥ 1 and a positive resolution".into()));
    }
    let den = 2 * resolution as i64;
    let mut out = Vec::with_capacity((resolution + 1) * (resolution + 1));
    for j in 0..=resolution as i64 {
        for i in 0..=resolution as i64 {
            let a = Ratio::new(i, den);
            let b = Ratio::new(j, den);
            out.push(RegionSample { inv_r: a.as_f64(), inv_q: b.as_f64(), region: diagonal_region(d, a, b) });
        }
    }
    Ok(out)
}

/// The triple (q, r, r̃) ∈ 𝔸(d, 2) used by the local well-posedness argument
/// for nonlinearity exponent p and regularity s:
/// 1/r = 1/(p+1), 1/r̃ = ½ − ε/(p+1), 1/q = (d−2)/4 − (d−2)/(2(p+1)) + ε/(p+1),
/// with ε the midpoint of its admissible interval.
pub fn nonlinear_triple(d: usize, p: f64, s: f64) -> Result<(f64, AdmissibleTriple<f64>)> {
    if d < 3 {
        return Err(Error::Domain(format!("the nonlinear triple needs d ≥ 3, got {d}")));
    }
    if !(p > 1.0) || !(0.0..1.0).contains(&s) {
        return Err(Error::Domain(format!("need p > 1 and 0 ≤ s < 1, got p={p}, s={s}")));
    }
    let dm2 = d as f64 - 2.0;
    let lo = (1.0 - s) * (p - 1.0) / 2.0;
    let hi = (dm2 / 4.0 * (1.0 + 4.0 / dm2 - p)).min((p - 1.0) / 2.0);
    if !(hi > lo) {
        return Err(Error::Domain(format!("empty interval for the nonlinear triple: ({lo}, {hi})")));
    }
    let eps = 0.5 * (lo + hi);
    let ir = 1.0 / (p + 1.0);
    let irt = 0.5 - eps / (p + 1.0);
    let iq = dm2 / 4.0 - dm2 / (2.0 * (p + 1.0)) + eps / (p + 1.0);
    let t = classify_triple(
        Exponent::Finite(1.0 / iq),
        Exponent::Finite(1.0 / ir),
        Exponent::Finite(1.0 / irt),
        d,
        2,
    );
    if !t.refined {
        return Err(Error::Inadmissible(format!("constructed triple ({}, {}, {}) is not refined", 1.0 / iq, 1.0 / ir, 1.0 / irt)));
    }
    Ok((eps, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rq(n: i64, d: i64) -> Exponent<Ratio<i64>> {
        Exponent::Finite(Ratio::new(n, d))
    }

    #[test]
    fn worked_triple_d2() {
        let q = sharp_q(&rq(4, 1), &rq(2, 1), 2, 1);
        assert_eq!(q, rq(8, 5));
        let t = classify_triple(q, rq(4, 1), rq(2, 1), 2, 1);
        assert_eq!(t.gamma, rq(8, 3));
        assert_eq!(t.alpha_prime, Ratio::new(16, 11));
        assert!(t.sharp && t.gamma_below_threshold);
        // 2/q + d/γ = d
        assert_eq!(Ratio::new(2, 1) * t.inv_q() + Ratio::new(2, 1) * inv(&t.gamma), Ratio::new(2, 1));
    }

    #[test]
    fn refined_member_d3() {
        let t = classify_triple(rq(8, 3), rq(4, 1), rq(4, 1), 3, 2);
        assert!(t.refined);
    }

    #[test]
    fn energy_corner() {
        let t = classify_triple(Exponent::Infinite, rq(2, 1), rq(2, 1), 2, 1);
        assert_eq!(t.beta, Ratio::new(0, 1));
        assert!(t.scaling_condition);
        assert_eq!(t.region, Some(Region::EnergyCorner));
    }

    #[test]
    fn labelled_points() {
        let r = |a: (i64, i64), b: (i64, i64), d| diagonal_region(d, Ratio::new(a.0, a.1), Ratio::new(b.0, b.1));
        assert_eq!(r((1, 2), (1, 2), 3), Region::BoundaryExcluded);
        assert_eq!(r((0, 1), (0, 1), 3), Region::DinhSide);
        assert_eq!(r((1, 3), (1, 4), 3), Region::SharpLine);
        assert_eq!(r((1, 2), (0, 1), 3), Region::EnergyCorner);
        assert_eq!(r((3, 4), (0, 1), 3), Region::OutsideSquare);
    }

    #[test]
    fn float_path_matches_exact_on_boundaries() {
        let t = classify_triple(Exponent::Finite(1.6f64), Exponent::Finite(4.0), Exponent::Finite(2.0), 2, 1);
        assert!(t.sharp);
        let t = classify_triple(Exponent::<f64>::Infinite, Exponent::Finite(2.0), Exponent::Finite(2.0), 2, 1);
        assert_eq!(t.region, Some(Region::EnergyCorner));
    }

    #[test]
    fn nonlinear_triple_d3() {
        let (eps, t) = nonlinear_triple(3, 2.0, 0.5).unwrap();
        assert!((eps - 0.375).abs() < 1e-15);
        assert!(t.refined);
        assert!(nonlinear_triple(3, 2.0, 0.0).is_err());
    }
}
