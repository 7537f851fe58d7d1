use std::sync::Arc;

use num_rational::Ratio;
use proptest::prelude::*;
use strichartz::admissibility::{classify_triple, diagonal_region, sharp_q, Region};
use strichartz::field::multipliers::bracket;
use strichartz::linalg::CMatrix;
use strichartz::littlewood_paley::mixed_besov_norm;
use strichartz::norms::{
    lebesgue_mean, lr_sobolev_norm, mixed_space_norm, partial_sobolev_norm, schatten_norm, sobolev_norm, sobolev_schatten_norm,
    spacetime_norm,
};
use strichartz::sampling::{complex_normal, gaussian_field, rng};
use strichartz::trajectory::TimeGrid;
use strichartz::{
    build_lattice, make_ons, Complex64, CutoffProfile, EnsembleKind, Exp, Exponent, Field, FrequencyLattice, TorusGrid, Trajectory,
};

fn setup(d: usize, k: usize, n: usize, m: usize) -> (Arc<FrequencyLattice>, TorusGrid<f64>) {
    (Arc::new(build_lattice(d, k, n).unwrap()), TorusGrid::new(d, k, m).unwrap())
}

fn fin(x: f64) -> Exp {
    Exp::Finite(x)
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn random_matrix(seed: u64, n: usize) -> CMatrix<f64> {
    let mut r = rng(seed, 4);
    CMatrix::from_fn(n, n, |_, _| complex_normal(&mut r))
}

#[test]
fn mixed_norm_examples() {
    let (lat, grid) = setup(2, 1, 2, 8);
    let c = Field::constant(lat.clone(), grid.clone(), one()).unwrap();
    for (r, rt) in [(fin(2.0), fin(2.0)), (fin(6.0), fin(3.0)), (Exp::Infinite, fin(4.0))] {
        assert!((mixed_space_norm(&c, r, rt).unwrap() - 1.0).abs() < 1e-14);
    }
    let cos = Field::from_coeffs(lat.clone(), grid.clone(), {
        let mut a = vec![Complex64::new(0.0, 0.0); lat.len()];
        a[lat.index_of(&[1, 0]).unwrap()] = one();
        a[lat.index_of(&[-1, 0]).unwrap()] = one();
        a
    })
    .unwrap();
    assert!((mixed_space_norm(&cos, fin(2.0), fin(2.0)).unwrap() - 2f64.sqrt()).abs() < 1e-13);
    assert!((mixed_space_norm(&cos, Exp::Infinite, Exp::Infinite).unwrap() - 2.0).abs() < 1e-13);

    // f(x, y) = g(x) h(y) with g = 1 + e(x), h = 2 + e(y)
    let mut a = vec![Complex64::new(0.0, 0.0); lat.len()];
    for (gx, gc) in [(0, 1.0), (1, 1.0)] {
        for (hy, hc) in [(0, 2.0), (1, 1.0)] {
            a[lat.index_of(&[gx, hy]).unwrap()] = Complex64::new(gc * hc, 0.0);
        }
    }
    let f = Field::from_coeffs(lat, grid, a).unwrap();
    let g: Vec<f64> = (0..8).map(|j| (one() + Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / 8.0)).norm()).collect();
    let h: Vec<f64> = (0..8).map(|j| (Complex64::new(2.0, 0.0) + Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / 8.0)).norm()).collect();
    let want = lebesgue_mean(&g, fin(3.0)) * lebesgue_mean(&h, fin(5.0));
    assert!((mixed_space_norm(&f, fin(3.0), fin(5.0)).unwrap() - want).abs() < 1e-12 * want);
    assert!(mixed_space_norm(&f, fin(0.5), fin(2.0)).is_err());
}

#[test]
fn spacetime_norm_examples() {
    let (lat, grid) = setup(1, 1, 3, 8);
    let c = Field::constant(lat.clone(), grid.clone(), Complex64::new(3.0, 0.0)).unwrap();
    let t = 0.4;
    let traj = Trajectory::free(&c, TimeGrid::trapezoid(0.0, t, 20).unwrap());
    let v = spacetime_norm(&traj, fin(4.0), fin(2.0), fin(2.0)).unwrap();
    assert!((v - 3.0 * t.powf(0.25)).abs() < 1e-13);
    let e = Field::plane_wave(lat, grid, &[2], one()).unwrap();
    let traj = Trajectory::free(&e, TimeGrid::periodic(0.0, 1.0, 32).unwrap());
    assert!((spacetime_norm(&traj, fin(3.0), fin(7.0), Exp::Infinite).unwrap() - 1.0).abs() < 1e-13);
}

#[test]
fn sobolev_examples() {
    let (lat, grid) = setup(2, 1, 5, 12);
    let f = gaussian_field(lat.clone(), grid.clone(), &mut rng(2, 0)).unwrap();
    assert!((sobolev_norm(&f, 0.0) - f.l2_norm()).abs() < 1e-13);
    let oracle: f64 = lat.points().zip(f.coeffs()).map(|(p, a)| (1.0 + p.norm_sq as f64).powf(0.7) * a.norm_sqr()).sum::<f64>().sqrt();
    assert!((sobolev_norm(&f, 0.7) - oracle).abs() < 1e-12 * oracle);
    let lifted = f.apply_multiplier(bracket(0.7)).unwrap();
    assert!((lr_sobolev_norm(&f, 0.7, fin(3.0)).unwrap() - mixed_space_norm(&lifted, fin(3.0), fin(3.0)).unwrap()).abs() < 1e-12);

    let e = Field::plane_wave(lat, grid, &[3, 4], one()).unwrap();
    assert!((sobolev_norm(&e, 1.0) - 26f64.sqrt()).abs() < 1e-13);
    // ⟨ξ_y⟩^{2(s−1/q)} ⟨ξ⟩^{2/q} for ξ = (3, 4)
    let (s, q) = (0.6, 4.0);
    let want = (17f64.powf(s - 1.0 / q) * 26f64.powf(1.0 / q)).sqrt();
    assert!((partial_sobolev_norm(&e, s, fin(q), 1).unwrap() - want).abs() < 1e-12);
    for seed in 0..5 {
        let (lat, grid) = setup(3, 2, 2, 6);
        let g = gaussian_field(lat, grid, &mut rng(seed, 0)).unwrap();
        for s in [0.25, 0.5, 1.0] {
            assert!(partial_sobolev_norm(&g, s, fin(4.0), 2).unwrap() <= sobolev_norm(&g, s) * (1.0 + 1e-12));
        }
    }
    assert!(partial_sobolev_norm(&f, 0.5, fin(4.0), 3).is_err());
}

#[test]
fn besov_single_shell() {
    let (lat, grid) = setup(1, 1, 4, 16);
    let e = Field::plane_wave(lat, grid, &[3], one()).unwrap();
    let s = 0.75;
    let v = mixed_besov_norm(&e, s, fin(2.0), fin(2.0), CutoffProfile::Sharp).unwrap();
    assert!((v - 4f64.powf(s)).abs() < 1e-12);
    let v = mixed_besov_norm(&e, s, fin(2.0), fin(2.0), CutoffProfile::Smooth).unwrap();
    assert!((v - 0.5 * 4f64.powf(s)).abs() < 1e-12);
}

#[test]
fn schatten_examples() {
    let d = CMatrix::<f64>::diagonal(&[3.0, 4.0]);
    assert!((schatten_norm(&d, fin(1.0)).unwrap() - 7.0).abs() < 1e-13);
    assert!((schatten_norm(&d, fin(2.0)).unwrap() - 5.0).abs() < 1e-13);
    assert!((schatten_norm(&d, Exp::Infinite).unwrap() - 4.0).abs() < 1e-13);
    assert!(schatten_norm(&d, fin(0.5)).is_err());

    let mut r = rng(1, 1);
    let u: Vec<Complex64> = (0..6).map(|_| complex_normal(&mut r)).collect();
    let v: Vec<Complex64> = (0..6).map(|_| complex_normal(&mut r)).collect();
    let outer = CMatrix::from_fn(6, 6, |i, j| u[i] * v[j].conj());
    let nu = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for a in [fin(1.0), fin(2.5), Exp::Infinite] {
        assert!((schatten_norm(&outer, a).unwrap() - nu * nv).abs() < 1e-12 * nu * nv);
    }
    let m = random_matrix(8, 8);
    assert!((schatten_norm(&m, fin(2.0)).unwrap() - m.frobenius()).abs() < 1e-12 * m.frobenius());
}

#[test]
fn sobolev_schatten_examples() {
    let (lat, grid) = setup(1, 1, 3, 8);
    let ens = make_ons(EnsembleKind::Random, 4, lat.clone(), grid.clone(), 3).unwrap().with_weights(vec![1.0, 0.5, 0.3, 0.2]).unwrap();
    let want = (1.0f64 + 0.5f64.powf(1.5) + 0.3f64.powf(1.5) + 0.2f64.powf(1.5)).powf(1.0 / 1.5);
    assert!((sobolev_schatten_norm(&ens, fin(1.5), 0.0).unwrap() - want).abs() < 1e-12);

    let i = lat.index_of(&[1]).unwrap();
    let mut frame = vec![Complex64::new(0.0, 0.0); lat.len()];
    frame[i] = one();
    let pw = strichartz::OrthonormalEnsemble::new(lat.clone(), grid, vec![frame], vec![1.0]).unwrap();
    assert!((sobolev_schatten_norm(&pw, fin(1.2), 0.8).unwrap() - 2f64.powf(0.8)).abs() < 1e-12);

    // dense oracle: singular values of ⟨∇⟩^s γ ⟨∇⟩^s assembled in full
    let s = 0.6;
    let g = ens.to_matrix();
    let w: Vec<f64> = lat.points().map(|p| (1.0 + p.norm_sq as f64).powf(s / 2.0)).collect();
    let dense = g.map(|a, b, z| z * w[a] * w[b]);
    for a in [fin(1.0), fin(16.0 / 11.0), Exp::Infinite] {
        let x = sobolev_schatten_norm(&ens, a, s).unwrap();
        let y = schatten_norm(&dense, a).unwrap();
        assert!((x - y).abs() < 1e-10 * y, "{a}: {x} vs {y}");
    }
}

fn q(n: i64, d: i64) -> Exponent<Ratio<i64>> {
    Exponent::Finite(Ratio::new(n, d))
}

#[test]
fn triple_examples() {
    let qq = sharp_q(&q(4, 1), &q(2, 1), 2, 1);
    assert_eq!(qq, q(8, 5));
    let t = classify_triple(qq, q(4, 1), q(2, 1), 2, 1);
    assert_eq!(t.gamma, q(8, 3));
    assert_eq!(t.alpha_prime, Ratio::new(16, 11));
    assert!(t.sharp && t.well_formed && t.gamma_below_threshold);
    assert!(!t.strichartz_range);
    assert!(t.orthonormal_admissible(&Ratio::new(16, 11)));
    assert!(!t.orthonormal_admissible(&Ratio::new(3, 2)));

    let t = classify_triple(q(8, 3), q(4, 1), q(4, 1), 3, 2);
    assert!(t.refined && t.strichartz_admissible());
    assert_eq!(t.region, Some(Region::SharpLine));
    let t = classify_triple(q(8, 3), q(4, 1), q(4, 1), 3, 3);
    assert!(!t.refined);

    assert_eq!(diagonal_region(3, Ratio::new(1, 2), Ratio::new(0, 1)), Region::EnergyCorner);
    assert_eq!(diagonal_region(2, 0.5f64, 0.0), Region::EnergyCorner);
    assert_eq!(diagonal_region(3, Ratio::new(2, 3), Ratio::new(0, 1)), Region::OutsideSquare);
}

fn matrix_schatten(m: &CMatrix<f64>, p: f64) -> f64 {
    schatten_norm(m, if p.is_infinite() { Exp::Infinite } else { fin(p) }).unwrap()
}

fn exact(n: i64, d: i64) -> Exponent<Ratio<i64>> {
    if n == 0 {
        Exponent::Infinite
    } else {
        Exponent::Finite(Ratio::new(d, n))
    }
}

fn float(n: i64, d: i64) -> Exp {
    if n == 0 {
        Exp::Infinite
    } else {
        fin(d as f64 / n as f64)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn holder_monotonicity(seed in 0u64..1000, a in 1.0f64..8.0, b in 1.0f64..8.0) {
        let (lat, grid) = setup(2, 1, 3, 8);
        let f = gaussian_field(lat, grid, &mut rng(seed, 0)).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let small = mixed_space_norm(&f, fin(lo), fin(lo)).unwrap();
        let big = mixed_space_norm(&f, fin(hi), fin(hi)).unwrap();
        prop_assert!(small <= big * (1.0 + 1e-12));
        prop_assert!(big <= mixed_space_norm(&f, Exp::Infinite, Exp::Infinite).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn minkowski_nesting(seed in 0u64..1000, a in 1.0f64..8.0, b in 1.0f64..8.0) {
        let (lat, grid) = setup(2, 1, 3, 8);
        let f = gaussian_field(lat, grid, &mut rng(seed, 0)).unwrap();
        let (rt, r) = if a <= b { (a, b) } else { (b, a) };
        let m = f.moduli();
        let xy = mixed_space_norm(&f, fin(r), fin(rt)).unwrap();
        let cols: Vec<f64> = (0..8).map(|y| lebesgue_mean(&(0..8).map(|x| m[x * 8 + y]).collect::<Vec<_>>(), fin(r))).collect();
        let yx = lebesgue_mean(&cols, fin(rt));
        prop_assert!(xy <= yx * (1.0 + 1e-12));
    }

    #[test]
    fn schatten_monotone(seed in 0u64..1000, a in 1.0f64..6.0, b in 1.0f64..6.0) {
        let m = random_matrix(seed, 6);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(matrix_schatten(&m, hi) <= matrix_schatten(&m, lo) * (1.0 + 1e-12));
        prop_assert!(matrix_schatten(&m, f64::INFINITY) <= matrix_schatten(&m, hi) * (1.0 + 1e-12));
    }

    #[test]
    fn trace_duality(seed in 0u64..1000, p in 1.0f64..6.0) {
        let a = random_matrix(seed, 5);
        let b = random_matrix(seed + 7919, 5);
        let pc = if p == 1.0 { f64::INFINITY } else { p / (p - 1.0) };
        let tr = a.matmul(&b).unwrap().trace().norm();
        prop_assert!(tr <= matrix_schatten(&a, p) * matrix_schatten(&b, pc) * (1.0 + 1e-12));
    }

    #[test]
    fn classification_agrees_with_exact_arithmetic(
        d in 1usize..=5,
        kk in 0usize..5,
        iq in 0i64..=12,
        ir in 0i64..=12,
        irt in 0i64..=12,
        den in 1i64..=12,
    ) {
        let k = 1 + kk % d;
        let (iq, ir, irt) = (iq.min(den), ir.min(den), irt.min(den));
        let e = classify_triple(exact(iq, den), exact(ir, den), exact(irt, den), d, k);
        let f = classify_triple(float(iq, den), float(ir, den), float(irt, den), d, k);
        prop_assert_eq!(e.well_formed, f.well_formed);
        prop_assert_eq!(e.scaling_condition, f.scaling_condition);
        prop_assert_eq!(e.strichartz_range, f.strichartz_range);
        prop_assert_eq!(e.sharp, f.sharp);
        prop_assert_eq!(e.refined, f.refined);
        prop_assert_eq!(e.gamma_below_threshold, f.gamma_below_threshold);
        prop_assert_eq!(e.region, f.region);
        prop_assert!((e.alpha_prime.to_f64_approx() - f.alpha_prime).abs() < 1e-12);
    }
}

trait Approx {
    fn to_f64_approx(&self) -> f64;
}

impl Approx for Ratio<i64> {
    fn to_f64_approx(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}
