use std::f64::consts::PI;
use std::sync::Arc;

use strichartz::field::multipliers::bracket;
use strichartz::nls::{
    duhamel_apply, duhamel_trajectory, eval_nonlinearity, hartree_term, nonlinear_estimate_probe, picard_solve, splitstep_solve,
    NonlinearitySpec, PotentialSpec, SolverConfig, Variant,
};
use strichartz::norms::mixed_space_norm;
use strichartz::sampling::{gaussian_field, real_gaussian_field, rng};
use strichartz::trajectory::TimeGrid;
use strichartz::{build_lattice, classify_triple, Complex64, Error, Exp, Field, FrequencyLattice, TorusGrid, Trajectory};

fn setup(d: usize, k: usize, n: usize, m: usize) -> (Arc<FrequencyLattice>, TorusGrid<f64>) {
    (Arc::new(build_lattice(d, k, n).unwrap()), TorusGrid::new(d, k, m).unwrap())
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn rel(a: &Field, b: &Field) -> f64 {
    a.sub(b).unwrap().l2_norm() / b.l2_norm()
}

fn spec(p: f64, variant: Variant) -> NonlinearitySpec<f64> {
    NonlinearitySpec::new(p, variant, 1).unwrap()
}

fn small(lat: &Arc<FrequencyLattice>, grid: &TorusGrid<f64>, seed: u64, size: f64) -> Field {
    let f = gaussian_field(lat.clone(), grid.clone(), &mut rng(seed, 0)).unwrap();
    f.scale(c(size / f.l2_norm()))
}

#[test]
fn pointwise_nonlinearity() {
    let (lat, grid) = setup(1, 1, 4, 16);
    let zero = Field::zeros(lat.clone(), grid.clone()).unwrap();
    assert_eq!(eval_nonlinearity(&zero, &spec(3.0, Variant::Gauge)).unwrap().l2_norm(), 0.0);
    let a = 1.7;
    let u = Field::plane_wave(lat.clone(), grid.clone(), &[2], c(a)).unwrap();
    let g = eval_nonlinearity(&u, &spec(3.0, Variant::Gauge)).unwrap();
    assert!(rel(&g, &u.scale(c(a * a))) < 1e-13);
    let e = Field::plane_wave(lat.clone(), grid.clone(), &[1], c(1.0)).unwrap();
    let g = eval_nonlinearity(&e, &spec(2.0, Variant::NonGauge)).unwrap();
    assert!(rel(&g, &Field::constant(lat, grid, c(1.0)).unwrap()) < 1e-13);
    assert!(NonlinearitySpec::new(1.0, Variant::Gauge, 1).is_err());
    assert!(NonlinearitySpec::new(2.0, Variant::Gauge, 0).is_err());
}

/// (w ∗ v)(z) = M^{−d} Σ_{z′} w(z − z′) v(z′) on a one-dimensional grid.
fn grid_convolution(w: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
    let m = w.len();
    (0..m).map(|i| (0..m).map(|j| w[(i + m - j) % m] * v[j]).sum::<Complex64>() / m as f64).collect()
}

#[test]
fn convolution_matches_direct_sum() {
    let (lat, grid) = setup(1, 1, 5, 16);
    let w = PotentialSpec::new(real_gaussian_field(lat.clone(), grid.clone(), &mut rng(4, 1)).unwrap(), "random").unwrap();
    let u = gaussian_field(lat.clone(), grid.clone(), &mut rng(4, 2)).unwrap();
    for sp in [spec(3.0, Variant::Gauge), spec(2.5, Variant::NonGauge)] {
        let f: Vec<Complex64> = u.samples().iter().map(|&z| sp.apply(z)).collect();
        let direct = grid_convolution(w.w.samples(), &f);
        let want = Field::from_samples(lat.clone(), grid.clone(), &direct).unwrap();
        assert!(rel(&hartree_term(&u, &w, &sp).unwrap(), &want) < 1e-8);
    }
    let sp = spec(3.0, Variant::Hartree);
    let rho: Vec<Complex64> = u.moduli().iter().map(|m| c(m * m)).collect();
    let v = grid_convolution(w.w.samples(), &rho);
    let prod: Vec<Complex64> = v.iter().zip(u.samples()).map(|(a, b)| c(a.re) * b).collect();
    let want = Field::from_samples(lat.clone(), grid.clone(), &prod).unwrap();
    assert!(rel(&hartree_term(&u, &w, &sp).unwrap(), &want) < 1e-8);

    let dirac = PotentialSpec::dirac(lat.clone(), grid.clone()).unwrap();
    let sp = spec(3.0, Variant::Gauge);
    assert!(rel(&hartree_term(&u, &dirac, &sp).unwrap(), &eval_nonlinearity(&u, &sp).unwrap()) < 1e-14);
    let one = PotentialSpec::constant(lat.clone(), grid.clone(), 1.0).unwrap();
    let mean: Complex64 = u.samples().iter().map(|&z| sp.apply(z)).sum::<Complex64>() / 16.0;
    assert!(rel(&hartree_term(&u, &one, &sp).unwrap(), &Field::constant(lat, grid, mean).unwrap()) < 1e-13);
}

#[test]
fn duhamel_examples() {
    let (lat, grid) = setup(1, 1, 3, 8);
    let f = gaussian_field(lat.clone(), grid.clone(), &mut rng(1, 0)).unwrap();
    let zero = Field::zeros(lat.clone(), grid.clone()).unwrap();
    let tg = TimeGrid::trapezoid(0.0, 0.5, 50).unwrap();
    let g0 = Trajectory::new(tg.clone(), vec![zero.clone(); tg.len()]).unwrap();
    assert!(rel(&duhamel_apply(&f, &g0, 0.37).unwrap(), &f.free_propagate(0.37)) < 1e-14);
    assert_eq!(duhamel_apply(&f, &g0, 0.0).unwrap().coeffs(), f.coeffs());
    assert!(duhamel_apply(&f, &g0, 0.6).is_err());

    // f = 0, G(t) = e_ξ with |ξ|² = 4: u(t) = −i (e^{8πit} − 1)/(8πi) e_ξ
    let t = 0.3;
    let exact = |t: f64| {
        let phase = Complex64::from_polar(1.0, 8.0 * PI * t);
        Complex64::new(0.0, -1.0) * (phase - 1.0) / Complex64::new(0.0, 8.0 * PI)
    };
    let i = lat.index_of(&[2]).unwrap();
    let g = Field::plane_wave(lat.clone(), grid.clone(), &[2], c(1.0)).unwrap();
    let errs: Vec<f64> = [100usize, 200, 400]
        .iter()
        .map(|&n| {
            let tg = TimeGrid::trapezoid(0.0, t, n).unwrap();
            let traj = Trajectory::new(tg.clone(), vec![g.clone(); tg.len()]).unwrap();
            let u = duhamel_apply(&zero, &traj, t).unwrap();
            let cum = duhamel_trajectory(&zero, &traj).unwrap();
            assert!(rel(cum.last().unwrap(), &u) < 1e-12, "{}", rel(cum.last().unwrap(), &u));
            (u.coeffs()[i] - exact(t)).norm()
        })
        .collect();
    assert!(errs[2] < 1e-4, "{errs:?}");
    for p in errs.windows(2) {
        assert!((p[0] / p[1] - 4.0).abs() < 0.1, "{errs:?}");
    }
}

fn config(t: f64, n_t: usize, lat: &FrequencyLattice, grid: &TorusGrid<f64>) -> SolverConfig<f64> {
    let mut cfg = SolverConfig::new(t, n_t, lat.n(), grid.m());
    cfg.tol = 1e-11;
    cfg
}

#[test]
fn picard_trivial_cases() {
    let (lat, grid) = setup(1, 1, 4, 16);
    let cfg = config(0.2, 33, &lat, &grid);
    let sp = spec(3.0, Variant::Gauge);
    let dirac = PotentialSpec::dirac(lat.clone(), grid.clone()).unwrap();
    let zero = Field::zeros(lat.clone(), grid.clone()).unwrap();
    let sol = picard_solve(&zero, &dirac, &sp, &cfg).unwrap();
    assert_eq!(sol.history.distances.len(), 1);
    assert!(sol.history.converged);
    assert!(sol.trajectory.fields.iter().all(|u| u.l2_norm() == 0.0));

    let f = small(&lat, &grid, 3, 1.0);
    let w0 = PotentialSpec::zero(lat.clone(), grid.clone()).unwrap();
    let sol = picard_solve(&f, &w0, &sp, &cfg).unwrap();
    assert_eq!(sol.history.distances.len(), 1);
    for (u, &t) in sol.trajectory.fields.iter().zip(sol.trajectory.times()) {
        assert!(rel(u, &f.free_propagate(t)) < 1e-13);
    }

    let big = small(&lat, &grid, 3, 40.0);
    let mut cfg = config(1.0, 17, &lat, &grid);
    cfg.max_picard = 30;
    match picard_solve(&big, &dirac, &sp, &cfg) {
        Err(Error::Divergence { ratio, streak }) => assert!(ratio >= 1.0 && streak >= 3),
        Err(Error::Numeric(_)) => {}
        other => panic!("expected divergence, got {:?}", other.map(|s| s.history)),
    }
    let mut bad = cfg.clone();
    bad.n_t = 8;
    assert!(picard_solve(&f, &dirac, &sp, &bad).is_err());
    let other = TorusGrid::new(1, 1, 18).unwrap();
    assert!(matches!(picard_solve(&f, &dirac, &sp, &config(0.2, 33, &lat, &other)), Err(Error::Mismatch(_))));
}

#[test]
fn picard_certificate_and_crosscheck() {
    let (lat, grid) = setup(2, 1, 3, 10);
    let f = small(&lat, &grid, 8, 0.05);
    let w = PotentialSpec::gaussian(lat.clone(), grid.clone(), 0.1).unwrap();
    let sp = spec(3.0, Variant::Hartree);
    let cfg = config(0.1, 65, &lat, &grid);
    let sol = picard_solve(&f, &w, &sp, &cfg).unwrap();
    assert!(sol.history.converged);
    assert!(sol.history.certificate.unwrap() < 2.0 * cfg.tol);
    assert!(sol.history.ratios.iter().all(|&r| r < 1.0));
    let split = splitstep_solve(&f, &w, &sp, &cfg).unwrap();
    let a = sol.trajectory.last().unwrap();
    let b = split.last().unwrap();
    assert!(rel(a, b) < 1e-6, "{}", rel(a, b));
    for u in &sol.trajectory.fields {
        assert!((u.l2_norm() - f.l2_norm()).abs() < 1e-8 * f.l2_norm());
    }
}

#[test]
fn splitting_properties() {
    let (lat, grid) = setup(2, 1, 3, 10);
    let f = small(&lat, &grid, 2, 1.0);
    let sp = spec(3.0, Variant::Hartree);
    let cfg = config(0.5, 101, &lat, &grid);

    let w0 = PotentialSpec::zero(lat.clone(), grid.clone()).unwrap();
    let traj = splitstep_solve(&f, &w0, &sp, &cfg).unwrap();
    for (u, &t) in traj.fields.iter().zip(traj.times()) {
        assert!(rel(u, &f.free_propagate(t)) < 1e-13);
    }
    let back = traj.last().unwrap().free_propagate(-0.5);
    assert!(rel(&back, &f) < 1e-10);

    let w = PotentialSpec::gaussian(lat.clone(), grid.clone(), 0.15).unwrap();
    assert!(w.is_positive_definite());
    let traj = splitstep_solve(&f, &w, &sp, &cfg).unwrap();
    for u in &traj.fields {
        assert!((u.l2_norm() - f.l2_norm()).abs() < 1e-8);
        assert_eq!(u.lattice().n(), 3);
        let again = u.grid().analyze(u.lattice(), u.samples()).unwrap();
        assert!(again.iter().zip(u.coeffs()).all(|(a, b)| (a - b).norm() < 1e-13));
    }
}

#[test]
fn estimate_probe() {
    let (lat, grid) = setup(3, 2, 2, 6);
    let t = classify_triple(Exp::Finite(8.0 / 3.0), Exp::Finite(4.0), Exp::Finite(4.0), 3, 2);
    let w = PotentialSpec::dirac(lat.clone(), grid.clone()).unwrap();
    let sp = spec(2.0, Variant::Gauge);
    let tg = TimeGrid::trapezoid(0.0, 0.2, 20).unwrap();

    let zero = Trajectory::new(tg.clone(), vec![Field::zeros(lat.clone(), grid.clone()).unwrap(); tg.len()]).unwrap();
    let p = nonlinear_estimate_probe(&zero, &w, &sp, 0.5, &t).unwrap();
    assert!(p.degenerate && p.ratio == 0.0);
    assert!(nonlinear_estimate_probe(&zero, &w, &sp, 1.0, &t).is_err());
    let bad = classify_triple(Exp::Finite(4.0), Exp::Finite(4.0), Exp::Finite(4.0), 3, 2);
    assert!(matches!(nonlinear_estimate_probe(&zero, &w, &sp, 0.5, &bad), Err(Error::Inadmissible(_))));

    // u ≡ a: G = a|a| is constant, so every multiplier acts as 1 on it
    let a = 0.3;
    let u = Trajectory::new(tg.clone(), vec![Field::constant(lat, grid, c(a)).unwrap(); tg.len()]).unwrap();
    let p = nonlinear_estimate_probe(&u, &w, &sp, 0.5, &t).unwrap();
    let iq = 3.0 / 8.0;
    let w_norm = mixed_space_norm(&w.w.apply_multiplier(bracket(2.0 * iq)).unwrap(), Exp::Finite(1.0), Exp::Finite(1.0)).unwrap();
    assert!((p.numerator - a * a * 0.2f64.powf(1.0 - iq)).abs() < 1e-13);
    assert!((p.u_norm - a * 0.2f64.powf(iq)).abs() < 1e-13);
    assert!((p.w_norm - w_norm).abs() < 1e-12 * w_norm);
    let want = 0.2f64.powf(1.0 - 3.0 * iq) / w_norm;
    assert!((p.ratio - want).abs() < 1e-12 * want);
}
