use std::sync::Arc;

use proptest::prelude::*;
use strichartz::field::multipliers::{bracket, bracket_y, homogeneous};
use strichartz::io::{read_field, read_json, write_field, write_json, Checkpoint, FieldRecord, TrajectoryRecord};
use strichartz::sampling::{gaussian_field, rng};
use strichartz::trajectory::TimeGrid;
use strichartz::{build_lattice, make_ons, Complex64, EnsembleKind, Error, Field, FrequencyLattice, TorusGrid, Trajectory};

fn setup(d: usize, k: usize, n: usize, m: usize) -> (Arc<FrequencyLattice>, TorusGrid<f64>) {
    (Arc::new(build_lattice(d, k, n).unwrap()), TorusGrid::new(d, k, m).unwrap())
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn rel(a: &Field, b: &Field) -> f64 {
    a.sub(b).unwrap().l2_norm() / b.l2_norm()
}

#[test]
fn lattice_sizes_and_norms() {
    let l = build_lattice(1, 1, 2).unwrap();
    let mut norms = l.norms_sq().to_vec();
    norms.sort();
    assert_eq!(norms, [0, 1, 1, 4, 4]);
    assert_eq!(build_lattice(3, 2, 1).unwrap().len(), 27);
    let l = build_lattice(2, 1, 4).unwrap();
    assert_eq!(l.len(), 81);
    let i = l.index_of(&[3, -4]).unwrap();
    assert_eq!(l.norm_sq(i), 25);
    assert_eq!(l.norm_sq_y(i), 16);
    assert_eq!(l.xi(l.mirror(i)), &[-3, 4]);
    assert!(build_lattice(2, 0, 4).is_err());
    assert!(build_lattice(2, 3, 4).is_err());
    assert!(build_lattice(2, 1, 0).is_err());
}

#[test]
fn delta_synthesis() {
    let (lat, grid) = setup(2, 1, 3, 8);
    let one = Field::plane_wave(lat.clone(), grid.clone(), &[0, 0], Complex64::new(1.0, 0.0)).unwrap();
    assert!(one.samples().iter().all(|z| (z - Complex64::new(1.0, 0.0)).norm() < 1e-14));
    let e1 = Field::plane_wave(lat, grid.clone(), &[1, 0], Complex64::new(1.0, 0.0)).unwrap();
    for (idx, z) in e1.samples().iter().enumerate() {
        let x = grid.point(idx)[0];
        let want = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * x);
        assert!((z - want).norm() < 1e-13);
    }
}

#[test]
fn synthesis_matches_naive_sum() {
    let (lat, grid) = setup(1, 1, 4, 16);
    let f = gaussian_field(lat.clone(), grid.clone(), &mut rng(7, 0)).unwrap();
    let naive: Vec<Complex64> = (0..16)
        .map(|j| {
            let x = j as f64 / 16.0;
            lat.points()
                .zip(f.coeffs())
                .map(|(p, a)| a * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * x * p.xi[0] as f64))
                .sum()
        })
        .collect();
    assert!(max_diff(f.samples(), &naive) < 1e-12);
}

#[test]
fn coarse_grid_is_an_aliasing_error() {
    let lat = build_lattice(1, 1, 4).unwrap();
    let grid = TorusGrid::<f64>::new(1, 1, 8).unwrap();
    let coeffs = vec![Complex64::new(0.0, 0.0); lat.len()];
    assert!(matches!(grid.synthesize(&lat, &coeffs), Err(Error::Aliasing { m: 8, n: 4, needed: 9 })));
}

#[test]
fn plane_wave_picks_up_quadratic_phase() {
    let (lat, grid) = setup(2, 1, 4, 16);
    let f = Field::plane_wave(lat.clone(), grid, &[3, -4], Complex64::new(1.0, 0.0)).unwrap();
    let t = 0.0137;
    let g = f.free_propagate(t);
    let i = lat.index_of(&[3, -4]).unwrap();
    let want = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t * 25.0);
    assert!((g.coeffs()[i] - want).norm() < 1e-13);
    assert!((f.free_propagate(1.0).coeffs()[i] - f.coeffs()[i]).norm() < 1e-12);
}

#[test]
fn multipliers() {
    let (lat, grid) = setup(3, 2, 4, 9);
    let f = Field::plane_wave(lat.clone(), grid.clone(), &[1, 3, 4], Complex64::new(1.0, 0.0)).unwrap();
    let i = lat.index_of(&[1, 3, 4]).unwrap();
    let g = f.apply_multiplier(bracket_y(1.0)).unwrap();
    assert!((g.coeffs()[i].re - 26f64.sqrt()).abs() < 1e-13);
    let h = f.apply_multiplier(bracket(1.0)).unwrap();
    assert!((h.coeffs()[i].re - 27f64.sqrt()).abs() < 1e-13);
    let z = Field::constant(lat, grid, Complex64::new(2.0, 0.0)).unwrap().apply_multiplier(homogeneous(0.5)).unwrap();
    assert_eq!(z.l2_norm(), 0.0);
    assert!(matches!(f.apply_multiplier(|_| Complex64::new(f64::NAN, 0.0)), Err(Error::Domain(_)) | Err(Error::Numeric(_))));
}

#[test]
fn field_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (lat, grid) = setup(2, 1, 3, 8);
    let f = gaussian_field(lat, grid, &mut rng(3, 1)).unwrap();
    let path = dir.path().join("f.tsf");
    write_field(&path, &f).unwrap();
    let g: Field = read_field(&path).unwrap();
    assert_eq!(g.coeffs(), f.coeffs());
    assert_eq!(g.lattice(), f.lattice());

    let rec = FieldRecord::from_field(&f);
    let bytes = rec.to_bytes();
    assert_eq!(bytes.len(), 28 + 16 * f.coeffs().len());
    assert_eq!(FieldRecord::from_bytes(&bytes).unwrap(), rec);
    let mut bad = bytes.clone();
    bad[0] ^= 0xff;
    assert!(FieldRecord::from_bytes(&bad).is_err());
    assert!(FieldRecord::from_bytes(&bytes[..bytes.len() - 1]).is_err());

    let jpath = dir.path().join("f.json");
    write_json(&jpath, &rec).unwrap();
    let back: FieldRecord = read_json(&jpath).unwrap();
    assert_eq!(back, rec);
    let err = read_field::<f64>(&dir.path().join("missing.tsf")).unwrap_err();
    assert!(err.to_string().contains("missing.tsf"));
}

#[test]
fn trajectory_and_checkpoint_round_trip() {
    let (lat, grid) = setup(1, 1, 4, 16);
    let f = gaussian_field(lat.clone(), grid.clone(), &mut rng(5, 0)).unwrap();
    let traj = Trajectory::free(&f, TimeGrid::trapezoid(0.0, 0.1, 8).unwrap());
    let rec = TrajectoryRecord::from_trajectory(&traj).unwrap();
    let back: Trajectory<f64> = rec.to_trajectory().unwrap();
    assert_eq!(back.times(), traj.times());
    assert_eq!(back.weights(), traj.weights());
    for (a, b) in back.fields.iter().zip(&traj.fields) {
        assert_eq!(a.coeffs(), b.coeffs());
    }

    let ens = make_ons(EnsembleKind::Random, 3, lat, grid, 9).unwrap().with_weights(vec![1.0, 0.5, 0.25]).unwrap();
    let cp = Checkpoint::from_ensemble(&ens, 12, 0.3);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    write_json(&path, &cp).unwrap();
    let cp2: Checkpoint = read_json(&path).unwrap();
    let ens2 = cp2.to_ensemble::<f64>().unwrap();
    assert_eq!(ens2.weights(), ens.weights());
    assert_eq!(ens2.frames(), ens.frames());
    assert_eq!((cp2.step, cp2.t), (12, 0.3));
}

fn field_from(seed: u64, d: usize, n: usize) -> Field {
    let (lat, grid) = setup(d, 1, n, 2 * n + 2);
    gaussian_field(lat, grid, &mut rng(seed, 0)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn propagation_is_unitary(seed in 0u64..1000, d in 1usize..=2, n in 1usize..=6, t in -5.0f64..5.0) {
        let f = field_from(seed, d, n);
        prop_assert!((f.free_propagate(t).l2_norm() - f.l2_norm()).abs() <= 1e-12 * f.l2_norm());
    }

    #[test]
    fn propagation_group_law(seed in 0u64..1000, n in 1usize..=6, s in -2.0f64..2.0, t in -2.0f64..2.0) {
        let f = field_from(seed, 2, n);
        prop_assert!(rel(&f.free_propagate(s).free_propagate(t), &f.free_propagate(s + t)) <= 1e-12);
    }

    #[test]
    fn multiplier_composition(seed in 0u64..1000, a in -1.5f64..1.5, b in -1.5f64..1.5) {
        let f = field_from(seed, 2, 4);
        let two = f.apply_multiplier(bracket(a)).unwrap().apply_multiplier(bracket(b)).unwrap();
        let one = f.apply_multiplier(bracket(a + b)).unwrap();
        prop_assert!(rel(&two, &one) <= 1e-12);
    }

    #[test]
    fn parseval(seed in 0u64..1000, d in 1usize..=3, n in 1usize..=3) {
        let f = field_from(seed, d, n);
        let w = f.grid().cell_weight();
        let grid_l2 = (f.samples().iter().map(|z| z.norm_sqr()).sum::<f64>() * w).sqrt();
        prop_assert!((grid_l2 - f.l2_norm()).abs() <= 1e-12 * f.l2_norm());
        let back = f.grid().analyze(f.lattice(), f.samples()).unwrap();
        prop_assert!(max_diff(&back, f.coeffs()) <= 1e-12 * f.l2_norm());
    }
}
