use std::f64::consts::PI;
use std::sync::Arc;

use strichartz::hartree::{
    commutator_residual, density_of, energy, evolve_fermions, picard_operator_solve, DensityMatrix, HartreeConfig, OperatorPicardConfig,
};
use strichartz::nls::PotentialSpec;
use strichartz::{build_lattice, make_ons, Complex64, EnsembleKind, Error, FrequencyLattice, OrthonormalEnsemble, TorusGrid};

fn setup(d: usize, n: usize, m: usize) -> (Arc<FrequencyLattice>, TorusGrid<f64>) {
    (Arc::new(build_lattice(d, 1, n).unwrap()), TorusGrid::new(d, 1, m).unwrap())
}

fn plane_waves(lat: &Arc<FrequencyLattice>, grid: &TorusGrid<f64>, xis: &[&[i32]], weights: Vec<f64>) -> DensityMatrix<f64> {
    let frames = xis
        .iter()
        .map(|xi| {
            let mut v = vec![Complex64::new(0.0, 0.0); lat.len()];
            v[lat.index_of(xi).unwrap()] = Complex64::new(1.0, 0.0);
            v
        })
        .collect();
    DensityMatrix::new(OrthonormalEnsemble::new(lat.clone(), grid.clone(), frames, weights).unwrap()).unwrap()
}

fn random(lat: &Arc<FrequencyLattice>, grid: &TorusGrid<f64>, j: usize, seed: u64) -> DensityMatrix<f64> {
    let weights = (0..j).map(|i| 1.0 / (1 + i) as f64).collect();
    DensityMatrix::new(make_ons(EnsembleKind::Random, j, lat.clone(), grid.clone(), seed).unwrap().with_weights(weights).unwrap()).unwrap()
}

#[test]
fn densities() {
    let (lat, grid) = setup(2, 2, 9);
    let one = random(&lat, &grid, 1, 4);
    let rho = density_of(&one).unwrap();
    assert_eq!(rho.lattice().n(), 4);
    let u = one.ensemble().field(0);
    for (a, z) in rho.samples().iter().zip(u.samples()) {
        assert!((a.re - z.norm_sqr()).abs() < 1e-12 && a.im.abs() < 1e-12);
    }
    let full = DensityMatrix::new(make_ons(EnsembleKind::PlaneWaves, lat.len(), lat.clone(), grid.clone(), 0).unwrap()).unwrap();
    assert!(full.density().values.iter().all(|&v| (v - 25.0).abs() < 1e-11));
    let neg = make_ons(EnsembleKind::PlaneWaves, 2, lat, grid, 0).unwrap().with_weights(vec![1.0, -0.5]).unwrap();
    assert!(DensityMatrix::new(neg).is_err());
}

#[test]
fn free_flow_keeps_weights_gram_and_schatten() {
    let (lat, grid) = setup(2, 3, 10);
    let g0 = random(&lat, &grid, 4, 11);
    let mut cfg = HartreeConfig::new(0.01, 40, PotentialSpec::zero(lat, grid).unwrap());
    cfg.cadence = 10;
    let run = evolve_fermions(&g0, &cfg).unwrap();
    assert_eq!(run.trajectory.steps, [0, 10, 20, 30, 40]);
    let first = run.diagnostics[0];
    for (row, state) in run.diagnostics.iter().zip(&run.trajectory.states) {
        assert_eq!(state.weights(), g0.weights());
        assert!(row.gram_dev < 1e-13);
        assert!((row.trace - first.trace).abs() < 1e-13);
        assert!((row.schatten - first.schatten).abs() < 1e-12);
        assert!((row.schatten - row.schatten_weights).abs() < 1e-12);
        assert!((row.sobolev_schatten - first.sobolev_schatten).abs() < 1e-10 * first.sobolev_schatten);
        assert!((row.energy - first.energy).abs() < 1e-10 * first.energy);
    }
}

#[test]
fn interacting_flow_conserves_trace_and_orthonormality() {
    let (lat, grid) = setup(2, 3, 10);
    let g0 = random(&lat, &grid, 3, 2);
    let w = PotentialSpec::gaussian(lat, grid, 0.1).unwrap();
    let cfg = HartreeConfig::new(1e-3, 500, w.clone());
    let run = evolve_fermions(&g0, &cfg).unwrap();
    let first = run.diagnostics[0];
    for row in &run.diagnostics {
        assert!(row.gram_dev < 1e-10);
        assert!((row.trace - first.trace).abs() < 1e-10);
        assert!((row.mass - first.trace).abs() < 1e-10);
        assert!(row.energy.is_finite());
    }
    let running: Vec<f64> = run.diagnostics.iter().map(|r| r.rho_mixed_norm_running).collect();
    assert!(running.windows(2).all(|p| p[1] >= p[0]));
    assert!(commutator_residual(&run.trajectory, &w, 0).is_err());
    assert!(commutator_residual(&run.trajectory, &w, run.trajectory.len() - 1).is_err());
}

#[test]
fn commutator_residual_is_second_order() {
    let (lat, grid) = setup(1, 3, 13);
    let g0 = random(&lat, &grid, 3, 2);
    let w = PotentialSpec::gaussian(lat, grid, 0.1).unwrap();
    let res: Vec<f64> = [50usize, 100, 200]
        .iter()
        .map(|&n| {
            let run = evolve_fermions(&g0, &HartreeConfig::new(0.05 / n as f64, n, w.clone())).unwrap();
            commutator_residual(&run.trajectory, &w, n / 2).unwrap()
        })
        .collect();
    for p in res.windows(2) {
        assert!((p[0] / p[1] - 4.0).abs() < 0.5, "{res:?}");
    }
}

#[test]
fn stationary_states() {
    let (lat, grid) = setup(1, 3, 13);
    let w = PotentialSpec::gaussian(lat.clone(), grid.clone(), 0.2).unwrap();
    let full = DensityMatrix::new(make_ons(EnsembleKind::PlaneWaves, lat.len(), lat.clone(), grid.clone(), 0).unwrap()).unwrap();
    let run = evolve_fermions(&full, &HartreeConfig::new(0.01, 20, w.clone())).unwrap();
    let id = full.to_matrix();
    for s in &run.trajectory.states {
        assert!(s.to_matrix().sub(&id).unwrap().max_abs() < 1e-12);
    }

    let pair = plane_waves(&lat, &grid, &[&[2], &[-2]], vec![1.0, 0.5]);
    let run = evolve_fermions(&pair, &HartreeConfig::new(0.01, 20, w.clone())).unwrap();
    for i in 1..run.trajectory.len() - 1 {
        assert!(commutator_residual(&run.trajectory, &w, i).unwrap() < 1e-12);
    }
}

#[test]
fn energy_of_a_plane_wave() {
    let (lat, grid) = setup(1, 3, 13);
    let w = PotentialSpec::constant(lat.clone(), grid.clone(), 0.7).unwrap();
    let g = plane_waves(&lat, &grid, &[&[3]], vec![0.4]);
    let want = 0.4 * 2.0 * PI * 9.0 + 0.5 * 0.7 * 0.4 * 0.4;
    assert!((energy(&g, &w).unwrap() - want).abs() < 1e-12);
}

#[test]
fn config_validation() {
    let (lat, grid) = setup(1, 3, 13);
    let w = PotentialSpec::zero(lat.clone(), grid.clone()).unwrap();
    let g = random(&lat, &grid, 2, 1);
    assert!(evolve_fermions(&g, &HartreeConfig::new(0.1, 11, w.clone())).is_err());
    let mut cfg = HartreeConfig::new(0.01, 5, w.clone());
    cfg.cadence = 0;
    assert!(evolve_fermions(&g, &cfg).is_err());
    let cfg = HartreeConfig::new(0.01, 5, w);
    assert!(cfg.s_hypothesis_holds());
    let (lat2, grid2) = setup(1, 2, 13);
    assert!(matches!(evolve_fermions(&random(&lat2, &grid2, 2, 1), &cfg), Err(Error::Mismatch(_))));
}

#[test]
fn operator_picard_trivial_cases() {
    let (lat, grid) = setup(1, 3, 13);
    let cfg = OperatorPicardConfig::new(17);
    let g = random(&lat, &grid, 3, 6);
    let sol = picard_operator_solve(&g, &PotentialSpec::zero(lat.clone(), grid.clone()).unwrap(), 0.2, &cfg).unwrap();
    assert_eq!(sol.history.distances.len(), 1);
    assert!(sol.history.converged);
    let g0 = g.to_matrix();
    assert!(sol.gammas[0].sub(&g0).unwrap().max_abs() < 1e-14);

    let w = PotentialSpec::gaussian(lat.clone(), grid.clone(), 0.2).unwrap();
    let empty = DensityMatrix::new(make_ons(EnsembleKind::Random, 1, lat.clone(), grid.clone(), 1).unwrap().with_weights(vec![0.0]).unwrap()).unwrap();
    let sol = picard_operator_solve(&empty, &w, 0.2, &cfg).unwrap();
    assert!(sol.gammas.iter().all(|m| m.max_abs() == 0.0));
    assert!(sol.densities.iter().flatten().all(|&v| v == 0.0));

    assert!(picard_operator_solve(&g, &w, 0.0, &cfg).is_err());
    assert!(picard_operator_solve(&g, &w, 0.2, &OperatorPicardConfig::new(1)).is_err());
}
