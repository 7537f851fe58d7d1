use std::sync::Arc;

use num_rational::Ratio;
use rand::Rng;
use strichartz::admissibility::{classify_triple, region_plotdata, Region};
use strichartz::estimates::duality::{duality_schatten_check, window_times, SpaceTimePotential};
use strichartz::estimates::kernel::{kernel_1d, kernel_decay_scan};
use strichartz::estimates::linear::{fixed_time_decay_ratio, localized_strichartz_ratio, strichartz_ratio};
use strichartz::estimates::ons::{ons_strichartz_ratio, ons_strichartz_ratio_unchecked};
use strichartz::hartree::{evolve_fermions, picard_operator_solve, rho_l2_distance, DensityMatrix, HartreeConfig, OperatorPicardConfig};
use strichartz::io::{write_json, Checkpoint, TrajectoryRecord};
use strichartz::littlewood_paley::{bernstein_ratio, density_square_norm, lp_equivalence_scan};
use strichartz::nls::{picard_solve, self_convergence, splitstep_solve, NonlinearitySpec, PotentialSpec, SolverConfig, Variant};
use strichartz::norms::sobolev_schatten_norm;
use strichartz::sampling::{gaussian_field, gaussian_field_on, rng};
use strichartz::thresholds::{growth, stability};
use strichartz::trajectory::TimeGrid;
use strichartz::{make_ons, Complex64, CutoffProfile, EnsembleKind, Exp, Exponent, Field, FrequencyLattice, Grid, Thresholds, Triple};

use crate::error::{LabError, Result};
use crate::registry::{Cell, Context, Experiment, ParamSpec, Point, Row, Table, Verdict};

macro_rules! p {
    ($name:literal, $default:literal, $help:literal) => {
        ParamSpec { name: $name, default: $default, help: $help }
    };
}

pub static ALL: &[Experiment] = &[
    Experiment {
        name: "kernel-decay",
        summary: "sup of |t|^(1/2)|K_N(t,x)| over t in [eps, 1/(2N)] (d = 1)",
        params: &[
            p!("d", "[1]", "dimension; only 1 is supported"),
            p!("n", "[8, 16, 32, 64]", "band size N"),
            p!("eps", "[1e-4]", "smallest time"),
            p!("times", "[400]", "log-spaced time samples"),
            p!("x_points", "[1024]", "spatial samples"),
        ],
        columns: &["d", "N", "eps", "sup_weighted", "origin_exact"],
        run: kernel_decay,
        verdict: kernel_decay_verdict,
    },
    Experiment {
        name: "fixed-time-decay",
        summary: "fixed-time ratio |t|^(β) ‖e^{itΔ}P_N f‖ / ‖f‖ for random band-limited f",
        params: &[
            p!("d", "[2]", "dimension"),
            p!("k", "[1]", "number of y coordinates"),
            p!("n", "[4, 8, 16]", "band size N"),
            p!("pair", "[\"2:2\", \"inf:2\", \"inf:inf\"]", "exponents r:r̃"),
            p!("trials", "[20]", "random fields per point"),
            p!("m_factor", "[4]", "grid points per axis divided by N"),
        ],
        columns: &["d", "k", "r", "rt", "N", "trials", "max_ratio"],
        run: fixed_time_decay,
        verdict: fixed_time_decay_verdict,
    },
    Experiment {
        name: "strichartz-scan",
        summary: "max ‖e^{itΔ}f‖_{L^q_t L^r_x L^r̃_y} / ‖f‖_{H^{1/q}} over random band-limited f",
        params: &[
            p!("d", "[2]", "dimension"),
            p!("k", "[1]", "number of y coordinates"),
            p!("n", "[4, 8, 16]", "band size N"),
            p!("triple", "[\"16/5:8:4\"]", "q:r:r̃"),
            p!("trials", "[100]", "random fields per point"),
            p!("m_factor", "[4]", "grid points per axis divided by N"),
        ],
        columns: &["d", "k", "q", "r", "rt", "N", "trials", "max_ratio"],
        run: strichartz_scan,
        verdict: strichartz_scan_verdict,
    },
    Experiment {
        name: "localized-strichartz",
        summary: "Strichartz ratio on a 1/N time window and against N^{1/q}‖f‖_{L²}",
        params: &[
            p!("d", "[2]", "dimension"),
            p!("k", "[1]", "number of y coordinates"),
            p!("n", "[4, 8, 16]", "band size N"),
            p!("triple", "[\"16/5:8:4\"]", "q:r:r̃"),
            p!("trials", "[100]", "random fields per point"),
            p!("m_factor", "[4]", "grid points per axis divided by N"),
        ],
        columns: &["d", "k", "q", "r", "rt", "N", "trials", "max_localized", "max_global"],
        run: localized_strichartz,
        verdict: localized_verdict,
    },
    Experiment {
        name: "lp-equivalence",
        summary: "two-sided Littlewood-Paley square function ratios in mixed norms",
        params: &[
            p!("d", "[2]", "dimension"),
            p!("k", "[1]", "number of y coordinates"),
            p!("profile", "[\"smooth\"]", "cutoff profile: smooth or sharp"),
            p!("r", "[\"4\"]", "x exponent"),
            p!("rt", "[\"2\"]", "y exponent"),
            p!("n_max", "[8, 16, 32]", "band size"),
            p!("trials", "[30]", "random fields per point"),
            p!("m_factor", "[4]", "grid points per axis divided by N"),
        ],
        columns: &["profile", "r", "rt", "N_max", "trials", "min_ratio", "max_ratio", "seed"],
        run: lp_equivalence,
        verdict: lp_equivalence_verdict,
    },
    Experiment {
        name: "density-lp",
        summary: "Littlewood-Paley ratio for densities of orthonormal ensembles",
        params: &[
            p!("d", "[2]", "dimension"),
            p!("k", "[1]", "number of y coordinates"),
            p!("n", "[8]", "band size N"),
            p!("profile", "[\"smooth\"]", "cutoff profile"),
            p!("r", "[\"2\"]", "x exponent for the density"),
            p!("rt", "[\"3/2\"]", "y exponent for the density"),
            p!("j", "[1, 2, 3, 4]", "ensemble rank"),
            p!("trials", "[6]", "ensembles per point"),
            p!("m_factor", "[4]", "grid points per axis divided by N"),
        ],
        columns: &["profile", "r", "rt", "N", "J", "trials", "min_ratio", "max_ratio", "quasi_norm"],
        run: density_lp,
        verdict: density_lp_verdict,
    },
    Experiment {
        name: "bernstein",
        summary: "vector Bernstein ratios on shell-supported families",
        params: &[
            p!("d", "[2]", "dimension"),
            p!("k", "[1]", "number of y coordinates"),
            p!("n", "[4, 8, 16]", "shell N"),
            p!("rho", "[-1.0, 0.0, 1.0]", "derivative order"),
            p!("r", "[\"4\"]", "x exponent"),
            p!("rt", "[\"2\"]", "y exponent"),
            p!("family", "[3]", "functions per family"),
            p!("trials", "[4]", "families per point"),
            p!("m_factor", "[4]", "grid points per axis divided by N"),
        ],
        columns: &["d", "k", "N", "rho", "r", "rt", "family", "trials", "min_ratio", "max_ratio"],
        run: bernstein,
        verdict: bernstein_verdict,
    },
    Experiment {
        name: "ons-scan",
        summary: "orthonormal Strichartz ratio ‖ρ‖ / (N^{1/q}‖λ‖_{ℓ^α′}) for random ensembles",
        params: &[
            p!("d", "[2]", "dimension"),
            p!("k", "[1]", "number of y coordinates"),
            p!("n", "[4, 8, 16]", "band size N"),
            p!("j", "[1, 2, 4, 8]", "ensemble rank"),
            p!("triple", "[\"8/5:4:2\"]", "q:r:r̃ on the sharp line"),
            p!("alpha_prime", "[\"auto\"]", "Schatten exponent; auto = 2γ/(γ+1)"),
            p!("trials", "[3]", "ensembles per point"),
            p!("m_factor", "[4]", "grid points per axis divided by N"),
        ],
        columns: &["d", "k", "q", "r", "rt", "N", "J", "alpha_prime", "trials", "max_ratio", "within_range"],
        run: ons_scan,
        verdict: ons_verdict,
    },
    Experiment {
        name: "duality-schatten",
        summary: "Schatten norm of W ℰ versus ‖W‖² on the window |t| ≤ 1/(2N)",
        params: &[
            p!("d", "[1]", "dimension (k = d)"),
            p!("n", "[2, 4, 8]", "band size N"),
            p!("triple", "[\"3:3:3\"]", "q:r:r̃"),
            p!("potential", "[\"random\", \"constant\"]", "W: random in [0,1) or identically 1"),
        ],
        columns: &["d", "N", "potential", "dim", "lhs", "lhs_factored", "rhs", "ratio", "closed_form"],
        run: duality,
        verdict: duality_verdict,
    },
    Experiment {
        name: "nls-picard",
        summary: "Picard iteration for the Duhamel formulation; one row per iteration",
        params: &[
            p!("d", "[3]", "dimension"),
            p!("k", "[2]", "number of y coordinates"),
            p!("n", "[4]", "band size N"),
            p!("m", "[16]", "grid points per axis"),
            p!("p", "[2.0]", "growth exponent"),
            p!("variant", "[\"non-gauge\"]", "gauge, non-gauge or hartree"),
            p!("sign", "[1]", "+1 or -1"),
            p!("t_final", "[0.05]", "final time"),
            p!("n_t", "[257]", "time samples"),
            p!("tol", "[1e-14]", "stopping distance"),
            p!("amplitude", "[1e-2]", "L² norm of the initial datum"),
            p!("potential", "[\"gaussian:0.1\"]", "zero, dirac, constant:c, gaussian:σ or power:a"),
            p!("save", "[0]", "1 writes the trajectory as JSON next to the CSV"),
        ],
        columns: &["point", "d", "k", "N", "p", "variant", "T", "n_t", "iteration", "distance", "ratio", "converged"],
        run: nls_picard,
        verdict: nls_picard_verdict,
    },
    Experiment {
        name: "nls-crosscheck",
        summary: "Picard versus Strang split-step at the final time, plus split-step order",
        params: &[
            p!("d", "[3]", "dimension"),
            p!("k", "[2]", "number of y coordinates"),
            p!("n", "[4]", "band size N"),
            p!("m", "[16]", "grid points per axis"),
            p!("p", "[2.0]", "growth exponent"),
            p!("variant", "[\"non-gauge\"]", "gauge, non-gauge or hartree"),
            p!("sign", "[1]", "+1 or -1"),
            p!("t_final", "[0.05]", "final time"),
            p!("n_t", "[257]", "time samples"),
            p!("tol", "[1e-14]", "stopping distance"),
            p!("amplitude", "[1e-2]", "L² norm of the initial datum"),
            p!("potential", "[\"gaussian:0.1\"]", "zero, dirac, constant:c, gaussian:σ or power:a"),
            p!("order_amplitude", "[0.5]", "L² norm for the order study"),
            p!("order_n_t", "[33]", "coarsest time samples for the order study"),
            p!("levels", "[4]", "step halvings in the order study"),
        ],
        columns: &["d", "k", "N", "p", "variant", "T", "n_t", "agreement", "order_min", "order_max"],
        run: nls_crosscheck,
        verdict: nls_crosscheck_verdict,
    },
    Experiment {
        name: "hartree-conservation",
        summary: "split-step Hartree flow of a finite-rank density matrix with conservation diagnostics",
        params: &[
            p!("d", "[1]", "dimension (k = d)"),
            p!("n", "[8]", "band size N"),
            p!("m", "[64]", "grid points per axis"),
            p!("j", "[4]", "rank"),
            p!("dt", "[1e-3]", "time step"),
            p!("steps", "[1000]", "number of steps"),
            p!("cadence", "[50]", "steps between recorded rows"),
            p!("potential", "[\"gaussian:0.1\"]", "interaction w"),
            p!("save", "[0]", "1 writes the final state as a JSON checkpoint"),
        ],
        columns: &[
            "point",
            "J",
            "N",
            "dt",
            "step",
            "t",
            "trace",
            "gram_dev",
            "schatten_a",
            "sobolev_schatten",
            "rho_mixed_norm_running",
            "energy",
        ],
        run: hartree_conservation,
        verdict: hartree_conservation_verdict,
    },
    Experiment {
        name: "hartree-picard",
        summary: "operator Picard iteration for the density matrix versus the split-step flow",
        params: &[
            p!("d", "[1]", "dimension (k = d)"),
            p!("n", "[8]", "band size N"),
            p!("m", "[64]", "grid points per axis"),
            p!("j", "[4]", "rank"),
            p!("t_final", "[0.1]", "final time"),
            p!("n_t", "[201]", "time samples"),
            p!("substeps", "[4]", "split steps per time sample"),
            p!("potential", "[\"gaussian:0.05\"]", "interaction w"),
            p!("size", "[1e-2]", "Sobolev-Schatten size of the initial state"),
            p!("tol", "[1e-13]", "stopping distance"),
        ],
        columns: &["d", "N", "J", "T", "n_t", "iterations", "converged", "last_ratio", "agreement"],
        run: hartree_picard,
        verdict: hartree_picard_verdict,
    },
    Experiment {
        name: "admissibility-region",
        summary: "classification of the diagonal r = r̃ over [0, 1/2]²",
        params: &[p!("d", "[3]", "dimension"), p!("res", "[12]", "grid resolution")],
        columns: &["d", "inv_r", "inv_q", "region"],
        run: region,
        verdict: region_verdict,
    },
];

fn setup(d: usize, k: usize, n: usize, m: usize) -> Result<(Arc<FrequencyLattice>, Grid)> {
    Ok((Arc::new(FrequencyLattice::new(d, k, n)?), Grid::new(d, k, m)?))
}

fn grid_size(pt: &Point, n: usize) -> Result<usize> {
    Ok(pt.usize("m_factor")? * n)
}

fn to_exp(e: Exponent<Ratio<i64>>) -> Exp {
    match e {
        Exponent::Finite(v) => Exp::Finite(*v.numer() as f64 / *v.denom() as f64),
        Exponent::Infinite => Exp::Infinite,
    }
}

fn point_seed(ctx: &Context<'_>, pt: &Point) -> u64 {
    rng(ctx.seed, pt.index as u64).gen()
}

fn profile(pt: &Point) -> Result<CutoffProfile> {
    match pt.text("profile")?.as_str() {
        "smooth" => Ok(CutoffProfile::Smooth),
        "sharp" => Ok(CutoffProfile::Sharp),
        other => Err(LabError::bad("profile", format!("expected smooth or sharp, got `{other}`"))),
    }
}

fn triple(pt: &Point, d: usize, k: usize) -> Result<Triple> {
    let [q, r, rt] = pt.triple("triple")?;
    Ok(classify_triple(q, r, rt, d, k).to_f64())
}

fn triple_cells(t: &Triple) -> [Cell; 3] {
    [t.q.into(), t.r.into(), t.rt.into()]
}

fn potential(pt: &Point, lat: Arc<FrequencyLattice>, grid: Grid) -> Result<PotentialSpec<f64>> {
    let text = pt.text("potential")?;
    let (kind, arg) = text.split_once(':').map_or((text.as_str(), None), |(a, b)| (a, Some(b)));
    let value = || -> Result<f64> {
        arg.ok_or_else(|| LabError::bad("potential", format!("`{kind}` needs a value")))?
            .parse()
            .map_err(|_| LabError::bad("potential", format!("cannot read `{text}`")))
    };
    Ok(match kind {
        "zero" => PotentialSpec::zero(lat, grid)?,
        "dirac" => PotentialSpec::dirac(lat, grid)?,
        "constant" => PotentialSpec::constant(lat, grid, value()?)?,
        "gaussian" => PotentialSpec::gaussian(lat, grid, value()?)?,
        "power" => PotentialSpec::singular_power(lat, grid, value()?)?,
        _ => return Err(LabError::bad("potential", format!("unknown potential `{text}`"))),
    })
}

fn variant(pt: &Point) -> Result<Variant> {
    match pt.text("variant")?.as_str() {
        "gauge" => Ok(Variant::Gauge),
        "non-gauge" => Ok(Variant::NonGauge),
        "hartree" => Ok(Variant::Hartree),
        other => Err(LabError::bad("variant", format!("expected gauge, non-gauge or hartree, got `{other}`"))),
    }
}

fn growth_checks(table: &Table, keys: &[&str], by: &str, value: &str, limit: f64) -> Vec<Verdict> {
    table
        .series(keys, by, value)
        .into_iter()
        .map(|(key, vals)| {
            let g = growth(&vals);
            Verdict::new(g < limit, format!("[{key}] {value} growth {g:.4} (< {limit})"))
        })
        .collect()
}

fn kernel_decay(pt: &Point, _: &Context<'_>) -> Result<Vec<Row>> {
    if pt.usize("d")? != 1 {
        return Err(LabError::bad("d", "the kernel scan is one-dimensional"));
    }
    let (n, eps) = (pt.usize("n")?, pt.f64("eps")?);
    let probe = kernel_decay_scan::<f64>(&[n], eps, pt.usize("times")?, pt.usize("x_points")?)?.remove(0);
    let exact = kernel_1d(0.0f64, 0.0, n) == Complex64::new((2 * n + 1) as f64, 0.0);
    Ok(vec![vec![1usize.into(), n.into(), eps.into(), probe.sup_weighted.into(), exact.into()]])
}

fn kernel_decay_verdict(table: &Table, th: &Thresholds) -> Verdict {
    let mut parts: Vec<Verdict> = table
        .series(&["d", "eps"], "N", "sup_weighted")
        .into_iter()
        .map(|(key, vals)| {
            let s = stability(&vals);
            Verdict::new(s < th.growth, format!("[{key}] consecutive factor {s:.4} (< {})", th.growth))
        })
        .collect();
    let exact = table.rows.iter().all(|r| r[table.col("origin_exact")] == Cell::Bool(true));
    parts.push(Verdict::new(exact, format!("K(0,0) = 2N+1 exactly: {exact}")));
    Verdict::all(parts)
}

fn fixed_time_decay(pt: &Point, ctx: &Context<'_>) -> Result<Vec<Row>> {
    let (d, k, n) = (pt.usize("d")?, pt.usize("k")?, pt.usize("n")?);
    let pair = pt.text("pair")?;
    let (r, rt) = pair.split_once(':').ok_or_else(|| LabError::bad("pair", format!("expected r:r̃, got `{pair}`")))?;
    let r = to_exp(crate::registry::parse_exponent(r).map_err(|m| LabError::bad("pair", m))?);
    let rt = to_exp(crate::registry::parse_exponent(rt).map_err(|m| LabError::bad("pair", m))?);
    let (lat, grid) = setup(d, k, n, grid_size(pt, n)?)?;
    let trials = pt.usize("trials")?;
    let times = [1.0 / (2.0 * n as f64), 1.0 / (6.0 * n as f64), 1.0 / (20.0 * n as f64)];
    let mut g = rng(ctx.seed, pt.index as u64);
    let mut best: f64 = 0.0;
    for _ in 0..trials {
        let f = gaussian_field(lat.clone(), grid.clone(), &mut g)?;
        for &t in &times {
            best = best.max(fixed_time_decay_ratio(&f, t, n, r, rt)?);
        }
    }
    Ok(vec![vec![d.into(), k.into(), r.into(), rt.into(), n.into(), trials.into(), best.into()]])
}

fn fixed_time_decay_verdict(table: &Table, th: &Thresholds) -> Verdict {
    let mut parts = growth_checks(table, &["d", "k", "r", "rt"], "N", "max_ratio", th.growth);
    for row in &table.rows {
        if table.text(row, "r") == "2" && table.text(row, "rt") == "2" {
            let v = table.f64(row, "max_ratio").unwrap_or(f64::NAN);
            parts.push(Verdict::new(v <= 1.0 + 1e-10, format!("(2,2) N={} max {v:.12}", table.text(row, "N"))));
        }
    }
    Verdict::all(parts)
}

fn strichartz_scan(pt: &Point, ctx: &Context<'_>) -> Result<Vec<Row>> {
    let (d, k, n, trials) = (pt.usize("d")?, pt.usize("k")?, pt.usize("n")?, pt.usize("trials")?);
    let t = triple(pt, d, k)?;
    if !t.strichartz_admissible() {
        return Err(LabError::bad("triple", format!("({}, {}, {}) is not Strichartz admissible", t.q, t.r, t.rt)));
    }
    let (lat, grid) = setup(d, k, n, grid_size(pt, n)?)?;
    let mut g = rng(ctx.seed, pt.index as u64);
    let mut best: f64 = 0.0;
    for _ in 0..trials {
        let f = gaussian_field(lat.clone(), grid.clone(), &mut g)?;
        best = best.max(strichartz_ratio(&f, &t, None)?);
    }
    let [q, r, rt] = triple_cells(&t);
    Ok(vec![vec![d.into(), k.into(), q, r, rt, n.into(), trials.into(), best.into()]])
}

fn strichartz_scan_verdict(table: &Table, th: &Thresholds) -> Verdict {
    Verdict::all(growth_checks(table, &["d", "k", "q", "r", "rt"], "N", "max_ratio", th.growth))
}

fn localized_strichartz(pt: &Point, ctx: &Context<'_>) -> Result<Vec<Row>> {
    let (d, k, n, trials) = (pt.usize("d")?, pt.usize("k")?, pt.usize("n")?, pt.usize("trials")?);
    let t = triple(pt, d, k)?;
    let (lat, grid) = setup(d, k, n, grid_size(pt, n)?)?;
    let mut g = rng(ctx.seed, pt.index as u64);
    let (mut local, mut global): (f64, f64) = (0.0, 0.0);
    for _ in 0..trials {
        let f = gaussian_field(lat.clone(), grid.clone(), &mut g)?;
        let lr = localized_strichartz_ratio(&f, n, &t)?;
        local = local.max(lr.localized);
        global = global.max(lr.global);
    }
    let [q, r, rt] = triple_cells(&t);
    Ok(vec![vec![d.into(), k.into(), q, r, rt, n.into(), trials.into(), local.into(), global.into()]])
}

fn localized_verdict(table: &Table, th: &Thresholds) -> Verdict {
    let keys = ["d", "k", "q", "r", "rt"];
    let mut parts = growth_checks(table, &keys, "N", "max_localized", th.growth);
    parts.extend(growth_checks(table, &keys, "N", "max_global", th.growth));
    Verdict::all(parts)
}

/// Gaussian, single-shell and sparse fields in rotation.
fn lp_sample(lat: &Arc<FrequencyLattice>, grid: &Grid, seed: u64, i: u64) -> strichartz::Result<Field> {
    let mut r = rng(seed, i);
    match i % 3 {
        0 => gaussian_field(lat.clone(), grid.clone(), &mut r),
        1 => {
            let top = lat.n().trailing_zeros() + 1;
            let level = 1usize << r.gen_range(0..top);
            gaussian_field_on(lat.clone(), grid.clone(), &mut r, |p| {
                let m = p.max_abs() as usize;
                m <= level && 2 * m > level
            })
        }
        _ => {
            let picks: Vec<usize> = (0..3).map(|_| r.gen_range(0..lat.len())).collect();
            gaussian_field_on(lat.clone(), grid.clone(), &mut r, |p| picks.contains(&p.index))
        }
    }
}

fn lp_equivalence(pt: &Point, ctx: &Context<'_>) -> Result<Vec<Row>> {
    let (d, k, n, trials) = (pt.usize("d")?, pt.usize("k")?, pt.usize("n_max")?, pt.usize("trials")?);
    let prof = profile(pt)?;
    let (r, rt) = (to_exp(pt.exponent("r")?), to_exp(pt.exponent("rt")?));
    let (lat, grid) = setup(d, k, n, grid_size(pt, n)?)?;
    let seed = point_seed(ctx, pt);
    let range = lp_equivalence_scan(|i| lp_sample(&lat, &grid, seed, i), r, rt, trials, prof)?;
    Ok(vec![vec![
        prof.tag().into(),
        r.into(),
        rt.into(),
        n.into(),
        trials.into(),
        range.min_ratio.into(),
        range.max_ratio.into(),
        (seed as i64).into(),
    ]])
}

fn lp_equivalence_verdict(table: &Table, th: &Thresholds) -> Verdict {
    let mut parts = Vec::new();
    for (key, rows) in table.groups(&["profile", "r", "rt"]) {
        let first = rows[0];
        if table.text(first, "profile") == "sharp" && table.text(first, "r") == "2" && table.text(first, "rt") == "2" {
            let dev = rows
                .iter()
                .flat_map(|r| [table.f64(r, "min_ratio"), table.f64(r, "max_ratio")])
                .map(|v| (v.unwrap_or(f64::NAN) - 1.0).abs())
                .fold(0.0, f64::max);
            parts.push(Verdict::new(dev <= th.exact, format!("[{key}] deviation from 1: {dev:.2e}")));
            continue;
        }
        let mut spreads: Vec<(f64, f64)> = rows
            .iter()
            .map(|r| {
                let (lo, hi) = (table.f64(r, "min_ratio").unwrap_or(f64::NAN), table.f64(r, "max_ratio").unwrap_or(f64::NAN));
                (table.f64(r, "N_max").unwrap_or(0.0), hi / lo)
            })
            .collect();
        spreads.sort_by(|a, b| a.0.total_cmp(&b.0));
        let s = stability(&spreads.iter().map(|p| p.1).collect::<Vec<_>>());
        parts.push(Verdict::new(s < th.lp_spread, format!("[{key}] spread stability {s:.4} (< {})", th.lp_spread)));
    }
    Verdict::all(parts)
}

fn density_lp(pt: &Point, ctx: &Context<'_>) -> Result<Vec<Row>> {
    let (d, k, n, j, trials) = (pt.usize("d")?, pt.usize("k")?, pt.usize("n")?, pt.usize("j")?, pt.usize("trials")?);
    let prof = profile(pt)?;
    let (r, rt) = (to_exp(pt.exponent("r")?), to_exp(pt.exponent("rt")?));
    let (lat, grid) = setup(d, k, n, grid_size(pt, n)?)?;
    let mut g = rng(ctx.seed, pt.index as u64);
    let (mut lo, mut hi, mut quasi) = (f64::INFINITY, 0.0f64, false);
    for _ in 0..trials {
        let ens = make_ons(EnsembleKind::Random, j, lat.clone(), grid.clone(), g.gen())?;
        let ens = ens.with_weights((0..j).map(|i| 1.0 / (1 + i) as f64).collect())?;
        let res = density_square_norm(&ens, r, rt, prof)?;
        lo = lo.min(res.ratio());
        hi = hi.max(res.ratio());
        quasi |= res.quasi_norm;
    }
    Ok(vec![vec![prof.tag().into(), r.into(), rt.into(), n.into(), j.into(), trials.into(), lo.into(), hi.into(), quasi.into()]])
}

fn density_lp_verdict(table: &Table, th: &Thresholds) -> Verdict {
    let mut parts = Vec::new();
    for (key, rows) in table.groups(&["profile", "r", "rt", "N"]) {
        let Some(base) = rows.iter().find(|r| table.text(r, "J") == "1") else {
            parts.push(Verdict::new(true, format!("[{key}] no rank-one baseline, reported only")));
            continue;
        };
        let spread = |lo: f64, hi: f64| hi / lo;
        let one = spread(table.f64(base, "min_ratio").unwrap_or(f64::NAN), table.f64(base, "max_ratio").unwrap_or(f64::NAN));
        let lo = rows.iter().filter_map(|r| table.f64(r, "min_ratio")).fold(f64::INFINITY, f64::min);
        let hi = rows.iter().filter_map(|r| table.f64(r, "max_ratio")).fold(0.0, f64::max);
        let all = spread(lo, hi);
        parts.push(Verdict::new(
            all < th.lp_spread * one,
            format!("[{key}] rank-one spread {one:.4}, all ranks {all:.4} (< {} x)", th.lp_spread),
        ));
    }
    Verdict::all(parts)
}

fn bernstein(pt: &Point, ctx: &Context<'_>) -> Result<Vec<Row>> {
    let (d, k, n) = (pt.usize("d")?, pt.usize("k")?, pt.usize("n")?);
    let (size, trials, rho) = (pt.usize("family")?, pt.usize("trials")?, pt.f64("rho")?);
    let (r, rt) = (to_exp(pt.exponent("r")?), to_exp(pt.exponent("rt")?));
    let (lat, grid) = setup(d, k, n, grid_size(pt, n)?)?;
    let mut g = rng(ctx.seed, pt.index as u64);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for _ in 0..trials {
        let family: Vec<Field> = (0..size)
            .map(|_| {
                gaussian_field_on(lat.clone(), grid.clone(), &mut g, |p| {
                    let m = p.max_abs() as usize;
                    m <= n && 2 * m > n
                })
            })
            .collect::<strichartz::Result<_>>()?;
        let v = bernstein_ratio(&family, rho, n, r, rt, CutoffProfile::Sharp)?;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok(vec![vec![d.into(), k.into(), n.into(), rho.into(), r.into(), rt.into(), size.into(), trials.into(), lo.into(), hi.into()]])
}

fn bernstein_verdict(table: &Table, th: &Thresholds) -> Verdict {
    let mut worst: f64 = 0.0;
    let mut zero_dev: f64 = 0.0;
    for row in &table.rows {
        let (lo, hi) = (table.f64(row, "min_ratio").unwrap_or(f64::NAN), table.f64(row, "max_ratio").unwrap_or(f64::NAN));
        if table.f64(row, "rho") == Some(0.0) {
            zero_dev = zero_dev.max((lo - 1.0).abs()).max((hi - 1.0).abs());
        } else {
            worst = worst.max(hi);
        }
    }
    Verdict::all(vec![
        Verdict::new(worst <= th.bernstein, format!("max ratio {worst:.4} (<= {})", th.bernstein)),
        Verdict::new(zero_dev <= th.exact, format!("rho=0 deviation {zero_dev:.2e}")),
    ])
}

fn ons_scan(pt: &Point, ctx: &Context<'_>) -> Result<Vec<Row>> {
    let (d, k, n, j, trials) = (pt.usize("d")?, pt.usize("k")?, pt.usize("n")?, pt.usize("j")?, pt.usize("trials")?);
    let t = triple(pt, d, k)?;
    let alpha = match pt.text("alpha_prime")?.as_str() {
        "auto" => t.alpha_prime,
        _ => pt.f64("alpha_prime")?,
    };
    let within = t.orthonormal_admissible(&alpha);
    let (lat, grid) = setup(d, k, n, grid_size(pt, n)?)?;
    let samples = Some(TimeGrid::<f64>::torus_samples(d, n));
    let mut g = rng(ctx.seed, pt.index as u64);
    let mut best: f64 = 0.0;
    for _ in 0..trials {
        let ens = make_ons(EnsembleKind::Random, j, lat.clone(), grid.clone(), g.gen())?;
        let ens = ens.with_weights((0..j).map(|i| 1.0 / (1 + i) as f64).collect())?;
        let v = if within {
            ons_strichartz_ratio(&ens, &t, alpha, samples)?
        } else {
            ons_strichartz_ratio_unchecked(&ens, &t, alpha, samples)?
        };
        best = best.max(v);
    }
    let [q, r, rt] = triple_cells(&t);
    Ok(vec![vec![d.into(), k.into(), q, r, rt, n.into(), j.into(), alpha.into(), trials.into(), best.into(), within.into()]])
}

fn ons_verdict(table: &Table, th: &Thresholds) -> Verdict {
    let mut parts = Vec::new();
    for (key, rows) in table.groups(&["d", "k", "q", "r", "rt", "alpha_prime"]) {
        if rows.iter().any(|r| r[table.col("within_range")] != Cell::Bool(true)) {
            parts.push(Verdict::new(true, format!("[{key}] outside the proven range, reported only")));
            continue;
        }
        let mut by_n: Vec<(f64, f64)> = Vec::new();
        for r in rows {
            let (n, v) = (table.f64(r, "N").unwrap_or(0.0), table.f64(r, "max_ratio").unwrap_or(f64::NAN));
            match by_n.iter_mut().find(|p| p.0 == n) {
                Some(p) => p.1 = p.1.max(v),
                None => by_n.push((n, v)),
            }
        }
        by_n.sort_by(|a, b| a.0.total_cmp(&b.0));
        let g = growth(&by_n.iter().map(|p| p.1).collect::<Vec<_>>());
        parts.push(Verdict::new(g < th.growth, format!("[{key}] growth over N {g:.4} (< {})", th.growth)));
    }
    Verdict::all(parts)
}

fn duality(pt: &Point, ctx: &Context<'_>) -> Result<Vec<Row>> {
    let (d, n) = (pt.usize("d")?, pt.usize("n")?);
    let [q, r, rt] = pt.triple("triple")?;
    let exact = classify_triple(q, r, rt, d, d);
    let t = exact.to_f64();
    let m = (2 * n + 1).next_power_of_two();
    let (lat, grid) = setup(d, d, n, m)?;
    let times = window_times::<f64>(d, n)?;
    let kind = pt.text("potential")?;
    let w = match kind.as_str() {
        "random" => {
            let mut g = rng(ctx.seed, pt.index as u64);
            SpaceTimePotential::from_fn(times, grid, |_, _| g.gen_range(0.0..1.0))
        }
        "constant" => SpaceTimePotential::from_fn(times, grid, |_, _| 1.0),
        other => return Err(LabError::bad("potential", format!("expected random or constant, got `{other}`"))),
    };
    let c = duality_schatten_check(&w, &lat, &t)?;
    let three = Exponent::Finite(Ratio::from_integer(3));
    let closed = if kind == "constant" && d == 1 && exact.q == three && exact.r == three && exact.rt == three {
        Cell::Float((1.0 / n as f64).powf(1.0 / 3.0) * ((2 * n + 1) as f64).powf(1.0 / 3.0))
    } else {
        Cell::Empty
    };
    Ok(vec![vec![
        d.into(),
        n.into(),
        kind.into(),
        c.dim.into(),
        c.lhs.into(),
        c.lhs_factored.into(),
        c.rhs.into(),
        c.ratio().into(),
        closed,
    ]])
}

fn duality_verdict(table: &Table, th: &Thresholds) -> Verdict {
    let mut parts = growth_checks(table, &["d", "potential"], "N", "ratio", th.growth);
    let mut routes: f64 = 0.0;
    let mut closed: f64 = 0.0;
    for row in &table.rows {
        let (a, b) = (table.f64(row, "lhs").unwrap_or(f64::NAN), table.f64(row, "lhs_factored").unwrap_or(f64::NAN));
        routes = routes.max((a - b).abs() / a);
        if let Some(c) = table.f64(row, "closed_form") {
            closed = closed.max((table.f64(row, "ratio").unwrap_or(f64::NAN) - c).abs() / c);
        }
    }
    parts.push(Verdict::new(routes <= th.identity, format!("dense vs factored {routes:.2e}")));
    parts.push(Verdict::new(closed <= th.identity, format!("constant W closed form {closed:.2e}")));
    Verdict::all(parts)
}

struct NlsSetup {
    f: Field,
    w: PotentialSpec<f64>,
    spec: NonlinearitySpec<f64>,
    config: SolverConfig<f64>,
}

fn nls_setup(pt: &Point, ctx: &Context<'_>) -> Result<NlsSetup> {
    let (d, k, n, m) = (pt.usize("d")?, pt.usize("k")?, pt.usize("n")?, pt.usize("m")?);
    let (lat, grid) = setup(d, k, n, m)?;
    let f = gaussian_field(lat.clone(), grid.clone(), &mut rng(ctx.seed, pt.index as u64))?;
    let f = f.scale(Complex64::new(pt.f64("amplitude")? / f.l2_norm(), 0.0));
    let w = potential(pt, lat, grid)?;
    let sign = pt.int("sign")?;
    let spec = NonlinearitySpec::new(pt.f64("p")?, variant(pt)?, if sign < 0 { -1 } else { 1 })?;
    let mut config = SolverConfig::new(pt.f64("t_final")?, pt.usize("n_t")?, n, m);
    config.tol = pt.f64("tol")?;
    Ok(NlsSetup { f, w, spec, config })
}

fn nls_picard(pt: &Point, ctx: &Context<'_>) -> Result<Vec<Row>> {
    let s = nls_setup(pt, ctx)?;
    let sol = picard_solve(&s.f, &s.w, &s.spec, &s.config)?;
    if pt.usize("save")? == 1 {
        let path = ctx.sidecar(pt.index, "trajectory.json");
        write_json(&path, &TrajectoryRecord::from_trajectory(&sol.trajectory)?)?;
    }
    let h = &sol.history;
    let prefix: Vec<Cell> = vec![
        pt.index.into(),
        pt.usize("d")?.into(),
        pt.usize("k")?.into(),
        pt.usize("n")?.into(),
        s.spec.p.into(),
        pt.text("variant")?.into(),
        s.config.t_final.into(),
        s.config.n_t.into(),
    ];
    Ok(h.distances
        .iter()
        .enumerate()
        .map(|(i, &dist)| {
            let ratio = if i == 0 { Cell::Empty } else { h.ratios.get(i - 1).map_or(Cell::Empty, |&r| r.into()) };
            let mut row = prefix.clone();
            row.extend([(i + 1).into(), dist.into(), ratio, h.converged.into()]);
            row
        })
        .collect())
}

fn nls_picard_verdict(table: &Table, _: &Thresholds) -> Verdict {
    let mut parts = Vec::new();
    for (key, rows) in table.groups(&["point"]) {
        let converged = rows.iter().all(|r| r[table.col("converged")] == Cell::Bool(true));
        let worst = rows.iter().filter_map(|r| table.f64(r, "ratio")).fold(0.0, f64::max);
        parts.push(Verdict::new(converged && worst < 1.0, format!("[{key}] converged {converged}, max ratio {worst:.3e}")));
    }
    Verdict::all(parts)
}

fn nls_crosscheck(pt: &Point, ctx: &Context<'_>) -> Result<Vec<Row>> {
    let s = nls_setup(pt, ctx)?;
    let pic = picard_solve(&s.f, &s.w, &s.spec, &s.config)?;
    let ss = splitstep_solve(&s.f, &s.w, &s.spec, &s.config)?;
    let (a, b) = (ss.last().expect("nonempty"), pic.trajectory.last().expect("nonempty"));
    let agreement = a.sub(b)?.l2_norm() / b.l2_norm();
    let big = s.f.scale(Complex64::new(pt.f64("order_amplitude")? / s.f.l2_norm(), 0.0));
    let mut cfg = s.config.clone();
    cfg.n_t = pt.usize("order_n_t")?;
    let sc = self_convergence(&big, &s.w, &s.spec, &cfg, pt.usize("levels")?)?;
    let lo = sc.orders.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = sc.orders.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(vec![vec![
        pt.usize("d")?.into(),
        pt.usize("k")?.into(),
        pt.usize("n")?.into(),
        s.spec.p.into(),
        pt.text("variant")?.into(),
        s.config.t_final.into(),
        s.config.n_t.into(),
        agreement.into(),
        lo.into(),
        hi.into(),
    ]])
}

fn nls_crosscheck_verdict(table: &Table, th: &Thresholds) -> Verdict {
    let mut parts = Vec::new();
    for row in &table.rows {
        let a = table.f64(row, "agreement").unwrap_or(f64::NAN);
        let (lo, hi) = (table.f64(row, "order_min").unwrap_or(f64::NAN), table.f64(row, "order_max").unwrap_or(f64::NAN));
        parts.push(Verdict::new(a <= th.nls_agreement, format!("agreement {a:.2e} (<= {:e})", th.nls_agreement)));
        parts.push(Verdict::new(
            (lo - 2.0).abs() <= th.order_band && (hi - 2.0).abs() <= th.order_band,
            format!("orders in [{lo:.3}, {hi:.3}]"),
        ));
    }
    Verdict::all(parts)
}

fn ensemble_state(pt: &Point, ctx: &Context<'_>) -> Result<(Arc<FrequencyLattice>, Grid, strichartz::Ensemble)> {
    let (d, n, m, j) = (pt.usize("d")?, pt.usize("n")?, pt.usize("m")?, pt.usize("j")?);
    let (lat, grid) = setup(d, d, n, m)?;
    let ens = make_ons(EnsembleKind::Random, j, lat.clone(), grid.clone(), point_seed(ctx, pt))?;
    let ens = ens.with_weights((0..j).map(|i| 0.5f64.powi(i as i32)).collect())?;
    Ok((lat, grid, ens))
}

fn hartree_conservation(pt: &Point, ctx: &Context<'_>) -> Result<Vec<Row>> {
    let (lat, grid, ens) = ensemble_state(pt, ctx)?;
    let w = potential(pt, lat.clone(), grid)?;
    let gamma = DensityMatrix::new(ens)?;
    let mut cfg = HartreeConfig::new(pt.f64("dt")?, pt.usize("steps")?, w);
    cfg.cadence = pt.usize("cadence")?;
    let run = evolve_fermions(&gamma, &cfg)?;
    if pt.usize("save")? == 1 {
        let last = run.trajectory.states.last().expect("initial state recorded");
        let cp = Checkpoint::from_ensemble(last.ensemble(), *run.trajectory.steps.last().unwrap(), *run.trajectory.times.last().unwrap());
        write_json(&ctx.sidecar(pt.index, "checkpoint.json"), &cp)?;
    }
    Ok(run
        .diagnostics
        .iter()
        .map(|r| {
            vec![
                pt.index.into(),
                gamma.rank().into(),
                lat.n().into(),
                cfg.dt.into(),
                r.step.into(),
                r.t.into(),
                r.trace.into(),
                r.gram_dev.into(),
                r.schatten.into(),
                r.sobolev_schatten.into(),
                r.rho_mixed_norm_running.into(),
                r.energy.into(),
            ]
        })
        .collect())
}

fn hartree_conservation_verdict(table: &Table, th: &Thresholds) -> Verdict {
    let mut parts = Vec::new();
    for (key, rows) in table.groups(&["point"]) {
        let col = |name: &str| rows.iter().map(|r| table.f64(r, name).unwrap_or(f64::NAN)).collect::<Vec<_>>();
        let (trace, gram, sch) = (col("trace"), col("gram_dev"), col("schatten_a"));
        let drift = trace.iter().map(|t| (t - trace[0]).abs()).fold(0.0, f64::max);
        let gmax = gram.iter().copied().fold(0.0, f64::max);
        let sdrift = sch.iter().map(|s| (s - sch[0]).abs() / sch[0]).fold(0.0, f64::max);
        parts.push(Verdict::new(
            drift < th.trace_drift && gmax < th.gram_drift && sdrift < th.identity,
            format!("[{key}] trace drift {drift:.2e}, gram {gmax:.2e}, schatten drift {sdrift:.2e}"),
        ));
    }
    Verdict::all(parts)
}

fn hartree_picard(pt: &Point, ctx: &Context<'_>) -> Result<Vec<Row>> {
    let (lat, grid, ens) = ensemble_state(pt, ctx)?;
    let (t_final, n_t, sub) = (pt.f64("t_final")?, pt.usize("n_t")?, pt.usize("substeps")?);
    let mut oc = OperatorPicardConfig::new(n_t);
    oc.tol = pt.f64("tol")?;
    let ss = sobolev_schatten_norm(&ens, Exp::Finite(oc.alpha_prime), oc.s)?;
    let size = pt.f64("size")?;
    let ens = ens.with_weights(ens.weights().iter().map(|l| l * size / ss).collect())?;
    let gamma = DensityMatrix::new(ens)?;
    let w = potential(pt, lat.clone(), grid)?;
    let sol = picard_operator_solve(&gamma, &w, t_final, &oc)?;
    let steps = (n_t - 1) * sub;
    let mut hc = HartreeConfig::new(t_final / steps as f64, steps, w);
    hc.cadence = sub;
    let split = evolve_fermions(&gamma, &hc)?;
    let dens: Vec<Vec<f64>> = split.trajectory.states.iter().map(|s| s.density().values).collect();
    let agreement = rho_l2_distance(&sol.grid.weights, &sol.densities, &dens)?;
    let last_ratio = sol.history.ratios.last().map_or(Cell::Empty, |&r| r.into());
    Ok(vec![vec![
        lat.d().into(),
        lat.n().into(),
        gamma.rank().into(),
        t_final.into(),
        n_t.into(),
        sol.history.distances.len().into(),
        sol.history.converged.into(),
        last_ratio,
        agreement.into(),
    ]])
}

fn hartree_picard_verdict(table: &Table, th: &Thresholds) -> Verdict {
    Verdict::all(
        table
            .rows
            .iter()
            .map(|row| {
                let conv = row[table.col("converged")] == Cell::Bool(true);
                let a = table.f64(row, "agreement").unwrap_or(f64::NAN);
                Verdict::new(conv && a <= th.hartree_agreement, format!("converged {conv}, agreement {a:.2e}"))
            })
            .collect(),
    )
}

pub fn region_rows(d: usize, res: usize) -> Result<Vec<Row>> {
    Ok(region_plotdata(d, res)?
        .into_iter()
        .map(|s| vec![d.into(), s.inv_r.into(), s.inv_q.into(), s.region.tag().into()])
        .collect())
}

fn region(pt: &Point, _: &Context<'_>) -> Result<Vec<Row>> {
    region_rows(pt.usize("d")?, pt.usize("res")?)
}

fn region_verdict(table: &Table, _: &Thresholds) -> Verdict {
    let corners = [
        ("O", 0.0, 0.0, Region::DinhSide),
        ("C", 0.5, 0.0, Region::EnergyCorner),
        ("D", 0.5, 0.5, Region::BoundaryExcluded),
    ];
    let mut parts = Vec::new();
    for (key, rows) in table.groups(&["d"]) {
        for (label, a, b, want) in corners {
            let found = rows
                .iter()
                .find(|r| table.f64(r, "inv_r") == Some(a) && table.f64(r, "inv_q") == Some(b))
                .map(|r| table.text(r, "region"));
            let ok = found.as_deref() == Some(want.tag());
            parts.push(Verdict::new(ok, format!("[{key}] {label} -> {}", found.unwrap_or_else(|| "missing".into()))));
        }
    }
    Verdict::all(parts)
}
