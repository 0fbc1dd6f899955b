//! The twelve acceptance criteria, one PASS/FAIL line each.

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Poisson};

use gibbsids::config::RawConfig;
use gibbsids::experiments::{Experiment, ExperimentConfig};
use gibbsids::output::Report;
use gibbsids_core::bounds::{
    find_validity_threshold, gaussian_lattice_sum, geometric_grid, int_lem_bound, pastur_slope_fit,
    quadratic_slope_fit, upper_lap_bound,
};
use gibbsids_core::packing::{norm_u_s, InteractionWindow};
use gibbsids_core::sampler::{
    check_domination, estimate_count_pmf, laplace_functional_mc, poisson_laplace_closed_form, run_chain,
    sample_poisson, stream_rng, ChainSchedule, CountIn, GibbsTarget, ProposalSettings, SiteSum,
};
use gibbsids_core::schrodinger::{dirichlet_laplacian_spectrum, DiscreteOperator, Grid, IdsEstimate};
use gibbsids_core::{BoxDomain, InteractionModel, PairPotential, SingleSitePotential};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn load(name: &str) -> ExperimentConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name);
    let raw = RawConfig::from_path(&path).unwrap_or_else(|e| panic!("{name}: {e}"));
    ExperimentConfig::parse(&raw).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn run_config(name: &str) -> Result<(ExperimentConfig, Report), String> {
    let cfg = load(name);
    let report = cfg.run().map_err(|e| format!("{name}: {e}"))?;
    Ok((cfg, report))
}

fn require_checks(name: &str, report: &Report) -> Result<String, String> {
    let lines: Vec<String> = report.checks.iter().map(|c| c.to_string()).collect();
    ensure(report.passed() && !report.checks.is_empty(), format!("{name}: {}", lines.join("; ")))?;
    Ok(report
        .checks
        .iter()
        .map(|c| format!("{} margin={:.3e}", c.name, c.margin))
        .collect::<Vec<_>>()
        .join(", "))
}

fn dense_count(op: &DiscreteOperator, lambda: f64) -> usize {
    let n = op.dimension();
    let eig = SymmetricEigen::new(DMatrix::from_row_slice(n, n, &op.dense_matrix()));
    eig.eigenvalues.iter().filter(|&&e| e <= lambda).count()
}

fn criterion_1() -> Outcome {
    let mut rng = stream_rng(2024, 1);
    let mut compared = 0;
    for case in 0..100 {
        let (domain, h) = if case % 2 == 0 {
            let nodes = rng.random_range(5..=400usize);
            let h = rng.random_range(0.02..0.3);
            (BoxDomain::interval(0.0, h * (nodes + 1) as f64).unwrap(), h)
        } else {
            let (a, b) = (rng.random_range(2..=20usize), rng.random_range(2..=20usize));
            let h = rng.random_range(0.05..0.5);
            (BoxDomain::from_bounds(&[0.0, 0.0], &[h * (a + 1) as f64, h * (b + 1) as f64]).unwrap(), h)
        };
        let grid = Grid::new(domain, h).map_err(|e| e.to_string())?;
        let depth = rng.random_range(0.1..20.0);
        let v: Vec<f64> = (0..grid.len()).map(|_| -depth * rng.random::<f64>()).collect();
        let op = DiscreteOperator::with_potential(grid, v).map_err(|e| e.to_string())?;
        let n = op.dimension();
        let eig = SymmetricEigen::new(DMatrix::from_row_slice(n, n, &op.dense_matrix()));
        let (lo, hi) = (eig.eigenvalues.min() - 1.0, eig.eigenvalues.max() + 1.0);
        for _ in 0..20 {
            let lambda = rng.random_range(lo..hi);
            let dense = eig.eigenvalues.iter().filter(|&&e| e <= lambda).count();
            let inertia = op.count_eigenvalues_leq(lambda).map_err(|e| e.to_string())?;
            ensure(dense == inertia, format!("case {case} (n={n}) λ={lambda}: dense {dense} vs inertia {inertia}"))?;
            compared += 1;
        }
    }
    Ok(format!("{compared} counts equal"))
}

fn criterion_2() -> Outcome {
    let grids = [
        Grid::new(BoxDomain::interval(0.0, 8.0).unwrap(), 1.0 / 16.0).unwrap(),
        Grid::new(BoxDomain::from_bounds(&[0.0, 0.0], &[3.0, 2.0]).unwrap(), 0.125).unwrap(),
        Grid::new(BoxDomain::from_bounds(&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0]).unwrap(), 0.125).unwrap(),
    ];
    let mut compared = 0;
    for grid in grids {
        let spectrum = dirichlet_laplacian_spectrum(&grid);
        let top = spectrum[spectrum.len() - 1];
        let op = DiscreteOperator::free(grid);
        for k in 0..200 {
            let lambda = -1.0 + (top + 2.0) * k as f64 / 199.0;
            let exact = spectrum.iter().filter(|&&e| e <= lambda).count();
            let got = op.count_eigenvalues_leq(lambda).map_err(|e| e.to_string())?;
            ensure(exact == got, format!("λ={lambda}: closed form {exact} vs inertia {got}"))?;
            compared += 1;
        }
        ensure(dense_count(&op, top * 0.5) == spectrum.iter().filter(|&&e| e <= top * 0.5).count(), "dense oracle")?;
    }
    Ok(format!("{compared} counts equal"))
}

fn criterion_3() -> Outcome {
    let unit = BoxDomain::interval(0.0, 1.0).unwrap();
    let samples = 100_000u64;
    let counts: Vec<usize> = (0..samples)
        .map(|k| sample_poisson(&unit, 1.0, &mut stream_rng(3, k)).map(|c| c.len()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let pmf = estimate_count_pmf(counts).map_err(|e| e.to_string())?;
    let law = Poisson::new(1.0).unwrap();
    let bins = 6;
    let mut stat = 0.0;
    let mut tail_expected = 1.0;
    let mut tail_observed = samples;
    for n in 0..bins {
        let expected = law.pmf(n as u64);
        let observed = pmf.hits(n);
        stat += (observed as f64 - samples as f64 * expected).powi(2) / (samples as f64 * expected);
        tail_expected -= expected;
        tail_observed -= observed;
    }
    stat += (tail_observed as f64 - samples as f64 * tail_expected).powi(2) / (samples as f64 * tail_expected);
    let p_value = 1.0 - ChiSquared::new(bins as f64).unwrap().cdf(stat);
    ensure(p_value > 0.01, format!("χ²={stat:.3} p={p_value:.4}"))?;

    let window = BoxDomain::interval(-2.0, 2.0).unwrap();
    let u = SingleSitePotential::triangular(1.0, 1.0, 1).unwrap().reflected();
    let configs: Vec<_> = (0..samples)
        .map(|k| sample_poisson(&window, 1.0, &mut stream_rng(33, k)))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for t in [0.5, 1.0, 2.0] {
        let est = laplace_functional_mc(&configs, &u, t).map_err(|e| e.to_string())?;
        let exact = poisson_laplace_closed_form(&u, t, 1.0, &window).map_err(|e| e.to_string())?.ln();
        let z = (est.log_mean - exact).abs() / est.std_error;
        worst = worst.max(z);
        ensure(z <= 3.0, format!("t={t}: log MC {:.5} vs {exact:.5}, {z:.2}σ", est.log_mean))?;
    }
    Ok(format!("χ² p={p_value:.3}; Laplace worst {worst:.2}σ"))
}

fn criterion_4() -> Outcome {
    let (cfg, report) = run_config("tail-sandwich.cfg")?;
    let Experiment::Tail(tail) = &cfg.experiment else {
        return Err("tail-sandwich.cfg is not a tail-sandwich run".into());
    };
    let retained = tail.schedule.retained() * tail.chains as u64;
    ensure(retained >= 1_000_000, format!("only {retained} retained samples"))?;
    ensure(tail.window.diameter() <= 1.0 + 1e-12, "window diameter above 1")?;
    let (a, r) = match tail.model.pair_potential() {
        Some(PairPotential::Strauss { strength, range }) => (*strength, *range),
        _ => return Err("not a Strauss model".into()),
    };
    ensure(a == 1.0 && r == 1.0, "model must be Strauss(a=1, R=1)")?;
    Ok(format!("retained={retained}; {}", require_checks("tail-sandwich", &report)?))
}

fn criterion_5() -> Outcome {
    let model = InteractionModel::pairwise(PairPotential::strauss(1.0, 1.0).unwrap(), 1);
    let z = model.domination_intensity();
    ensure(z == 1.0, format!("domination intensity {z}"))?;
    let domain = BoxDomain::interval(-2.0, 2.0).unwrap();
    let window = BoxDomain::interval(-0.5, 0.5).unwrap();
    let u = SingleSitePotential::triangular(1.0, 1.0, 1).unwrap().reflected();
    let target = GibbsTarget::new(model, domain.clone()).map_err(|e| e.to_string())?;
    let schedule = ChainSchedule::new(220_000, 20_000, 10).unwrap();
    let mut worst = f64::INFINITY;
    for seed in 0..10u64 {
        let chain = run_chain(&target, &ProposalSettings::default(), &schedule, 0, &mut stream_rng(500 + seed, 0))
            .map_err(|e| e.to_string())?;
        let poisson: Vec<_> = (0..20_000u64)
            .map(|k| sample_poisson(&domain, z, &mut stream_rng(600 + seed, k)))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let count = check_domination(&chain.samples, &poisson, &CountIn(window.clone())).map_err(|e| e.to_string())?;
        let sum = check_domination(&chain.samples, &poisson, &SiteSum(u.clone())).map_err(|e| e.to_string())?;
        for (name, r) in [("M", count), ("Σu", sum)] {
            ensure(
                r.holds,
                format!("seed {seed} {name}: Gibbs {:.4} > Poisson {:.4} + 3σ ({:.4})", r.gibbs.mean, r.poisson.mean, r.sigma),
            )?;
            worst = worst.min((r.poisson.mean + 3.0 * r.sigma - r.gibbs.mean) / r.sigma);
        }
    }
    Ok(format!("10 seeds, smallest slack {worst:.2}σ"))
}

fn criterion_6() -> Outcome {
    let cases: Vec<(Vec<f64>, Vec<(usize, usize)>)> = vec![
        (vec![1.0], vec![]),
        (vec![1.0, 2.0], vec![]),
        (vec![1.0, 2.0], vec![(0, 1)]),
        (vec![1.0, 1.0, 1.0], vec![]),
        (vec![1.0, 1.0, 1.0], vec![(0, 1)]),
        (vec![1.0, 1.0, 1.0], vec![(0, 1), (1, 2)]),
    ];
    let ts = geometric_grid(0.5, 200.0, 80).unwrap();
    let mut thresholds = Vec::new();
    for (v, edges) in &cases {
        for eps in [0.1, 0.5] {
            let scan = find_validity_threshold(1.0, v, edges, eps, &ts).map_err(|e| e.to_string())?;
            let t0 = scan.threshold.ok_or(format!("v={v:?} I={edges:?} ε={eps}: no threshold"))?;
            for s in geometric_grid(t0, 10.0 * t0, 41).unwrap().into_iter().skip(1) {
                let sum = gaussian_lattice_sum(1.0, v, edges, s).map_err(|e| e.to_string())?.log_value;
                let bound = int_lem_bound(1.0, v, edges, s, eps).map_err(|e| e.to_string())?;
                ensure(sum <= bound, format!("v={v:?} I={edges:?} ε={eps} t={s}: {sum} > {bound}"))?;
            }
            thresholds.push(t0);
        }
    }
    let sum = gaussian_lattice_sum(1.0, &[1.0], &[], 2.0).map_err(|e| e.to_string())?.log_value;
    let bound = int_lem_bound(1.0, &[1.0], &[], 2.0, 0.1).map_err(|e| e.to_string())?;
    ensure((sum - 1.5619).abs() < 5e-4 && sum > bound, format!("small-t failure not reproduced: {sum} vs {bound}"))?;
    let max = thresholds.iter().copied().fold(0.0, f64::max);
    Ok(format!("{} cases with finite T (max {max:.3}); t=2: {sum:.4} > {bound:.1}", thresholds.len()))
}

/// Interval-arithmetic oracle for 1D cells against `S = B(0, R)`.
fn brute_force_coefficient(cells: &[(f64, f64)], v: &[f64], range: f64, closed: bool, a: f64) -> f64 {
    let inside = |x: f64| if closed { x.abs() <= range } else { x.abs() < range };
    let fully = |i: usize, j: usize| {
        let (ai, bi) = cells[i];
        let (aj, bj) = cells[j];
        inside(ai - bj) && inside(bi - aj)
    };
    let k = cells.len();
    let mut best = 0.0f64;
    for mask in 1u32..(1 << k) {
        let members: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
        if members.iter().enumerate().all(|(x, &i)| members[x + 1..].iter().all(|&j| !fully(i, j))) {
            best = best.max(members.iter().map(|&i| v[i] * v[i]).sum());
        }
    }
    best / (2.0 * a)
}

fn criterion_7() -> Outcome {
    let (cfg, report) = run_config("laplace-bound.cfg")?;
    let Experiment::Laplace(lap) = &cfg.experiment else {
        return Err("laplace-bound.cfg is not a laplace-bound run".into());
    };
    ensure(lap.v == [1.0, 1.0] && lap.strength == 1.0 && lap.eps == 0.2, "layout must be v=(1,1), a=1, ε=0.2")?;
    ensure(lap.ts == [2.0, 4.0, 6.0, 8.0], "t schedule must be 2 4 6 8")?;
    let detail = require_checks("laplace-bound", &report)?;
    let mut rng = stream_rng(77, 0);
    let mut layouts = 0;
    for k in 1..=8usize {
        for _ in 0..25 {
            let range = rng.random_range(0.5..2.0);
            let mut x = rng.random_range(-1.0..0.0);
            let cells: Vec<(f64, f64)> = (0..k)
                .map(|_| {
                    x += rng.random_range(0.0..0.6);
                    let w = rng.random_range(0.05..range);
                    let c = (x, x + w);
                    x += w;
                    c
                })
                .collect();
            let v: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..3.0)).collect();
            let a = rng.random_range(0.2..3.0);
            for closed in [false, true] {
                let s = InteractionWindow::ball(range, 1).unwrap();
                let s = if closed { s.closed() } else { s };
                let boxes = cells.iter().map(|&(l, h)| BoxDomain::interval(l, h).unwrap()).collect();
                let got = upper_lap_bound(boxes, &v, &s, a).map_err(|e| e.to_string())?.coefficient;
                let want = brute_force_coefficient(&cells, &v, range, closed, a);
                ensure(got == want, format!("k={k} cells={cells:?}: {got} vs brute force {want}"))?;
                layouts += 1;
            }
        }
    }
    Ok(format!("{detail}; K exact on {layouts} layouts"))
}

/// Best `Σ u²` over 1D lattice points pairwise at least 1 apart, by dynamic programming.
fn lattice_oracle(u: &dyn Fn(f64) -> f64, r: f64) -> f64 {
    let n = (1.0 / r).round() as i64;
    let xs: Vec<i64> = (-n..=n).collect();
    let mut best = vec![0.0f64; xs.len()];
    let mut prefix = vec![0.0f64; xs.len()];
    for i in 0..xs.len() {
        let gain = u(xs[i] as f64 * r).powi(2);
        let earlier = xs[i] - n;
        let reach = xs.iter().rposition(|&x| x <= earlier);
        best[i] = gain + reach.map_or(0.0, |j| prefix[j]);
        prefix[i] = best[i].max(if i > 0 { prefix[i - 1] } else { 0.0 });
    }
    prefix[xs.len() - 1]
}

fn criterion_8() -> Outcome {
    let s = InteractionWindow::ball(1.0, 1).unwrap();
    let fixtures: [(&str, SingleSitePotential, Box<dyn Fn(f64) -> f64>); 2] = [
        (
            "triangular",
            SingleSitePotential::triangular(1.0, 1.0, 1).unwrap(),
            Box::new(|x: f64| (1.0 - x.abs()).max(0.0)),
        ),
        (
            "cosine",
            SingleSitePotential::cosine(1.0, 1.0, 1).unwrap(),
            Box::new(|x: f64| if x.abs() <= 1.0 { (std::f64::consts::FRAC_PI_2 * x).cos() } else { 0.0 }),
        ),
    ];
    let mut notes = Vec::new();
    for (name, u0, closed_form) in &fixtures {
        let u = u0.reflected();
        let got = norm_u_s(&u, &s, 1e-3).map_err(|e| e.to_string())?;
        let oracle = lattice_oracle(closed_form.as_ref(), 1e-3);
        ensure(got.witness.is_feasible(&s), format!("{name}: infeasible witness"))?;
        ensure(
            (got.value - oracle).abs() <= 1e-6 && (got.value - 1.0).abs() <= 1e-6,
            format!("{name}: branch and bound {} vs enumeration {oracle}", got.value),
        )?;
        let wide = norm_u_s(&u, &InteractionWindow::ball(2.5, 1).unwrap(), 1e-3).map_err(|e| e.to_string())?;
        ensure(wide.value == 1.0, format!("{name}: S ⊇ supp u - supp u gives {}", wide.value))?;
        notes.push(format!("{name}={:.9}", got.value));
    }
    let (_, report) = run_config("norm-S.cfg")?;
    require_checks("norm-S", &report)?;
    Ok(notes.join(", "))
}

fn criterion_9() -> Outcome {
    let (cfg, report) = run_config("upper2-scan.cfg")?;
    let Experiment::Upper2(scan) = &cfg.experiment else {
        return Err("upper2-scan.cfg is not an upper2-scan run".into());
    };
    ensure(scan.ns == [4, 8, 16, 32, 64] && scan.b == 2.0 && scan.max_gap == 0.05, "schedule must be n=4..64, b=2, gap 5%")?;
    require_checks("upper2-scan", &report)
}

fn criterion_10() -> Outcome {
    let mut notes = Vec::new();
    for name in ["poisson-ids.cfg", "strauss-ids.cfg"] {
        let (cfg, report) = run_config(name)?;
        let Experiment::Ids(run) = &cfg.experiment else {
            return Err(format!("{name} is not an IDS run"));
        };
        let s = &run.settings;
        let in_range = s.lambdas.iter().all(|l| (-8.0..=-2.0).contains(l));
        ensure(s.dim == 1 && s.length == 16.0 && s.spacing <= 1.0 / 16.0 && in_range, format!("{name}: geometry"))?;
        ensure(run.u0.at_origin() == -2.0, format!("{name}: u0(0) must be -2"))?;
        notes.push(require_checks(name, &report)?);
    }
    let lambdas: Vec<f64> = (0..25).map(|k| -8.0 + 0.25 * k as f64).collect();
    let u0 = -2.0;
    let pastur: Vec<f64> = lambdas.iter().map(|l: &f64| (-l * (-l).ln() / u0).exp()).collect();
    let fit = pastur_slope_fit(&IdsEstimate::from_values(lambdas.clone(), pastur, 1), u0, None).map_err(|e| e.to_string())?;
    ensure((fit.plateau - 0.5).abs() <= 1e-9, format!("Pastur inversion {}", fit.plateau))?;
    let quadratic: Vec<f64> = lambdas.iter().map(|l| (-0.375 * l * l).exp()).collect();
    let fit = quadratic_slope_fit(&IdsEstimate::from_values(lambdas, quadratic, 1), 3.0, 4.0, None).map_err(|e| e.to_string())?;
    ensure((fit.plateau + 0.375).abs() <= 1e-9, format!("quadratic inversion {}", fit.plateau))?;
    Ok(format!("{}; synthetic inversions exact", notes.join("; ")))
}

fn criterion_11() -> Outcome {
    let (cfg, report) = run_config("hardcore-floor.cfg")?;
    let Experiment::Floor(run) = &cfg.experiment else {
        return Err("hardcore-floor.cfg is not a hardcore-floor run".into());
    };
    ensure(run.range == 1.0, "hardcore range must be 1")?;
    require_checks("hardcore-floor", &report)
}

fn criterion_12() -> Outcome {
    let mut notes = Vec::new();
    for name in ["weak-budget.cfg", "weak-budget-softshell.cfg"] {
        let (cfg, report) = run_config(name)?;
        let Experiment::Weak(scan) = &cfg.experiment else {
            return Err(format!("{name} is not a weak-budget run"));
        };
        ensure(scan.log_x == [2.0, 4.0, 8.0] && scan.n_factor == 1.1, format!("{name}: x schedule"))?;
        notes.push(require_checks(name, &report)?);
    }
    Ok(notes.join("; "))
}

struct Criterion {
    number: usize,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { number: 1, name: "eigenvalue-count exactness", budget: Duration::from_secs(60), run: criterion_1 },
        Criterion { number: 2, name: "free-spectrum oracle", budget: Duration::from_secs(10), run: criterion_2 },
        Criterion { number: 3, name: "Poisson sampler calibration", budget: Duration::from_secs(120), run: criterion_3 },
        Criterion { number: 4, name: "tail sandwich", budget: Duration::from_secs(600), run: criterion_4 },
        Criterion { number: 5, name: "stochastic domination", budget: Duration::from_secs(300), run: criterion_5 },
        Criterion { number: 6, name: "lattice-sum lemma", budget: Duration::from_secs(60), run: criterion_6 },
        Criterion { number: 7, name: "Laplace functional bound", budget: Duration::from_secs(600), run: criterion_7 },
        Criterion { number: 8, name: "separated-packing norm oracle", budget: Duration::from_secs(60), run: criterion_8 },
        Criterion { number: 9, name: "staircase convergence", budget: Duration::from_secs(120), run: criterion_9 },
        Criterion { number: 10, name: "regime discrimination", budget: Duration::from_secs(1800), run: criterion_10 },
        Criterion { number: 11, name: "hardcore floor", budget: Duration::from_secs(600), run: criterion_11 },
        Criterion { number: 12, name: "weak-condition budgets", budget: Duration::from_secs(10), run: criterion_12 },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(c.run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|detail| {
            ensure(elapsed <= c.budget, format!("took {elapsed:.1?}, budget {:?}", c.budget)).map(|_| detail)
        });
        let (status, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{status}  criterion {:>2}  {:<32} {:>8.2?}  {detail}", c.number, c.name, elapsed);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
