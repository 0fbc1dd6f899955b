use gibbsids_core::num;
use gibbsids_core::quadrature::integrate_box;
use gibbsids_core::sampler::{
    birth_log_ratio, death_log_ratio, estimate_count_pmf, move_log_ratio, run_chain, run_chain_with, sample_poisson,
    stream_rng, ChainSchedule, ChainState, GibbsTarget, ProposalSettings,
};
use gibbsids_core::{BoxDomain, InteractionModel, PairPotential, Point};
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn chi_square_vs(hits: &[u64], samples: u64, probs: &[f64]) -> (f64, f64) {
    // pool the last bin with the tail
    let k = probs.len();
    let mut observed = vec![0u64; k + 1];
    for (n, h) in hits.iter().enumerate() {
        observed[n.min(k)] += h;
    }
    let tail = 1.0 - probs.iter().sum::<f64>();
    let mut stat = 0.0;
    for (n, obs) in observed.iter().enumerate() {
        let p = if n < k { probs[n] } else { tail };
        let e = p * samples as f64;
        stat += (*obs as f64 - e).powi(2) / e;
    }
    let critical = ChiSquared::new(k as f64).unwrap().inverse_cdf(0.99);
    (stat, critical)
}

fn poisson_probs(mean: f64, upto: usize) -> Vec<f64> {
    (0..upto)
        .map(|n| (-mean + n as f64 * mean.ln() - num::ln_factorial(n as u64)).exp())
        .collect()
}

#[test]
fn poisson_sampler_count_law() {
    let window = BoxDomain::interval(0.0, 1.0).unwrap();
    let mut rng = stream_rng(11, 0);
    let counts: Vec<usize> = (0..100_000).map(|_| sample_poisson(&window, 1.0, &mut rng).unwrap().len()).collect();
    let pmf = estimate_count_pmf(counts).unwrap();
    let (stat, critical) = chi_square_vs(&pmf.hits, pmf.samples, &poisson_probs(1.0, 6));
    assert!(stat < critical, "chi2 {stat} >= {critical}");
    let (lo, hi) = pmf.interval(1, 1.96);
    assert!(lo <= (-1.0f64).exp() && (-1.0f64).exp() <= hi);
}

#[test]
fn null_interaction_chain_is_poisson() {
    let window = BoxDomain::interval(0.0, 1.0).unwrap();
    let target = GibbsTarget::new(InteractionModel::null(1), window).unwrap();
    let schedule = ChainSchedule::new(1_000 + 40 * 20_000, 1_000, 40).unwrap();
    let run = run_chain(&target, &ProposalSettings::default(), &schedule, 0, &mut stream_rng(5, 0)).unwrap();
    let pmf = estimate_count_pmf(run.samples.iter().map(|c| c.len())).unwrap();
    let (stat, critical) = chi_square_vs(&pmf.hits, pmf.samples, &poisson_probs(1.0, 6));
    assert!(stat < critical, "chi2 {stat} >= {critical}");
    assert!(run.count_ess > 1_000.0);
}

#[test]
fn hardcore_chain_never_violates_the_core() {
    let window = BoxDomain::from_bounds(&[0.0, 0.0], &[4.0, 4.0]).unwrap();
    let model = InteractionModel::pairwise(PairPotential::hardcore(1.0).unwrap(), 2);
    let target = GibbsTarget::new(model, window).unwrap();
    let schedule = ChainSchedule::new(200_000, 0, 7).unwrap();
    let mut state = ChainState::empty(&target, 0);
    let mut checked = 0;
    run_chain_with(&mut state, &target, &ProposalSettings::default(), &schedule, &mut stream_rng(9, 0), |c| {
        let pts = c.points();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                assert!(pts[i].distance(&pts[j]) > 1.0);
            }
        }
        checked += 1;
    })
    .unwrap();
    assert!(checked > 20_000);
    assert!(state.configuration().len() > 3);
}

/// `Z_n = (1/n!) ∫_{Λ^n} e^{-U}` by nested quadrature; `P(M = n) = Z_n / Σ Z_m`.
fn strauss_weights(a: f64, r: f64, upto: usize) -> Vec<f64> {
    let energy = |x: &[f64]| {
        let mut u = 0.0;
        for i in 0..x.len() {
            for j in i + 1..x.len() {
                if (x[i] - x[j]).abs() <= r {
                    u += a;
                }
            }
        }
        (-u).exp()
    };
    (0..upto)
        .map(|n| {
            let integral = if n == 0 {
                1.0
            } else {
                integrate_box(energy, &vec![0.0; n], &vec![1.0; n], &[], 1e-9)
            };
            integral / num::ln_factorial(n as u64).exp()
        })
        .collect()
}

#[test]
fn strauss_count_law_matches_quadrature() {
    for (a, r) in [(1.0, 1.0), (1.0, 0.3)] {
        let window = BoxDomain::interval(0.0, 1.0).unwrap();
        let model = InteractionModel::pairwise(PairPotential::strauss(a, r).unwrap(), 1);
        let target = GibbsTarget::new(model, window).unwrap();
        let schedule = ChainSchedule::new(10_000 + 20 * 100_000, 10_000, 20).unwrap();
        let run = run_chain(&target, &ProposalSettings::default(), &schedule, 0, &mut stream_rng(21, 0)).unwrap();
        let pmf = estimate_count_pmf(run.samples.iter().map(|c| c.len())).unwrap();
        let w = strauss_weights(a, r, 4);
        // the tail n >= 4 has mass below 1e-3 of the total for both settings
        let tail_bound = 1e-3;
        let total: f64 = w.iter().sum();
        let inflate = (run.samples.len() as f64 / run.count_ess).sqrt();
        for (n, wn) in w.iter().enumerate() {
            let exact = wn / total;
            let p = pmf.probability(n);
            let se = (p * (1.0 - p) / run.count_ess).sqrt().max(1e-4) * inflate.max(1.0);
            assert!(
                (p - exact).abs() <= 4.0 * se + tail_bound,
                "a={a} r={r} n={n}: empirical {p} vs exact {exact} (se {se})"
            );
        }
    }
}

#[test]
fn detailed_balance_on_small_states() {
    let window = BoxDomain::interval(0.0, 2.0).unwrap();
    let model = InteractionModel::pairwise(PairPotential::strauss(0.7, 0.5).unwrap(), 1);
    let target = GibbsTarget::new(model.clone(), window.clone()).unwrap();
    let density = |pts: &[Point]| {
        let c = gibbsids_core::PointConfiguration::new(pts.to_vec(), window.clone()).unwrap();
        target.energy(&c).boltzmann()
    };
    let volume = window.volume();
    let mut rng = stream_rng(2, 0);
    for _ in 0..200 {
        let x: f64 = rng.random_range(0.0..2.0);
        let y: f64 = rng.random_range(0.0..2.0);
        let eta = vec![Point::from(x)];
        let grown = vec![Point::from(x), Point::from(y)];
        // birth of y from {x} against death of y from {x, y}
        let forward = density(&eta) / volume * birth_log_ratio(&target, &eta, &Point::from(y)).exp().min(1.0);
        let backward = density(&grown) / 2.0 * death_log_ratio(&target, &grown, 1).exp().min(1.0);
        assert!((forward - backward).abs() <= 1e-12 * forward.max(backward));
        // move x -> y inside the two-point state {x, w}
        let w: f64 = rng.random_range(0.0..2.0);
        let from = vec![Point::from(x), Point::from(w)];
        let to = vec![Point::from(y), Point::from(w)];
        let forward = density(&from) * move_log_ratio(&target, &from, 0, &Point::from(y)).exp().min(1.0);
        let backward = density(&to) * move_log_ratio(&target, &to, 0, &Point::from(x)).exp().min(1.0);
        assert!((forward - backward).abs() <= 1e-12 * forward.max(backward));
    }
}
