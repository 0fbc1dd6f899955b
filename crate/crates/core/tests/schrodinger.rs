use gibbsids_core::sampler::stream_rng;
use gibbsids_core::schrodinger::{
    dirichlet_laplacian_spectrum, discretize, estimate_ids, ConfigurationSource, DiscreteOperator, Grid, IdsSettings,
};
use gibbsids_core::{BoxDomain, Point, PointConfiguration, SingleSitePotential};
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use rand::Rng;

fn dense_eigenvalues(op: &DiscreteOperator) -> Vec<f64> {
    let n = op.dimension();
    let m = DMatrix::from_row_slice(n, n, &op.dense_matrix());
    let mut e: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    e.sort_by(|a, b| a.partial_cmp(b).unwrap());
    e
}

fn random_operator<R: Rng>(rng: &mut R) -> DiscreteOperator {
    let h = 0.125;
    let domain = if rng.random_bool(0.5) {
        let n = rng.random_range(1..=400usize);
        BoxDomain::interval(0.0, (n + 1) as f64 * h).unwrap()
    } else {
        let a = rng.random_range(1..=20usize);
        let b = rng.random_range(1..=20usize);
        BoxDomain::from_bounds(&[0.0, 0.0], &[(a + 1) as f64 * h, (b + 1) as f64 * h]).unwrap()
    };
    let grid = Grid::new(domain, h).unwrap();
    let depth = rng.random_range(1.0..200.0);
    let v: Vec<f64> = (0..grid.len()).map(|_| -depth * rng.random::<f64>()).collect();
    DiscreteOperator::with_potential(grid, v).unwrap()
}

#[test]
fn inertia_counts_match_dense_eigensolver() {
    let mut rng = stream_rng(42, 0);
    for _ in 0..100 {
        let op = random_operator(&mut rng);
        let eig = dense_eigenvalues(&op);
        let (lo, hi) = (eig[0] - 1.0, eig[eig.len() - 1] + 1.0);
        for _ in 0..20 {
            let lambda = rng.random_range(lo..hi);
            let expected = eig.iter().filter(|e| **e <= lambda).count();
            assert_eq!(op.count_eigenvalues_leq(lambda).unwrap(), expected, "lambda {lambda}");
        }
    }
}

#[test]
fn free_counts_match_closed_form_on_a_sweep() {
    for grid in [
        Grid::new(BoxDomain::interval(0.0, 4.0).unwrap(), 1.0 / 16.0).unwrap(),
        Grid::new(BoxDomain::from_bounds(&[0.0, 0.0], &[2.0, 1.5]).unwrap(), 0.125).unwrap(),
    ] {
        let op = DiscreteOperator::free(grid.clone());
        let spec = dirichlet_laplacian_spectrum(&grid);
        let top = spec[spec.len() - 1] * 1.05;
        let scale = op.norm();
        for k in 0..200 {
            let lambda = -1.0 + top * k as f64 / 199.0;
            // eigenvalues within the perturbation window count as ≤ λ
            let expected = spec.iter().filter(|e| **e <= lambda + 1e-9 * scale).count();
            assert_eq!(op.count_eigenvalues_leq(lambda).unwrap(), expected, "lambda {lambda}");
        }
    }
}

#[test]
fn single_well_lowers_the_ground_state() {
    let grid = Grid::new(BoxDomain::centered(4.0, 2).unwrap(), 0.125).unwrap();
    let u0 = SingleSitePotential::cosine(3.0, 0.5, 2).unwrap();
    let c = PointConfiguration::new(vec![Point::origin(2)], BoxDomain::centered(4.0, 2).unwrap()).unwrap();
    let with = dense_eigenvalues(&discretize(&c, &u0, &grid).unwrap());
    let free = dense_eigenvalues(&DiscreteOperator::free(grid));
    assert!(with[0] < free[0]);
}

#[test]
fn deeper_wells_raise_the_ids() {
    let u0 = SingleSitePotential::triangular(2.0, 0.5, 1).unwrap();
    let deeper = u0.scaled(2.0).unwrap();
    let settings = IdsSettings {
        dim: 1,
        length: 8.0,
        spacing: 1.0 / 16.0,
        lambdas: vec![-3.0, -2.0, -1.0, -0.5],
        replicas: 300,
        seed: 4,
        padding: None,
    };
    let source = ConfigurationSource::Poisson { intensity: 1.0 };
    let a = estimate_ids(&source, &u0, &settings).unwrap();
    let b = estimate_ids(&source, &deeper, &settings).unwrap();
    for k in 0..settings.lambdas.len() {
        let sigma = (a.std_error[k].powi(2) + b.std_error[k].powi(2)).sqrt();
        assert!(b.n_hat[k] >= a.n_hat[k] - 3.0 * sigma);
        assert!(b.n_hat[k] > a.n_hat[k]);
    }
}

fn small_operator() -> impl Strategy<Value = DiscreteOperator> {
    (1usize..40, prop::collection::vec(-30.0f64..0.0, 40)).prop_map(|(n, v)| {
        let grid = Grid::new(BoxDomain::interval(0.0, (n + 1) as f64 * 0.25).unwrap(), 0.25).unwrap();
        DiscreteOperator::with_potential(grid, v[..n].to_vec()).unwrap()
    })
}

proptest! {
    #[test]
    fn counts_are_monotone_in_lambda(op in small_operator(), a in -40.0f64..80.0, b in -40.0f64..80.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(op.count_eigenvalues_leq(lo).unwrap() <= op.count_eigenvalues_leq(hi).unwrap());
    }

    #[test]
    fn lower_potential_counts_more(op in small_operator(), drop in prop::collection::vec(0.0f64..5.0, 40), l in -40.0f64..80.0) {
        let lowered: Vec<f64> = op.potential().iter().zip(&drop).map(|(v, d)| v - d).collect();
        let other = DiscreteOperator::with_potential(op.grid().clone(), lowered).unwrap();
        prop_assert!(other.count_eigenvalues_leq(l).unwrap() >= op.count_eigenvalues_leq(l).unwrap());
        let free = DiscreteOperator::free(op.grid().clone());
        prop_assert!(op.count_eigenvalues_leq(l).unwrap() >= free.count_eigenvalues_leq(l).unwrap());
    }

    #[test]
    fn shift_covariance(op in small_operator(), c in -10.0f64..10.0, l in -40.0f64..80.0) {
        prop_assert_eq!(op.shifted(c).count_eigenvalues_leq(l).unwrap(), op.count_eigenvalues_leq(l - c).unwrap());
    }
}
