mod common;

use proptest::prelude::*;
use qmclab::discrepancy::{
    exact_star_discrepancy, local_discrepancy, ta_star_discrepancy, TaConfig, DEFAULT_GRID_BUDGET,
};
use qmclab::generators::{fibonacci_lattice_with, FibonacciVariant};
use qmclab::sobol::{load_direction_table, sobol_points, DirectionSource};
use qmclab::PointSet;

fn exact(ps: &PointSet) -> f64 {
    exact_star_discrepancy(ps, DEFAULT_GRID_BUDGET).unwrap()
}

#[test]
fn local_discrepancy_hand_counts() {
    let one = PointSet::new(2, vec![0.0, 0.0]).unwrap();
    let ld = local_discrepancy(&one, &[1.0, 1.0]).unwrap();
    assert_eq!((ld.closed_count, ld.open_count, ld.value), (1, 1, 0.0));

    let mid = PointSet::new(2, vec![0.5, 0.5]).unwrap();
    let ld = local_discrepancy(&mid, &[0.5, 0.5]).unwrap();
    assert_eq!((ld.closed_count, ld.open_count), (1, 0));
    assert_eq!(ld.volume, 0.25);
    assert_eq!(ld.value, 0.75);

    let two = PointSet::new(2, vec![0.25, 0.75, 0.75, 0.25]).unwrap();
    let ld = local_discrepancy(&two, &[0.5, 1.0]).unwrap();
    assert_eq!((ld.closed_count, ld.open_count, ld.value), (1, 1, 0.0));
}

#[test]
fn exact_matches_brute_force_on_random_sets() {
    let mut rng = common::rng(17);
    for case in 0..150 {
        let d = 2 + case % 2;
        let n = 1 + case % 30;
        let ps = common::random_point_set(&mut rng, n, d);
        let want = common::brute_star_discrepancy(&ps);
        let got = exact(&ps);
        assert!((got - want).abs() <= 1e-14, "case {case}: {got} vs {want}");
    }
}

#[test]
fn one_dimensional_sets_match_brute_force() {
    let mut rng = common::rng(5);
    for n in 1..20 {
        let ps = common::random_point_set(&mut rng, n, 1);
        assert!((exact(&ps) - common::brute_star_discrepancy(&ps)).abs() <= 1e-14);
    }
}

#[test]
fn ta_reaches_exact_on_fibonacci_16() {
    let ps = fibonacci_lattice_with(16, FibonacciVariant::Shifted).unwrap();
    let ta = ta_star_discrepancy(&ps, &TaConfig::default()).unwrap();
    let ex = exact(&ps);
    assert!((ex - 0.0962).abs() < 5e-5);
    assert!((ta - ex).abs() < 1e-9, "{ta} vs {ex}");
}

#[test]
fn ta_reaches_exact_on_3d_sobol_8() {
    let table = load_direction_table(&DirectionSource::JoeKuo, 3).unwrap();
    let ps = sobol_points(&table, 8, 3).unwrap();
    let ta = ta_star_discrepancy(&ps, &TaConfig::default()).unwrap();
    let ex = exact(&ps);
    assert!((ex - common::brute_star_discrepancy(&ps)).abs() <= 1e-14);
    assert!((ta - ex).abs() < 1e-9, "{ta} vs {ex}");
}

#[test]
fn ta_is_deterministic_in_seed() {
    let mut rng = common::rng(99);
    let ps = common::random_point_set(&mut rng, 20, 3);
    let cfg = TaConfig {
        iterations: 2000,
        seed: 3,
        ..TaConfig::default()
    };
    assert_eq!(
        ta_star_discrepancy(&ps, &cfg).unwrap(),
        ta_star_discrepancy(&ps, &cfg).unwrap()
    );
}

fn point_set_strategy() -> impl Strategy<Value = (usize, Vec<f64>)> {
    (2usize..=3, 1usize..=15).prop_flat_map(|(d, n)| {
        (
            Just(d),
            prop::collection::vec(
                prop_oneof![(0u8..=4).prop_map(|k| k as f64 / 4.0), 0.0f64..=1.0],
                n * d,
            ),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn invariant_under_point_permutation((d, coords) in point_set_strategy(), seed in any::<u64>()) {
        let ps = PointSet::new(d, coords.clone()).unwrap();
        let n = ps.len();
        let mut order: Vec<usize> = (0..n).collect();
        let mut rng = common::rng(seed);
        rand::seq::SliceRandom::shuffle(&mut order[..], &mut rng);
        let shuffled: Vec<f64> = order.iter().flat_map(|&i| ps.point(i).to_vec()).collect();
        let qs = PointSet::new(d, shuffled).unwrap();
        prop_assert_eq!(exact(&ps), exact(&qs));
    }

    #[test]
    fn invariant_under_axis_permutation((d, coords) in point_set_strategy()) {
        let ps = PointSet::new(d, coords).unwrap();
        let rotated: Vec<f64> = ps
            .points()
            .flat_map(|p| {
                let mut q = p.to_vec();
                q.rotate_left(1);
                q
            })
            .collect();
        let qs = PointSet::new(d, rotated).unwrap();
        prop_assert!((exact(&ps) - exact(&qs)).abs() <= 1e-15);
    }

    #[test]
    fn bounded_and_above_ta((d, coords) in point_set_strategy(), seed in any::<u64>()) {
        let ps = PointSet::new(d, coords).unwrap();
        let ex = exact(&ps);
        prop_assert!((0.0..=1.0).contains(&ex));
        let cfg = TaConfig { iterations: 3000, restart_every: 1000, seed, ..TaConfig::default() };
        let ta = ta_star_discrepancy(&ps, &cfg).unwrap();
        prop_assert!(ta <= ex + 1e-12);
    }
}
