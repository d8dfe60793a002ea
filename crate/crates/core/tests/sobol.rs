mod common;

use qmclab::sobol::{
    load_direction_table, randomized_sobol_points, sobol_points, DirectionSource, DirectionTable,
    LmsShiftRandomization, ShiftKind, SobolGenerator,
};

fn jk(dim: usize) -> DirectionTable {
    load_direction_table(&DirectionSource::JoeKuo, dim).unwrap()
}

/// Rows of the fixture, in units of 1/64.
fn fixture() -> Vec<Vec<u32>> {
    let text = include_str!("data/sobol_joe_kuo_d6_n64.txt");
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.split_whitespace().map(|t| t.parse().unwrap()).collect())
        .collect()
}

#[test]
fn joe_kuo_matches_independent_fixture() {
    let rows = fixture();
    assert_eq!(rows.len(), 64);
    for dim in 1..=6 {
        for n in [1, 2, 7, 16, 33, 64] {
            let ps = sobol_points(&jk(dim), n, dim).unwrap();
            for (i, row) in rows.iter().take(n).enumerate() {
                for j in 0..dim {
                    assert_eq!(
                        ps.point(i)[j],
                        row[j] as f64 / 64.0,
                        "dim {dim} point {i} axis {j}"
                    );
                }
            }
        }
    }
}

#[test]
fn llm_table_differs_only_in_dimensions_four_to_six() {
    let a = jk(32);
    let b = load_direction_table(&DirectionSource::Llm, 32).unwrap();
    for d in 2..=32 {
        let (ea, eb) = (a.entry(d).unwrap(), b.entry(d).unwrap());
        if (4..=6).contains(&d) {
            assert_ne!(ea, eb, "dimension {d}");
        } else {
            assert_eq!(ea, eb, "dimension {d}");
            assert_eq!(a.directions(d), b.directions(d));
        }
    }
    let params = |d: usize| {
        let e = b.entry(d).unwrap();
        (e.degree, e.coeffs, e.initial.clone())
    };
    assert_eq!(params(4), (3, 1, vec![1, 3, 5]));
    assert_eq!(params(5), (3, 2, vec![1, 3, 7]));
    assert_eq!(params(6), (4, 1, vec![1, 1, 3, 7]));
}

/// Per-dimension count of the first `2^m` points in every dyadic interval
/// of length `2^-k`, `k ≤ m`, must be exactly `2^(m-k)`.
fn elementary_counts_hold(gen: &SobolGenerator, m: u32) -> bool {
    let n = 1usize << m;
    let ps = gen.points(n).unwrap();
    (0..gen.dim()).all(|j| {
        (0..=m).all(|k| {
            let cells = 1usize << k;
            let mut count = vec![0usize; cells];
            for p in ps.points() {
                count[(p[j] * cells as f64) as usize] += 1;
            }
            count.iter().all(|&c| c == n >> k)
        })
    })
}

#[test]
fn scrambling_preserves_elementary_interval_counts() {
    let table = jk(8).with_bits(8).unwrap();
    for seed in 0..100 {
        let rand = LmsShiftRandomization::new(seed, 8, 8, ShiftKind::Digital);
        let gen = SobolGenerator::randomized(&table, 8, &rand).unwrap();
        for m in 0..=8 {
            assert!(elementary_counts_hold(&gen, m), "seed {seed} m {m}");
        }
    }
}

#[test]
fn identity_randomization_reproduces_plain_points() {
    let table = jk(10);
    let id = LmsShiftRandomization::identity(10, table.bits());
    let gen = SobolGenerator::randomized(&table, 10, &id).unwrap();
    assert_eq!(
        gen.points(200).unwrap(),
        sobol_points(&table, 200, 10).unwrap()
    );
}

#[test]
fn randomized_first_point_is_unbiased() {
    let table = jk(4);
    let reps = 10_000;
    let mut sums = [0.0f64; 4];
    for seed in 0..reps {
        let ps = randomized_sobol_points(&table, 2, 4, seed).unwrap();
        for (s, &c) in sums.iter_mut().zip(ps.point(1)) {
            *s += c;
        }
    }
    // Uniform on [0, 1) has standard deviation 1/sqrt(12).
    let se = (1.0 / 12.0f64).sqrt() / (reps as f64).sqrt();
    for s in sums {
        let mean = s / reps as f64;
        assert!((mean - 0.5).abs() < 5.0 * se, "{mean}");
    }
}

#[test]
fn streaming_fill_matches_materialized_points() {
    let table = jk(32);
    let rand = LmsShiftRandomization::new(4, 32, table.bits(), ShiftKind::Digital);
    let gen = SobolGenerator::randomized(&table, 32, &rand).unwrap();
    let all = gen.points(3000).unwrap();
    let mut chunk = vec![0.0; 1000 * 32];
    gen.fill(1500, 1000, &mut chunk);
    assert_eq!(&chunk[..], &all.coords()[1500 * 32..2500 * 32]);
}
