//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use qmclab::PointSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random set whose coordinates sit on a coarse lattice about half the time,
/// so ties and points on box faces are common.
pub fn random_point_set(rng: &mut ChaCha8Rng, n: usize, d: usize) -> PointSet {
    let coarse = rng.random_bool(0.5);
    let coords = (0..n * d)
        .map(|_| {
            if coarse {
                rng.random_range(0..=8) as f64 / 8.0
            } else {
                rng.random::<f64>()
            }
        })
        .collect();
    PointSet::new(d, coords).unwrap()
}

/// Star discrepancy by direct counting at every corner of the product of
/// per-axis coordinate sets (plus 1.0). Each corner gives
/// `max(closed/n − vol, vol − open/n)`, where `open` drops points on any
/// upper face.
pub fn brute_star_discrepancy(ps: &PointSet) -> f64 {
    let d = ps.dim();
    let n = ps.len();
    let axes: Vec<Vec<f64>> = (0..d)
        .map(|j| {
            let mut a: Vec<f64> = ps.points().map(|p| p[j]).collect();
            a.push(1.0);
            a.sort_by(f64::total_cmp);
            a.dedup();
            a
        })
        .collect();
    let total: usize = axes.iter().map(Vec::len).product();
    let mut best = 0.0f64;
    for mut cell in 0..total {
        let q: Vec<f64> = axes
            .iter()
            .map(|a| {
                let v = a[cell % a.len()];
                cell /= a.len();
                v
            })
            .collect();
        let closed = ps
            .points()
            .filter(|p| p.iter().zip(&q).all(|(x, c)| x <= c))
            .count();
        let open = ps
            .points()
            .filter(|p| p.iter().zip(&q).all(|(x, c)| x < c))
            .count();
        let vol: f64 = q.iter().product();
        best = best
            .max(closed as f64 / n as f64 - vol)
            .max(vol - open as f64 / n as f64);
    }
    best
}

/// One-sided signed-rank p-value for `median(b − a) < 0` by enumerating
/// every sign assignment of the nonzero differences.
pub fn wilcoxon_by_enumeration(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    // Midranks of |d| over all differences, zeros included.
    let ranks: Vec<f64> = d
        .iter()
        .map(|x| {
            let below = d.iter().filter(|y| y.abs() < x.abs()).count() as f64;
            let tied = d.iter().filter(|y| y.abs() == x.abs()).count() as f64;
            below + (tied + 1.0) / 2.0
        })
        .collect();
    let nz: Vec<(f64, bool)> = d
        .iter()
        .zip(&ranks)
        .filter(|(x, _)| **x != 0.0)
        .map(|(x, r)| (*r, *x > 0.0))
        .collect();
    if nz.is_empty() {
        return 1.0;
    }
    let observed: f64 = nz.iter().filter(|(_, pos)| *pos).map(|(r, _)| r).sum();
    let m = nz.len();
    let mut hits = 0u64;
    for mask in 0u64..1 << m {
        let t: f64 = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| nz[i].0).sum();
        if t <= observed + 1e-9 {
            hits += 1;
        }
    }
    hits as f64 / (1u64 << m) as f64
}

/// Benjamini–Hochberg by definition: the smallest `m·p_j / rank_j` over all
/// `p_j ≥ p_i`, capped at 1.
pub fn bh_by_definition(p: &[f64]) -> Vec<f64> {
    let m = p.len() as f64;
    p.iter()
        .map(|&pi| {
            p.iter()
                .filter(|&&pj| pj >= pi)
                .map(|&pj| {
                    let rank = p.iter().filter(|&&pl| pl <= pj).count() as f64;
                    m * pj / rank
                })
                .fold(1.0f64, f64::min)
        })
        .collect()
}
