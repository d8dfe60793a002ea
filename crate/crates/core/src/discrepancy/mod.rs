//! Star discrepancy of finite point sets.
//!
//! Anchored boxes `[0, q)` are scored at every corner `q` of the grid
//! `G_1 × … × G_d`, where `G_j` holds the distinct `j`-th coordinates plus
//! `1.0`. At each corner two counts are taken: points with `x ≤ q`
//! componentwise (closed box) and points with `x < q` componentwise (upper
//! faces removed). The local discrepancy is the larger deviation of either
//! fraction from the box volume.

mod exact;
mod threshold;

pub use exact::{exact_star_discrepancy, DEFAULT_GRID_BUDGET};
pub use threshold::{ta_star_discrepancy, TaConfig};

use crate::error::{Error, Result};
use crate::pointset::PointSet;

#[derive(Debug, Clone, PartialEq)]
pub struct LocalDiscrepancy {
    pub corner: Vec<f64>,
    pub volume: f64,
    pub closed_count: usize,
    pub open_count: usize,
    pub value: f64,
}

/// Local discrepancy of the anchored box with upper corner `q`.
///
/// Corners with a zero coordinate are accepted: the grid contains `0.0`
/// whenever a point sits on a lower face, and the closed count there is the
/// limit of boxes shrinking onto that face.
pub fn local_discrepancy(ps: &PointSet, q: &[f64]) -> Result<LocalDiscrepancy> {
    if q.len() != ps.dim() {
        return Err(Error::DimensionMismatch {
            expected: ps.dim(),
            actual: q.len(),
        });
    }
    if ps.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    if let Some(&bad) = q.iter().find(|&&c| !(0.0..=1.0).contains(&c)) {
        return Err(Error::invalid(format!(
            "box corner coordinate {bad} outside [0, 1]"
        )));
    }
    let (closed_count, open_count) = box_counts(ps, q);
    let volume = volume(q);
    Ok(LocalDiscrepancy {
        corner: q.to_vec(),
        volume,
        closed_count,
        open_count,
        value: deviation(closed_count, open_count, ps.len(), volume),
    })
}

/// Sorted distinct coordinates per axis, each terminated by `1.0`.
pub fn corner_grid(ps: &PointSet) -> Vec<Vec<f64>> {
    (0..ps.dim())
        .map(|axis| {
            let mut g = ps.axis(axis);
            g.push(1.0);
            g.sort_by(f64::total_cmp);
            g.dedup();
            g
        })
        .collect()
}

/// Number of corners in the grid of `ps`.
pub fn grid_cells(grid: &[Vec<f64>]) -> u128 {
    grid.iter().map(|g| g.len() as u128).product()
}

pub(crate) fn box_counts(ps: &PointSet, q: &[f64]) -> (usize, usize) {
    let mut closed = 0;
    let mut open = 0;
    for p in ps.points() {
        if p.iter().zip(q).all(|(x, c)| x <= c) {
            closed += 1;
            if p.iter().zip(q).all(|(x, c)| x < c) {
                open += 1;
            }
        }
    }
    (closed, open)
}

#[inline]
pub(crate) fn volume(q: &[f64]) -> f64 {
    q.iter().product()
}

#[inline]
pub(crate) fn deviation(closed: usize, open: usize, n: usize, volume: f64) -> f64 {
    let n = n as f64;
    (closed as f64 / n - volume)
        .abs()
        .max((open as f64 / n - volume).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(dim: usize, coords: &[f64]) -> PointSet {
        PointSet::new(dim, coords.to_vec()).unwrap()
    }

    #[test]
    fn full_box_has_no_deviation() {
        let ld = local_discrepancy(&set(2, &[0.0, 0.0]), &[1.0, 1.0]).unwrap();
        assert_eq!((ld.closed_count, ld.open_count), (1, 1));
        assert_eq!(ld.value, 0.0);
    }

    #[test]
    fn point_on_corner_counts_closed_only() {
        let ld = local_discrepancy(&set(2, &[0.5, 0.5]), &[0.5, 0.5]).unwrap();
        assert_eq!(ld.volume, 0.25);
        assert_eq!((ld.closed_count, ld.open_count), (1, 0));
        assert_eq!(ld.value, 0.75);
    }

    #[test]
    fn half_box_two_points() {
        let ps = set(2, &[0.25, 0.75, 0.75, 0.25]);
        let ld = local_discrepancy(&ps, &[0.5, 1.0]).unwrap();
        assert_eq!(ld.volume, 0.5);
        assert_eq!((ld.closed_count, ld.open_count), (1, 1));
        assert_eq!(ld.value, 0.0);
    }

    #[test]
    fn rejects_bad_corner() {
        let ps = set(2, &[0.5, 0.5]);
        assert!(matches!(
            local_discrepancy(&ps, &[0.5]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(local_discrepancy(&ps, &[1.5, 0.5]).is_err());
        assert!(local_discrepancy(&ps, &[0.0, 0.5]).is_ok());
        assert!(local_discrepancy(&PointSet::empty(2).unwrap(), &[1.0, 1.0]).is_err());
    }

    #[test]
    fn grid_includes_terminal_one() {
        let g = corner_grid(&set(2, &[0.5, 1.0, 0.25, 1.0, 0.5, 0.0]));
        assert_eq!(g[0], vec![0.25, 0.5, 1.0]);
        assert_eq!(g[1], vec![0.0, 1.0]);
        assert_eq!(grid_cells(&g), 6);
    }
}
