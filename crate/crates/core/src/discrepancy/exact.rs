use super::{corner_grid, deviation, grid_cells};
use crate::error::{Error, Result};
use crate::par;
use crate::pointset::PointSet;

/// Largest corner grid the exact evaluator accepts by default.
pub const DEFAULT_GRID_BUDGET: u128 = 50_000_000;

/// Grids smaller than this are swept on the calling thread.
const PARALLEL_CELLS: u128 = 1 << 14;

/// Exact star discrepancy by enumeration of the corner grid.
///
/// Corners over the first `d − 1` axes are enumerated; for each, points are
/// histogrammed by their last-axis grid slot and a single prefix sweep over
/// the last axis yields closed and open counts at every corner. Cost is
/// `O(|G_1|⋯|G_{d−1}| · (N·d + |G_d|))`, i.e. `O(N²)` in two dimensions.
/// Slabs along the first axis are evaluated in parallel.
pub fn exact_star_discrepancy(ps: &PointSet, budget: u128) -> Result<f64> {
    if ps.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let grid = corner_grid(ps);
    let cells = grid_cells(&grid);
    if cells > budget {
        return Err(Error::GridTooLarge { cells, budget });
    }

    let d = ps.dim();
    let last = &grid[d - 1];
    let slot: Vec<usize> = ps
        .points()
        .map(|p| last.partition_point(|&g| g < p[d - 1]))
        .collect();

    let outer = &grid[..d - 1];
    let slabs = if d == 1 { 1 } else { outer[0].len() };
    let slab = |first: usize| {
        let mut sweep = Sweep::new(ps, last, &slot);
        let mut corner = vec![0.0; d - 1];
        let mut idx = vec![0usize; d - 1];
        if d > 1 {
            idx[0] = first;
        }
        let mut best = 0.0f64;
        loop {
            for (j, c) in corner.iter_mut().enumerate() {
                *c = outer[j][idx[j]];
            }
            best = best.max(sweep.run(&corner));
            // Odometer over axes 1..d-1; axis 0 is fixed to this slab.
            let mut j = d - 1;
            loop {
                if j <= 1 {
                    return best;
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < outer[j].len() {
                    break;
                }
                idx[j] = 0;
            }
        }
    };
    let maxima = if cells >= PARALLEL_CELLS {
        par::map_indexed(slabs, slab)
    } else {
        (0..slabs).map(slab).collect()
    };
    Ok(maxima.into_iter().fold(0.0, f64::max))
}

struct Sweep<'a> {
    ps: &'a PointSet,
    last: &'a [f64],
    slot: &'a [usize],
    closed: Vec<u32>,
    open: Vec<u32>,
}

impl<'a> Sweep<'a> {
    fn new(ps: &'a PointSet, last: &'a [f64], slot: &'a [usize]) -> Self {
        Self {
            ps,
            last,
            slot,
            closed: vec![0; last.len()],
            open: vec![0; last.len()],
        }
    }

    /// Maximum local discrepancy over corners `(outer…, g)` for `g` in the
    /// last-axis grid.
    fn run(&mut self, outer: &[f64]) -> f64 {
        self.closed.iter_mut().for_each(|c| *c = 0);
        self.open.iter_mut().for_each(|c| *c = 0);
        for (p, &s) in self.ps.points().zip(self.slot) {
            let head = &p[..outer.len()];
            if head.iter().zip(outer).all(|(x, q)| x <= q) {
                self.closed[s] += 1;
                if head.iter().zip(outer).all(|(x, q)| x < q) {
                    self.open[s] += 1;
                }
            }
        }
        let n = self.ps.len();
        let base: f64 = outer.iter().product();
        let mut closed = 0usize;
        let mut open = 0usize;
        let mut best = 0.0f64;
        for (k, &g) in self.last.iter().enumerate() {
            closed += self.closed[k] as usize;
            // Points in slot k sit exactly on this face and are excluded.
            let vol = if outer.is_empty() { g } else { base * g };
            best = best.max(deviation(closed, open, n, vol));
            open += self.open[k] as usize;
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::fibonacci_lattice;

    #[test]
    fn point_at_origin_is_maximal() {
        let ps = PointSet::new(2, vec![0.0, 0.0]).unwrap();
        assert_eq!(
            exact_star_discrepancy(&ps, DEFAULT_GRID_BUDGET).unwrap(),
            1.0
        );
    }

    #[test]
    fn golden_single_point_is_optimal() {
        let a = (5f64.sqrt() - 1.0) / 2.0;
        let ps = PointSet::new(2, vec![a, a]).unwrap();
        let d = exact_star_discrepancy(&ps, DEFAULT_GRID_BUDGET).unwrap();
        // max(a, 1 - a²) with a² = 1 - a.
        assert!((d - a).abs() < 1e-15, "{d}");
    }

    #[test]
    fn one_dimensional_matches_closed_form() {
        // Centred points i/n + 1/(2n) have D* = 1/(2n).
        let n = 8;
        let ps = PointSet::new(1, (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect()).unwrap();
        let d = exact_star_discrepancy(&ps, DEFAULT_GRID_BUDGET).unwrap();
        assert!((d - 1.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn refuses_over_budget_and_empty() {
        let ps = fibonacci_lattice(16).unwrap();
        assert!(matches!(
            exact_star_discrepancy(&ps, 100),
            Err(Error::GridTooLarge { cells: 289, .. })
        ));
        assert!(matches!(
            exact_star_discrepancy(&PointSet::empty(2).unwrap(), 100),
            Err(Error::EmptyPointSet)
        ));
    }
}
