//! Threshold-accepting search for a lower bound on the star discrepancy.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{box_counts, corner_grid, deviation, volume};
use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::seed::{self, Stream};

#[derive(Debug, Clone, PartialEq)]
pub struct TaConfig {
    pub iterations: usize,
    pub initial_threshold: f64,
    /// Threshold multiplier applied after every iteration.
    pub cooling_factor: f64,
    /// The walk jumps back to the best corner seen, with the threshold reset,
    /// every this many iterations.
    pub restart_every: usize,
    pub seed: u64,
}

impl Default for TaConfig {
    fn default() -> Self {
        Self {
            iterations: 100_000,
            initial_threshold: 0.01,
            cooling_factor: 0.995,
            restart_every: 10_000,
            seed: 0,
        }
    }
}

impl TaConfig {
    fn validate(&self) -> Result<()> {
        if self.iterations == 0 || self.restart_every == 0 {
            return Err(Error::invalid("TA iterations must be positive"));
        }
        if !(self.cooling_factor > 0.0 && self.cooling_factor < 1.0) {
            return Err(Error::invalid("TA cooling factor must lie in (0, 1)"));
        }
        if self.initial_threshold.is_nan() || self.initial_threshold <= 0.0 {
            return Err(Error::invalid("TA threshold must be positive"));
        }
        Ok(())
    }
}

/// Best local discrepancy found by a threshold-accepting walk over the corner
/// grid. Always a lower bound on the exact value; deterministic in `cfg.seed`.
///
/// A move shifts a random subset of coordinates of the current corner by a
/// random number of grid steps. The step radius starts at the full axis grid
/// and narrows to a single step (adjacent grid value) over each restart
/// epoch, so early moves explore and late moves polish. Each candidate is
/// also snapped down onto the points it contains and up against the points
/// that bound it, and the best of the three is the one considered.
pub fn ta_star_discrepancy(ps: &PointSet, cfg: &TaConfig) -> Result<f64> {
    cfg.validate()?;
    if ps.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let grid = corner_grid(ps);
    let d = ps.dim();
    let mut rng = seed::rng(cfg.seed, 0, Stream::Threshold);

    let mut corner = vec![0.0; d];
    let eval = |idx: &[usize], corner: &mut [f64]| {
        for (j, c) in corner.iter_mut().enumerate() {
            *c = grid[j][idx[j]];
        }
        let (closed, open) = box_counts(ps, corner);
        deviation(closed, open, ps.len(), volume(corner))
    };

    let mut current: Vec<usize> = grid.iter().map(|g| rng.random_range(0..g.len())).collect();
    let mut current_value = eval(&current, &mut corner);
    let mut best = current.clone();
    let mut best_value = current_value;
    let mut threshold = cfg.initial_threshold;
    let mut candidate = current.clone();
    let mut snapped = current.clone();

    for it in 0..cfg.iterations {
        let epoch_pos = it % cfg.restart_every;
        if epoch_pos == 0 && it > 0 {
            current.clone_from(&best);
            current_value = best_value;
            threshold = cfg.initial_threshold;
        }
        let remaining = 1.0 - epoch_pos as f64 / cfg.restart_every as f64;
        candidate.clone_from(&current);
        let moved = rng.random_range(1..=d);
        let mut changed = false;
        for axis in rand::seq::index::sample(&mut rng, d, moved) {
            let len = grid[axis].len();
            if len < 2 {
                continue;
            }
            let radius = ((len - 1) as f64 * remaining).ceil().max(1.0) as usize;
            let step = rng.random_range(1..=radius);
            let from = current[axis];
            let to = if rng.random_bool(0.5) {
                from.saturating_sub(step)
            } else {
                (from + step).min(len - 1)
            };
            changed |= to != from;
            candidate[axis] = to;
        }
        if !changed {
            continue;
        }
        let mut value = eval(&candidate, &mut corner);
        for up in [false, true] {
            snapped.clone_from(&candidate);
            if up {
                snap_up(ps, &grid, &mut snapped, &mut rng);
            } else {
                snap_down(ps, &grid, &mut snapped);
            }
            if snapped != candidate {
                let v = eval(&snapped, &mut corner);
                if v > value {
                    value = v;
                    std::mem::swap(&mut candidate, &mut snapped);
                }
            }
        }
        if value >= current_value - threshold {
            std::mem::swap(&mut current, &mut candidate);
            current_value = value;
            if value > best_value {
                best_value = value;
                best.clone_from(&current);
            }
        }
        threshold *= cfg.cooling_factor;
    }
    Ok(best_value)
}

/// Shrinks each coordinate of the corner to the largest coordinate of the
/// points it contains (or the first grid value if it contains none). The
/// closed count is unchanged and the volume can only drop, so the
/// over-coverage term can only grow.
fn snap_down(ps: &PointSet, grid: &[Vec<f64>], idx: &mut [usize]) {
    let q: Vec<f64> = idx.iter().zip(grid).map(|(&i, g)| g[i]).collect();
    let mut top = vec![f64::NEG_INFINITY; q.len()];
    for p in ps
        .points()
        .filter(|p| p.iter().zip(&q).all(|(x, c)| x <= c))
    {
        for (t, &x) in top.iter_mut().zip(p) {
            *t = t.max(x);
        }
    }
    for ((i, g), t) in idx.iter_mut().zip(grid).zip(top) {
        *i = g.partition_point(|&v| v < t);
    }
}

/// Grows the corner one axis at a time, in random order, as far as it can
/// go without a new point entering the open box. The open count is
/// unchanged and the volume can only grow, so the under-coverage term can
/// only grow.
fn snap_up(ps: &PointSet, grid: &[Vec<f64>], idx: &mut [usize], rng: &mut impl Rng) {
    let d = idx.len();
    let mut q: Vec<f64> = idx.iter().zip(grid).map(|(&i, g)| g[i]).collect();
    let mut axes: Vec<usize> = (0..d).collect();
    axes.shuffle(rng);
    for j in axes {
        // Points outside the open box only because of axis j block it there.
        let limit = ps
            .points()
            .filter(|p| p[j] >= q[j] && (0..d).all(|i| i == j || p[i] < q[i]))
            .map(|p| p[j])
            .fold(1.0f64, f64::min);
        q[j] = limit;
        idx[j] = grid[j].partition_point(|&v| v < limit);
    }
}
