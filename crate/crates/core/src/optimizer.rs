//! Point-set refinement: jittered restarts around an initial set, each
//! followed by a derivative-free pattern search on exact star discrepancy.
//!
//! The objective is piecewise smooth with kinks wherever two coordinates
//! cross, so plain coordinate steps stall at points that are not local
//! minima. The poll set therefore also contains moves that reorder points.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::discrepancy::{exact_star_discrepancy, DEFAULT_GRID_BUDGET};
use crate::error::{Error, Result};
use crate::par;
use crate::pointset::PointSet;
use crate::seed::{self, Stream};

/// Largest number of whole-cell relocations polled per point; beyond it
/// points are relocated one axis at a time.
const MAX_CELL_MOVES: usize = 4096;

/// Smallest step while exploring; only the final polish goes further.
const COARSE_STEP: f64 = 1e-3;

/// Smallest pattern-search step.
pub const MIN_STEP: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct RefineConfig {
    pub restarts: usize,
    pub jitter_sigma: f64,
    pub max_evals_per_restart: usize,
    pub seed: u64,
    /// A move is accepted only if it lowers the objective by more than this.
    pub tolerance: f64,
    /// Random full-set poll directions tried per step size.
    pub random_directions: usize,
    /// Random single-point relocations tried after the first descent.
    pub kicks: usize,
    pub grid_budget: u128,
}

impl Default for RefineConfig {
    fn default() -> Self {
        Self {
            restarts: 25,
            jitter_sigma: 0.01,
            max_evals_per_restart: 200_000,
            seed: 0,
            tolerance: 1e-12,
            random_directions: 16,
            kicks: 1000,
            grid_budget: DEFAULT_GRID_BUDGET,
        }
    }
}

impl RefineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::invalid("restarts must be at least 1"));
        }
        if !(self.jitter_sigma >= 0.0 && self.jitter_sigma.is_finite()) {
            return Err(Error::invalid(
                "jitter_sigma must be finite and non-negative",
            ));
        }
        if self.max_evals_per_restart == 0 {
            return Err(Error::invalid("max_evals_per_restart must be positive"));
        }
        if self.tolerance.is_nan() || self.tolerance < 0.0 {
            return Err(Error::invalid("tolerance must be non-negative"));
        }
        Ok(())
    }
}

/// Refines `init`, never returning a set with larger exact discrepancy.
///
/// Each restart perturbs every coordinate with `N(0, jitter_sigma²)`, clips
/// to `[0, 1]`, then runs a pattern search: step sizes halve from `1/(4n)`;
/// at each size the search polls single coordinates, pairs of coordinates,
/// relocations of a point into cells of the others' coordinate grid, and a
/// few random directions over the whole set, accepting strict improvements.
/// Stalled searches are restarted from the incumbent with one point moved
/// at random (up to `kicks` times, within `max_evals_per_restart`), and the
/// incumbent is finally polished down to [`MIN_STEP`]. Restarts run
/// independently; ties go to the lowest restart index.
pub fn refine_point_set(init: &PointSet, cfg: &RefineConfig) -> Result<PointSet> {
    cfg.validate()?;
    let start = exact_star_discrepancy(init, cfg.grid_budget)?;
    let runs = par::map_indexed(cfg.restarts, |r| restart(init, cfg, r as u64));
    let mut best = (start, None);
    for run in runs {
        let (value, coords) = run?;
        if value < best.0 {
            best = (value, Some(coords));
        }
    }
    match best.1 {
        Some(coords) => PointSet::new(init.dim(), coords),
        None => Ok(init.clone()),
    }
}

fn restart(init: &PointSet, cfg: &RefineConfig, r: u64) -> Result<(f64, Vec<f64>)> {
    let mut jitter = seed::rng(cfg.seed, r, Stream::Jitter);
    let mut x: Vec<f64> = init.coords().to_vec();
    if cfg.jitter_sigma > 0.0 {
        let noise = Normal::new(0.0, cfg.jitter_sigma).expect("sigma checked");
        for c in &mut x {
            *c = (*c + noise.sample(&mut jitter)).clamp(0.0, 1.0);
        }
    }
    let mut search = Search {
        dim: init.dim(),
        budget: cfg.grid_budget,
        evals: 0,
        max_evals: cfg.max_evals_per_restart,
        tolerance: cfg.tolerance,
    };
    let mut rng = seed::rng(cfg.seed, r, Stream::Sample);
    let f = search.eval(&x)?;
    let mut best = search.descend(x, f, COARSE_STEP, cfg.random_directions, &mut rng)?;
    // Once the pattern search stalls, move one random point to a random
    // spot and search again, keeping the result only if it is better.
    let n = init.len();
    let d = init.dim();
    for _ in 0..cfg.kicks {
        if search.exhausted() {
            break;
        }
        let mut y = best.1.clone();
        let p = rng.random_range(0..n);
        for c in &mut y[p * d..(p + 1) * d] {
            *c = rng.random_range(0.0..=1.0);
        }
        let g = search.eval(&y)?;
        let cand = search.descend(y, g, COARSE_STEP, cfg.random_directions, &mut rng)?;
        if cand.0 < best.0 - cfg.tolerance {
            best = cand;
        }
    }
    search.max_evals = usize::MAX;
    search.descend(best.1, best.0, MIN_STEP, cfg.random_directions, &mut rng)
}

struct Search {
    dim: usize,
    budget: u128,
    evals: usize,
    max_evals: usize,
    tolerance: f64,
}

impl Search {
    /// Pattern search with halving steps from `1/(4n)` down to `min_step`.
    fn descend(
        &mut self,
        mut x: Vec<f64>,
        mut f: f64,
        min_step: f64,
        random: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<(f64, Vec<f64>)> {
        let mut step = 1.0 / (4.0 * (x.len() / self.dim) as f64);
        while step >= min_step && !self.exhausted() {
            while let Some(g) = self.poll(&mut x, f, step, random, rng)? {
                f = g;
            }
            step *= 0.5;
        }
        Ok((f, x))
    }

    fn exhausted(&self) -> bool {
        self.evals >= self.max_evals
    }

    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        self.evals += 1;
        exact_star_discrepancy(&PointSet::new(self.dim, x.to_vec())?, self.budget)
    }

    /// One pass over all poll directions at `step`; returns the new value
    /// if any move was accepted.
    fn poll(
        &mut self,
        x: &mut [f64],
        mut f: f64,
        step: f64,
        random: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<Option<f64>> {
        let d = self.dim;
        let n = x.len() / d;
        let mut improved = false;
        let mut trial = x.to_vec();
        let mut try_move = |this: &mut Self, x: &mut [f64], f: &mut f64, delta: &[(usize, f64)]| {
            trial.copy_from_slice(x);
            let mut changed = false;
            for &(i, dv) in delta {
                let v = (trial[i] + dv).clamp(0.0, 1.0);
                changed |= v != trial[i];
                trial[i] = v;
            }
            if !changed || this.exhausted() {
                return Ok::<bool, Error>(false);
            }
            let g = this.eval(&trial)?;
            if g < *f - this.tolerance {
                x.copy_from_slice(&trial);
                *f = g;
                return Ok(true);
            }
            Ok(false)
        };

        for i in 0..n * d {
            for s in [step, -step] {
                if try_move(self, x, &mut f, &[(i, s)])? {
                    improved = true;
                    break;
                }
            }
        }
        for a in 0..n * d {
            for b in a + 1..n * d {
                for (sa, sb) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                    if try_move(self, x, &mut f, &[(a, sa * step), (b, sb * step)])? {
                        improved = true;
                        break;
                    }
                }
            }
        }
        // Relocating a point into the middle of a cell of the grid formed
        // by the other points' coordinates reorders the set, which small
        // steps cannot do across a kink.
        let cells = (n + 1).checked_pow(d as u32).unwrap_or(usize::MAX);
        for p in 0..n {
            let mids: Vec<Vec<f64>> = (0..d)
                .map(|j| {
                    let mut c: Vec<f64> = (0..n)
                        .filter(|&q| q != p)
                        .map(|q| x[q * d + j])
                        .chain([0.0, 1.0])
                        .collect();
                    c.sort_by(f64::total_cmp);
                    c.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
                })
                .collect();
            if cells <= MAX_CELL_MOVES {
                for cell in 0..cells {
                    let mut rest = cell;
                    let mv: Vec<(usize, f64)> = (0..d)
                        .map(|j| {
                            let k = rest % mids[j].len();
                            rest /= mids[j].len();
                            (p * d + j, mids[j][k] - x[p * d + j])
                        })
                        .collect();
                    improved |= try_move(self, x, &mut f, &mv)?;
                }
            } else {
                for (j, m) in mids.iter().enumerate() {
                    for &t in m {
                        improved |= try_move(self, x, &mut f, &[(p * d + j, t - x[p * d + j])])?;
                    }
                }
            }
        }
        for _ in 0..random {
            let mv: Vec<(usize, f64)> = (0..n * d)
                .map(|i| (i, step * rng.random_range(-1.0..=1.0)))
                .collect();
            improved |= try_move(self, x, &mut f, &mv)?;
        }
        Ok(improved.then_some(f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::fibonacci_lattice;

    fn quick() -> RefineConfig {
        RefineConfig {
            restarts: 4,
            ..RefineConfig::default()
        }
    }

    #[test]
    fn single_point_reaches_golden_optimum() {
        let init = PointSet::new(2, vec![0.5, 0.5]).unwrap();
        let out = refine_point_set(&init, &quick()).unwrap();
        let d = exact_star_discrepancy(&out, DEFAULT_GRID_BUDGET).unwrap();
        assert!(d <= 0.62, "{d}");
    }

    #[test]
    fn never_worsens_and_is_deterministic() {
        let init = fibonacci_lattice(5).unwrap();
        let cfg = RefineConfig {
            restarts: 2,
            max_evals_per_restart: 50,
            ..RefineConfig::default()
        };
        let a = refine_point_set(&init, &cfg).unwrap();
        let b = refine_point_set(&init, &cfg).unwrap();
        assert_eq!(a, b);
        let before = exact_star_discrepancy(&init, DEFAULT_GRID_BUDGET).unwrap();
        let after = exact_star_discrepancy(&a, DEFAULT_GRID_BUDGET).unwrap();
        assert!(after <= before);
        assert!(a.coords().iter().all(|c| (0.0..=1.0).contains(c)));
    }

    #[test]
    fn rejects_bad_config() {
        let init = fibonacci_lattice(2).unwrap();
        let cfg = RefineConfig {
            restarts: 0,
            ..RefineConfig::default()
        };
        assert!(refine_point_set(&init, &cfg).is_err());
    }
}
