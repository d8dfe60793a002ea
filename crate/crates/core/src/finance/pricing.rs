//! Uniform blocks to GBM paths, payoffs, and sample-mean estimates.

use crate::error::{Error, Result};
use crate::finance::lsm;
use crate::finance::normal::clamped_quantile;
use crate::finance::scenario::{OptionKind, OptionScenario};
use crate::par;
use crate::pointset::PointSet;

/// Simulated prices `S_1..S_n_steps` per path, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PathMatrix {
    n_paths: usize,
    n_steps: usize,
    prices: Vec<f64>,
}

impl PathMatrix {
    pub fn n_paths(&self) -> usize {
        self.n_paths
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn path(&self, i: usize) -> &[f64] {
        &self.prices[i * self.n_steps..(i + 1) * self.n_steps]
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }
}

/// Scenario constants precomputed once per pricing call.
#[derive(Debug, Clone)]
pub(crate) struct Model {
    pub kind: OptionKind,
    pub dim: usize,
    pub s0: f64,
    pub k: f64,
    pub r: f64,
    pub dt: f64,
    pub discount: f64,
    pub barrier: f64,
    /// Per step (paths) or per asset (basket) log drift.
    drift: Vec<f64>,
    /// Per step (paths) or per asset (basket) diffusion scale.
    vol: Vec<f64>,
    /// Lower Cholesky factor of the basket correlation, row-major.
    chol: Vec<f64>,
    pub n_exercise: usize,
}

impl Model {
    pub fn new(scenario: &OptionScenario) -> Result<Self> {
        scenario.validate()?;
        let dim = scenario.dim();
        let sigmas = scenario.sigmas()?;
        let (t, r) = (scenario.t, scenario.r);
        let dt = t / dim as f64;
        let (drift, vol, chol) = if scenario.kind == OptionKind::Basket {
            let drift = sigmas.iter().map(|s| (r - 0.5 * s * s) * t).collect();
            let vol = sigmas.iter().map(|s| s * t.sqrt()).collect();
            let rho = scenario.rho.unwrap_or(0.0);
            (drift, vol, cholesky(&equicorrelation(dim, rho), dim)?)
        } else {
            let drift = sigmas.iter().map(|s| (r - 0.5 * s * s) * dt).collect();
            let vol = sigmas.iter().map(|s| s * dt.sqrt()).collect();
            (drift, vol, Vec::new())
        };
        Ok(Self {
            kind: scenario.kind,
            dim,
            s0: scenario.s0,
            k: scenario.k.unwrap_or(0.0),
            r,
            dt,
            discount: (-r * t).exp(),
            barrier: scenario.barrier_level.unwrap_or(f64::NEG_INFINITY),
            drift,
            vol,
            chol,
            n_exercise: scenario.n_exercise.unwrap_or(1),
        })
    }

    /// GBM path `S_1..S_dim` driven by one row of uniforms.
    #[inline]
    pub fn fill_path(&self, u: &[f64], out: &mut [f64]) {
        let mut s = self.s0;
        for (k, (o, &x)) in out.iter_mut().zip(u).enumerate() {
            s *= (self.drift[k] + self.vol[k] * clamped_quantile(x)).exp();
            *o = s;
        }
    }

    /// Correlated terminal basket prices from one row of uniforms.
    #[inline]
    pub fn fill_terminal(&self, u: &[f64], z: &mut [f64], out: &mut [f64]) {
        for (zi, &x) in z.iter_mut().zip(u) {
            *zi = clamped_quantile(x);
        }
        let d = self.dim;
        for i in 0..d {
            let row = &self.chol[i * d..i * d + i + 1];
            let w: f64 = row.iter().zip(&z[..=i]).map(|(l, z)| l * z).sum();
            out[i] = self.s0 * (self.drift[i] + self.vol[i] * w).exp();
        }
    }

    /// Discounted payoff from a path (or terminal basket prices).
    #[inline]
    pub fn payoff(&self, data: &[f64]) -> f64 {
        let last = data[data.len() - 1];
        let value = match self.kind {
            OptionKind::Asian | OptionKind::Basket => {
                let mean = data.iter().sum::<f64>() / data.len() as f64;
                (mean - self.k).max(0.0)
            }
            OptionKind::Lookback => {
                let min = data.iter().fold(self.s0, |m, &s| m.min(s));
                last - min
            }
            OptionKind::Barrier => {
                if data.iter().any(|&s| s <= self.barrier) {
                    0.0
                } else {
                    (last - self.k).max(0.0)
                }
            }
            // European put at maturity; early exercise needs the whole sample.
            OptionKind::Bermudan => (self.k - last).max(0.0),
        };
        self.discount * value
    }

    /// Sum of discounted payoffs over the rows of `coords`.
    pub fn payoff_sum(&self, coords: &[f64]) -> f64 {
        let d = self.dim;
        let mut a = vec![0.0; d];
        let mut b = vec![0.0; d];
        par::compensated_sum(coords.chunks_exact(d).map(|u| {
            if self.kind == OptionKind::Basket {
                self.fill_terminal(u, &mut a, &mut b);
                self.payoff(&b)
            } else {
                self.fill_path(u, &mut a);
                self.payoff(&a)
            }
        }))
    }

    /// Sample-mean estimate over the rows of `coords`; LSM for Bermudans.
    pub fn estimate(&self, coords: &[f64]) -> Result<f64> {
        let n = coords.len() / self.dim;
        if n == 0 {
            return Err(Error::EmptyPointSet);
        }
        if self.kind == OptionKind::Bermudan {
            return lsm::price(self, coords);
        }
        let d = self.dim;
        let sums = par::map_indexed(n.div_ceil(CHUNK), |c| {
            let rows = c * CHUNK..((c + 1) * CHUNK).min(n);
            self.payoff_sum(&coords[rows.start * d..rows.end * d])
        });
        Ok(par::compensated_sum(sums) / n as f64)
    }
}

/// Rows per parallel work item.
pub(crate) const CHUNK: usize = 1024;

fn equicorrelation(d: usize, rho: f64) -> Vec<f64> {
    (0..d * d)
        .map(|i| if i / d == i % d { 1.0 } else { rho })
        .collect()
}

/// Lower Cholesky factor of a symmetric positive semidefinite matrix.
/// Zero pivots (within rounding) leave their column below the diagonal zero.
pub fn cholesky(a: &[f64], d: usize) -> Result<Vec<f64>> {
    if a.len() != d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            actual: a.len(),
        });
    }
    let mut l = vec![0.0; d * d];
    for j in 0..d {
        let s: f64 = (0..j).map(|p| l[j * d + p] * l[j * d + p]).sum();
        let pivot = a[j * d + j] - s;
        if pivot < -1e-10 {
            return Err(Error::invalid(
                "correlation matrix is not positive semidefinite",
            ));
        }
        let ljj = pivot.max(0.0).sqrt();
        l[j * d + j] = ljj;
        for i in j + 1..d {
            let s: f64 = (0..j).map(|p| l[i * d + p] * l[j * d + p]).sum();
            l[i * d + j] = if ljj > 1e-12 {
                (a[i * d + j] - s) / ljj
            } else {
                0.0
            };
        }
    }
    Ok(l)
}

/// GBM paths for a path option; row `i` of `u` drives path `i`, column `k`
/// drives step `k + 1`.
pub fn gbm_paths(u: &PointSet, scenario: &OptionScenario) -> Result<PathMatrix> {
    if !scenario.kind.is_path_option() {
        return Err(Error::invalid(format!(
            "scenario `{}` is a basket, not a path option",
            scenario.name
        )));
    }
    let model = Model::new(scenario)?;
    check_dim(u, &model)?;
    let d = model.dim;
    let mut prices = vec![0.0; u.coords().len()];
    for (row, out) in u.coords().chunks_exact(d).zip(prices.chunks_exact_mut(d)) {
        model.fill_path(row, out);
    }
    Ok(PathMatrix {
        n_paths: u.len(),
        n_steps: d,
        prices,
    })
}

/// Terminal basket prices `S_i(T)` driven by one row of uniforms.
pub fn basket_terminal_prices(u: &[f64], scenario: &OptionScenario) -> Result<Vec<f64>> {
    if scenario.kind != OptionKind::Basket {
        return Err(Error::invalid(format!(
            "scenario `{}` is not a basket",
            scenario.name
        )));
    }
    let model = Model::new(scenario)?;
    if u.len() != model.dim {
        return Err(Error::DimensionMismatch {
            expected: model.dim,
            actual: u.len(),
        });
    }
    let mut z = vec![0.0; model.dim];
    let mut out = vec![0.0; model.dim];
    model.fill_terminal(u, &mut z, &mut out);
    Ok(out)
}

/// Discounted payoff of one path (`S_1..S_n_steps`) or, for baskets, one
/// vector of terminal asset prices. Bermudans are priced only as a sample
/// through [`crate::finance::bermudan_estimate`].
pub fn discounted_payoff(scenario: &OptionScenario, data: &[f64]) -> Result<f64> {
    if scenario.kind == OptionKind::Bermudan {
        return Err(Error::invalid(
            "a Bermudan payoff depends on the exercise policy; use bermudan_estimate",
        ));
    }
    let model = Model::new(scenario)?;
    if data.len() != model.dim {
        return Err(Error::DimensionMismatch {
            expected: model.dim,
            actual: data.len(),
        });
    }
    Ok(model.payoff(data))
}

/// Mean discounted payoff over the points (LSM for Bermudans).
pub fn estimate_price(points: &PointSet, scenario: &OptionScenario) -> Result<f64> {
    let model = Model::new(scenario)?;
    check_dim(points, &model)?;
    model.estimate(points.coords())
}

fn check_dim(u: &PointSet, model: &Model) -> Result<()> {
    if u.dim() != model.dim {
        return Err(Error::DimensionMismatch {
            expected: model.dim,
            actual: u.dim(),
        });
    }
    Ok(())
}
