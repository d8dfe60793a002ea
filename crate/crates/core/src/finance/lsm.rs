//! Least-squares Monte Carlo for the Bermudan put.

use crate::error::{Error, Result};
use crate::finance::pricing::Model;
use crate::finance::scenario::{OptionKind, OptionScenario};
use crate::par;
use crate::pointset::PointSet;

/// Fewest paths accepted by the regression.
pub const MIN_PATHS: usize = 64;

/// Bermudan put price from the rows of `u`: exercise dates split the step
/// grid into `n_exercise` equal parts, continuation values are regressed on
/// `{1, S, S²}` over in-the-money paths.
pub fn bermudan_estimate(scenario: &OptionScenario, u: &PointSet) -> Result<f64> {
    if scenario.kind != OptionKind::Bermudan {
        return Err(Error::invalid(format!(
            "scenario `{}` is not a Bermudan",
            scenario.name
        )));
    }
    let model = Model::new(scenario)?;
    if u.dim() != model.dim {
        return Err(Error::DimensionMismatch {
            expected: model.dim,
            actual: u.dim(),
        });
    }
    price(&model, u.coords())
}

pub(crate) fn price(model: &Model, coords: &[f64]) -> Result<f64> {
    let d = model.dim;
    let n = coords.len() / d;
    if n < MIN_PATHS {
        return Err(Error::invalid(format!(
            "LSM needs at least {MIN_PATHS} paths, got {n}"
        )));
    }
    let mut paths = vec![0.0; coords.len()];
    for (u, out) in coords.chunks_exact(d).zip(paths.chunks_exact_mut(d)) {
        model.fill_path(u, out);
    }
    let k = model.k;
    let scale = if k > 0.0 { k } else { model.s0 };
    let dates: Vec<usize> = (1..=model.n_exercise)
        .map(|e| e * d / model.n_exercise)
        .collect();

    // Realized cashflow and the step at which it is paid.
    let mut cash: Vec<f64> = paths
        .chunks_exact(d)
        .map(|p| (k - p[d - 1]).max(0.0))
        .collect();
    let mut paid = vec![d; n];

    let mut itm = Vec::with_capacity(n);
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for &step in dates.iter().rev().skip(1) {
        itm.clear();
        xs.clear();
        ys.clear();
        for i in 0..n {
            let s = paths[i * d + step - 1];
            if k - s > 0.0 {
                itm.push(i);
                xs.push(s / scale);
                ys.push(cash[i] * (-model.r * (paid[i] - step) as f64 * model.dt).exp());
            }
        }
        if itm.is_empty() {
            continue;
        }
        let fit = Quadratic::fit(&xs, &ys);
        for (&i, &x) in itm.iter().zip(&xs) {
            let intrinsic = k - x * scale;
            if intrinsic >= fit.eval(x) {
                cash[i] = intrinsic;
                paid[i] = step;
            }
        }
    }
    let total = par::compensated_sum(
        cash.iter()
            .zip(&paid)
            .map(|(&c, &p)| c * (-model.r * p as f64 * model.dt).exp()),
    );
    Ok(total / n as f64)
}

/// Least-squares fit `c0 + c1 x + c2 x²`, or the sample mean of `y` when
/// the normal equations are singular.
#[derive(Debug, Clone, Copy)]
struct Quadratic([f64; 3]);

impl Quadratic {
    fn fit(x: &[f64], y: &[f64]) -> Self {
        let mean = par::compensated_sum(y.iter().copied()) / y.len() as f64;
        let fallback = Quadratic([mean, 0.0, 0.0]);
        if x.len() < 3 {
            return fallback;
        }
        let mut m = [[0.0f64; 4]; 3];
        for (&xi, &yi) in x.iter().zip(y) {
            let b = [1.0, xi, xi * xi];
            for r in 0..3 {
                for c in 0..3 {
                    m[r][c] += b[r] * b[c];
                }
                m[r][3] += b[r] * yi;
            }
        }
        match solve3(m) {
            Some(c) => Quadratic(c),
            None => fallback,
        }
    }

    fn eval(&self, x: f64) -> f64 {
        self.0[0] + x * (self.0[1] + x * self.0[2])
    }
}

/// Gaussian elimination with partial pivoting on an augmented 3x4 system.
fn solve3(mut m: [[f64; 4]; 3]) -> Option<[f64; 3]> {
    let scale = (0..3).map(|i| m[i][i].abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return None;
    }
    for col in 0..3 {
        let p = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[p][col].abs() <= 1e-12 * scale {
            return None;
        }
        m.swap(col, p);
        for r in col + 1..3 {
            let f = m[r][col] / m[col][col];
            let pivot = m[col];
            for (v, &q) in m[r][col..].iter_mut().zip(&pivot[col..]) {
                *v -= f * q;
            }
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        let s: f64 = (r + 1..3).map(|c| m[r][c] * x[c]).sum();
        x[r] = (m[r][3] - s) / m[r][r];
    }
    Some(x)
}
