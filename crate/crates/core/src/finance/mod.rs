//! Option pricing on uniform point sets: GBM paths, payoffs for Asian,
//! lookback, barrier, basket and Bermudan options, and randomized-QMC
//! reference prices.

mod lsm;
mod normal;
mod pricing;
mod scenario;

pub use lsm::{bermudan_estimate, MIN_PATHS};
pub use normal::{clamped_quantile, inv_norm_cdf, norm_cdf};
pub use pricing::{
    basket_terminal_prices, cholesky, discounted_payoff, estimate_price, gbm_paths, PathMatrix,
};
pub use scenario::{
    catalog, load_scenario, parse_scenario, scenario, scenario_names, OptionKind, OptionScenario,
    Volatility,
};

use crate::error::{Error, Result};
use crate::par;
use crate::seed::{self, Stream};
use crate::sobol::{
    load_direction_table, DirectionSource, LmsShiftRandomization, ShiftKind, SobolGenerator,
};
use pricing::{Model, CHUNK};

/// Largest supported `log2n` for [`reference_price`].
pub const MAX_REFERENCE_LOG2N: u32 = 21;

/// Validated constants for pricing `scenario` repeatedly.
pub(crate) fn pricing_model(scenario: &OptionScenario) -> Result<Model> {
    Model::new(scenario)
}

/// Mean and standard error of `reps` independently scrambled and shifted
/// Joe–Kuo Sobol' estimates with `2^log2n` points each.
pub fn reference_price(
    scenario: &OptionScenario,
    log2n: u32,
    reps: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if log2n > MAX_REFERENCE_LOG2N {
        return Err(Error::invalid(format!(
            "log2n must be at most {MAX_REFERENCE_LOG2N}, got {log2n}"
        )));
    }
    if reps < 2 {
        return Err(Error::invalid(
            "reference pricing needs at least 2 replicates",
        ));
    }
    let model = Model::new(scenario)?;
    let table = load_direction_table(&DirectionSource::JoeKuo, model.dim)?;
    let n = 1usize << log2n;
    let estimates = (0..reps)
        .map(|rep| {
            let rand = LmsShiftRandomization::new(
                seed::derive(seed, rep as u64, Stream::Replicate),
                model.dim,
                table.bits(),
                ShiftKind::Digital,
            );
            let gen = SobolGenerator::randomized(&table, model.dim, &rand)?;
            streamed_estimate(&model, &gen, n)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(mean_and_stderr(&estimates))
}

/// Estimate over the first `n` points of `gen` without materializing them,
/// except for Bermudans whose regression needs the whole sample.
pub(crate) fn streamed_estimate(model: &Model, gen: &SobolGenerator, n: usize) -> Result<f64> {
    let d = model.dim;
    if model.kind == OptionKind::Bermudan {
        let mut coords = vec![0.0; n * d];
        gen.fill(0, n, &mut coords);
        return model.estimate(&coords);
    }
    // Same chunking as `Model::estimate`, so both give identical sums.
    let sums = par::map_indexed(n.div_ceil(CHUNK), |c| {
        let start = c * CHUNK;
        let count = CHUNK.min(n - start);
        let mut coords = vec![0.0; count * d];
        gen.fill(start as u64, count, &mut coords);
        model.payoff_sum(&coords)
    });
    Ok(par::compensated_sum(sums) / n as f64)
}

/// Sample mean and standard error of the mean.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    let mean = par::compensated_sum(values.iter().copied()) / m;
    let ss = par::compensated_sum(values.iter().map(|v| (v - mean) * (v - mean)));
    (mean, (ss / (m - 1.0)).sqrt() / m.sqrt())
}
