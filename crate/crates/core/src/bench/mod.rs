//! Paired randomized-QMC MSE benchmark across direction tables.
//!
//! Every method sees the same randomization seeds, so per-seed squared
//! errors can be compared with a paired signed-rank test.

mod stats;

pub use stats::{
    bh_adjust, mse_decompose, wilcoxon_one_sided, wilcoxon_signed_rank, Alternative, MseParts,
    EXACT_MAX,
};

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::finance::{reference_price, OptionKind, OptionScenario, MIN_PATHS};
use crate::par;
use crate::seed::{self, Stream};
use crate::sobol::{
    load_direction_table, DirectionSource, DirectionTable, LmsShiftRandomization, ShiftKind,
    SobolGenerator,
};

pub const CSV_HEADER: &str = "scenario,n,method,reps,bias_sq,variance,mse,p_raw,p_adj,master_seed";

/// Settings used to compute truths that are not built in.
pub const TRUTH_LOG2N: u32 = 17;
pub const TRUTH_REPS: usize = 100;
pub const TRUTH_SEED: u64 = 0x7472_7574_6800_0001;

/// A named direction table under test.
#[derive(Debug, Clone)]
pub struct Method {
    pub label: String,
    pub table: DirectionTable,
}

impl Method {
    pub fn new(label: impl Into<String>, table: DirectionTable) -> Self {
        Self {
            label: label.into(),
            table,
        }
    }

    /// Loads `source` for `dim` dimensions; files are labelled by stem.
    pub fn load(source: &DirectionSource, dim: usize) -> Result<Self> {
        let label = match source {
            DirectionSource::File(p) => p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| source.label()),
            _ => source.label(),
        };
        Ok(Self::new(label, load_direction_table(source, dim)?))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRecord {
    pub scenario: String,
    pub n: usize,
    pub method: String,
    pub reps: usize,
    pub bias_sq: f64,
    pub variance: f64,
    pub mse: f64,
    /// Paired test against the first method; absent for the first method.
    pub p_raw: Option<f64>,
    pub p_adj: Option<f64>,
    pub master_seed: u64,
}

/// Seed of randomization `rep`, shared by every method and sample size.
pub fn replicate_seed(master_seed: u64, rep: usize) -> u64 {
    seed::derive(master_seed, rep as u64, Stream::Replicate)
}

/// Per-replicate estimates of `scenario` with `n` points of `table`, each
/// replicate scrambled and shifted with [`replicate_seed`]. Identical to
/// `estimate_price(randomized_sobol_points(table, n, dim, seed))`.
pub fn replicate_estimates(
    scenario: &OptionScenario,
    table: &DirectionTable,
    n: usize,
    reps: usize,
    master_seed: u64,
) -> Result<Vec<f64>> {
    let model = crate::finance::pricing_model(scenario)?;
    let dim = scenario.dim();
    if n as u64 > 1u64 << table.bits() {
        return Err(Error::invalid(format!(
            "n = {n} exceeds 2^{}",
            table.bits()
        )));
    }
    par::map_indexed(reps, |rep| {
        let rand = LmsShiftRandomization::new(
            replicate_seed(master_seed, rep),
            dim,
            table.bits(),
            ShiftKind::Digital,
        );
        let gen = SobolGenerator::randomized(table, dim, &rand)?;
        crate::finance::streamed_estimate(&model, &gen, n)
    })
    .into_iter()
    .collect()
}

/// Runs the paired benchmark. The first method is the baseline; every
/// other method gets a one-sided signed-rank p-value on per-seed squared
/// errors (alternative: its errors are smaller), and all p-values of the
/// run are adjusted together with Benjamini–Hochberg.
///
/// Each scenario must carry a truth (see [`resolve_truths`]).
pub fn run_mse_benchmark(
    scenarios: &[OptionScenario],
    n_list: &[usize],
    methods: &[Method],
    reps: usize,
    master_seed: u64,
) -> Result<Vec<BenchmarkRecord>> {
    if scenarios.is_empty() || n_list.is_empty() || methods.is_empty() {
        return Err(Error::invalid(
            "scenarios, sample sizes and methods must be non-empty",
        ));
    }
    let min_reps = if methods.len() > 1 { 5 } else { 2 };
    if reps < min_reps {
        return Err(Error::invalid(format!(
            "need at least {min_reps} replicates"
        )));
    }
    for (i, m) in methods.iter().enumerate() {
        if methods[..i].iter().any(|o| o.label == m.label) {
            return Err(Error::invalid(format!("duplicate method `{}`", m.label)));
        }
    }
    let mut records = Vec::new();
    for sc in scenarios {
        let truth = sc
            .truth()
            .ok_or_else(|| Error::invalid(format!("scenario `{}` has no truth value", sc.name)))?;
        for &n in n_list {
            if n == 0 || (sc.kind == OptionKind::Bermudan && n < MIN_PATHS) {
                return Err(Error::invalid(format!(
                    "sample size {n} is too small for `{}`",
                    sc.name
                )));
            }
            let mut baseline: Option<Vec<f64>> = None;
            for m in methods {
                let est = replicate_estimates(sc, &m.table, n, reps, master_seed)?;
                let parts = mse_decompose(&est, truth)?;
                let sq: Vec<f64> = est.iter().map(|e| (e - truth) * (e - truth)).collect();
                let p_raw = match &baseline {
                    None => {
                        baseline = Some(sq);
                        None
                    }
                    Some(base) => Some(wilcoxon_one_sided(base, &sq)?),
                };
                records.push(BenchmarkRecord {
                    scenario: sc.name.clone(),
                    n,
                    method: m.label.clone(),
                    reps,
                    bias_sq: parts.bias_sq,
                    variance: parts.variance,
                    mse: parts.mse,
                    p_raw,
                    p_adj: None,
                    master_seed,
                });
            }
        }
    }
    let idx: Vec<usize> = (0..records.len())
        .filter(|&i| records[i].p_raw.is_some())
        .collect();
    let raw: Vec<f64> = idx.iter().filter_map(|&i| records[i].p_raw).collect();
    for (&i, adj) in idx.iter().zip(bh_adjust(&raw)?) {
        records[i].p_adj = Some(adj);
    }
    Ok(records)
}

/// Renders records as CSV with [`CSV_HEADER`].
pub fn to_csv(records: &[BenchmarkRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let opt = |p: Option<f64>| p.map(|v| format!("{v:.5e}")).unwrap_or_default();
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.5e},{:.5e},{:.5e},{},{},{}",
            r.scenario,
            r.n,
            r.method,
            r.reps,
            r.bias_sq,
            r.variance,
            r.mse,
            opt(r.p_raw),
            opt(r.p_adj),
            r.master_seed
        );
    }
    out
}

/// Fills in `reference_price` for scenarios without a truth, computing
/// `reference_price(TRUTH_LOG2N, TRUTH_REPS, TRUTH_SEED)` on a cache miss.
/// With a cache path, computed values are read from and appended to it.
pub fn resolve_truths(scenarios: &mut [OptionScenario], cache: Option<&Path>) -> Result<()> {
    let mut known = match cache {
        Some(p) if p.exists() => read_truth_cache(p)?,
        _ => BTreeMap::new(),
    };
    let mut dirty = false;
    for sc in scenarios.iter_mut().filter(|s| s.truth().is_none()) {
        let key = truth_key(sc);
        let value = match known.get(&key) {
            Some(&v) => v,
            None => {
                let (v, _) = reference_price(sc, TRUTH_LOG2N, TRUTH_REPS, TRUTH_SEED)?;
                known.insert(key, v);
                dirty = true;
                v
            }
        };
        sc.reference_price = Some(value);
    }
    if let (Some(path), true) = (cache, dirty) {
        let mut text = String::from("# key,price\n");
        for (k, v) in &known {
            let _ = writeln!(text, "{k},{v:e}");
        }
        std::fs::write(path, text).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

/// Cache key: scenario name plus a fingerprint of all its parameters.
fn truth_key(sc: &OptionScenario) -> String {
    let repr = format!("{sc:?}|{TRUTH_LOG2N}|{TRUTH_REPS}|{TRUTH_SEED}");
    let hash = repr.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x100_0000_01b3)
    });
    format!("{}#{hash:016x}", sc.name)
}

fn read_truth_cache(path: &Path) -> Result<BTreeMap<String, f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parsed = line
            .rsplit_once(',')
            .and_then(|(k, v)| v.parse::<f64>().ok().map(|v| (k.to_string(), v)));
        match parsed {
            Some((k, v)) => {
                map.insert(k, v);
            }
            None => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: format!("expected `key,price`, got `{line}`"),
                })
            }
        }
    }
    Ok(map)
}
