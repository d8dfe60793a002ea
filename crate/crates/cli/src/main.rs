use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qmclab::bench::{self, Method};
use qmclab::discrepancy::{
    exact_star_discrepancy, ta_star_discrepancy, TaConfig, DEFAULT_GRID_BUDGET,
};
use qmclab::finance::{self, OptionScenario};
use qmclab::generators::{
    fibonacci_lattice_with, halton_points, hammersley_points, FibonacciVariant,
};
use qmclab::optimizer::{refine_point_set, RefineConfig};
use qmclab::sobol::{
    load_direction_table, DirectionSource, LmsShiftRandomization, ShiftKind, SobolGenerator,
};
use qmclab::{load_point_set, save_point_set, PointSet};

#[derive(Parser)]
#[command(
    name = "qmclab",
    version,
    about = "Low-discrepancy point sets and randomized-QMC pricing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Star discrepancy of a point-set file.
    Discrepancy(DiscrepancyArgs),
    /// Write a point set.
    Generate(GenerateArgs),
    /// Refine a point set towards lower star discrepancy.
    Optimize(OptimizeArgs),
    /// Randomized-QMC price of one scenario.
    Price(PriceArgs),
    /// High-precision reference price with Joe-Kuo directions.
    TruePrice(TruePriceArgs),
    /// Paired MSE benchmark across direction tables.
    Benchmark(BenchmarkArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum DiscMethod {
    Exact,
    Ta,
}

#[derive(Args)]
struct DiscrepancyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "exact")]
    method: DiscMethod,
    #[arg(long, default_value_t = TaConfig::default().iterations)]
    ta_iters: usize,
    /// Required with `--method ta`.
    #[arg(long)]
    seed: Option<u64>,
    /// Largest corner grid the exact method may enumerate.
    #[arg(long, default_value_t = DEFAULT_GRID_BUDGET)]
    budget: u128,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Fibonacci,
    Halton,
    Hammersley,
    Sobol,
}

#[derive(Clone, Copy, ValueEnum)]
enum Randomize {
    LmsShift,
}

#[derive(Clone, Copy, ValueEnum)]
enum Shift {
    Digital,
    CranleyPatterson,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Centered,
    Unshifted,
    Shifted,
}

impl From<Variant> for FibonacciVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Centered => FibonacciVariant::Centered,
            Variant::Unshifted => FibonacciVariant::Unshifted,
            Variant::Shifted => FibonacciVariant::Shifted,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    dim: usize,
    /// Sobol' direction numbers: builtin-joe-kuo, builtin-llm or a file.
    #[arg(long, default_value = "builtin-joe-kuo")]
    params: String,
    #[arg(long, value_enum)]
    randomize: Option<Randomize>,
    #[arg(long, value_enum, default_value = "digital")]
    shift: Shift,
    #[arg(long)]
    seed: Option<u64>,
    /// First Halton index.
    #[arg(long, default_value_t = 0)]
    start_index: u64,
    /// Fibonacci lattice placement.
    #[arg(long, value_enum, default_value = "centered")]
    variant: Variant,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long, conflicts_with = "family")]
    init: Option<PathBuf>,
    #[arg(long, value_enum)]
    family: Option<Family>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = RefineConfig::default().restarts)]
    restarts: usize,
    #[arg(long, default_value_t = RefineConfig::default().jitter_sigma)]
    jitter: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = RefineConfig::default().max_evals_per_restart)]
    max_evals: usize,
    #[arg(long, default_value_t = RefineConfig::default().kicks)]
    kicks: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PriceArgs {
    /// Catalog name or TOML scenario file.
    #[arg(long)]
    scenario: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value = "builtin-joe-kuo")]
    params: String,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    randomizations: usize,
}

#[derive(Args)]
struct TruePriceArgs {
    #[arg(long)]
    scenario: String,
    #[arg(long)]
    log2n: u32,
    #[arg(long)]
    reps: usize,
    #[arg(long)]
    seed: u64,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// Comma-separated catalog names or scenario files.
    #[arg(long, value_delimiter = ',', required = true)]
    scenarios: Vec<String>,
    #[arg(long, value_delimiter = ',', required = true)]
    n_list: Vec<usize>,
    /// Comma-separated direction sources; the first is the baseline.
    #[arg(long, value_delimiter = ',', required = true)]
    methods: Vec<String>,
    #[arg(long)]
    reps: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// File caching truths computed for scenarios without one.
    #[arg(long)]
    truth_cache: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<qmclab::Error> for Failure {
    fn from(e: qmclab::Error) -> Self {
        match e {
            qmclab::Error::UnknownScenario(_) | qmclab::Error::UnknownMethod(_) => {
                Failure::Usage(with_hint(&e))
            }
            e => Failure::Runtime(e.into()),
        }
    }
}

fn with_hint(e: &qmclab::Error) -> String {
    match e {
        qmclab::Error::UnknownScenario(_) => format!(
            "{e}; valid scenarios: {}",
            finance::scenario_names().join(", ")
        ),
        qmclab::Error::UnknownMethod(_) => {
            format!("{e}; use builtin-joe-kuo, builtin-llm or an existing direction file")
        }
        _ => e.to_string(),
    }
}

type Outcome<T = ()> = std::result::Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> Outcome<T> {
    Err(Failure::Usage(msg.into()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Discrepancy(a) => discrepancy(a),
        Command::Generate(a) => generate(a),
        Command::Optimize(a) => optimize(a),
        Command::Price(a) => price(a),
        Command::TruePrice(a) => true_price(a),
        Command::Benchmark(a) => benchmark(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn discrepancy(a: DiscrepancyArgs) -> Outcome {
    let ps = load_point_set(&a.input)?;
    let value = match a.method {
        DiscMethod::Exact => exact_star_discrepancy(&ps, a.budget)?,
        DiscMethod::Ta => {
            let Some(seed) = a.seed else {
                return usage("--method ta needs --seed");
            };
            let cfg = TaConfig {
                iterations: a.ta_iters,
                seed,
                ..TaConfig::default()
            };
            ta_star_discrepancy(&ps, &cfg)?
        }
    };
    println!("{value}");
    Ok(())
}

fn direction_source(text: &str) -> Outcome<DirectionSource> {
    let src: DirectionSource = text.parse().expect("infallible");
    if let DirectionSource::File(p) = &src {
        if !p.is_file() {
            return Err(qmclab::Error::UnknownMethod(text.to_string()).into());
        }
    }
    Ok(src)
}

fn generate(a: GenerateArgs) -> Outcome {
    if a.randomize.is_some() && !matches!(a.family, Family::Sobol) {
        return usage("--randomize applies to the sobol family only");
    }
    let ps = match a.family {
        Family::Fibonacci => {
            if a.dim != 2 {
                return usage("the Fibonacci lattice is two-dimensional; use --dim 2");
            }
            fibonacci_lattice_with(a.n, a.variant.into())?
        }
        Family::Halton => halton_points(a.n, a.dim, a.start_index)?,
        Family::Hammersley => hammersley_points(a.n, a.dim)?,
        Family::Sobol => {
            let table = load_direction_table(&direction_source(&a.params)?, a.dim)?;
            let gen = match a.randomize {
                None => SobolGenerator::new(&table, a.dim)?,
                Some(Randomize::LmsShift) => {
                    let Some(seed) = a.seed else {
                        return usage("--randomize needs --seed");
                    };
                    let kind = match a.shift {
                        Shift::Digital => ShiftKind::Digital,
                        Shift::CranleyPatterson => ShiftKind::CranleyPatterson,
                    };
                    let rand = LmsShiftRandomization::new(seed, a.dim, table.bits(), kind);
                    SobolGenerator::randomized(&table, a.dim, &rand)?
                }
            };
            gen.points(a.n)?
        }
    };
    save_point_set(&ps, &a.out)?;
    eprintln!(
        "wrote {} points in {} dimensions to {}",
        ps.len(),
        ps.dim(),
        a.out.display()
    );
    Ok(())
}

fn optimize(a: OptimizeArgs) -> Outcome {
    let init: PointSet = match (&a.init, a.family) {
        (Some(path), None) => load_point_set(path)?,
        (None, Some(Family::Fibonacci)) => {
            let Some(n) = a.n else {
                return usage("--family fibonacci needs --n");
            };
            if a.dim != 2 {
                return usage("the Fibonacci lattice is two-dimensional; use --dim 2");
            }
            fibonacci_lattice_with(n, FibonacciVariant::Centered)?
        }
        (None, Some(_)) => return usage("optimize starts from --family fibonacci or --init FILE"),
        _ => return usage("give exactly one of --init or --family"),
    };
    let cfg = RefineConfig {
        restarts: a.restarts,
        jitter_sigma: a.jitter,
        max_evals_per_restart: a.max_evals,
        kicks: a.kicks,
        seed: a.seed,
        ..RefineConfig::default()
    };
    let before = exact_star_discrepancy(&init, cfg.grid_budget)?;
    let started = Instant::now();
    let out = refine_point_set(&init, &cfg)?;
    let after = exact_star_discrepancy(&out, cfg.grid_budget)?;
    save_point_set(&out, &a.out)?;
    eprintln!(
        "D* {before:.6} -> {after:.6} in {:.1?}; wrote {}",
        started.elapsed(),
        a.out.display()
    );
    println!("{after}");
    Ok(())
}

/// Catalog name first, then a scenario file.
fn resolve_scenario(spec: &str) -> Outcome<OptionScenario> {
    match finance::scenario(spec) {
        Ok(s) => Ok(s),
        Err(_) if Path::new(spec).is_file() => Ok(finance::load_scenario(Path::new(spec))?),
        Err(e) => Err(e.into()),
    }
}

fn price(a: PriceArgs) -> Outcome {
    let sc = resolve_scenario(&a.scenario)?;
    if a.randomizations == 0 {
        return usage("--randomizations must be at least 1");
    }
    let method = Method::load(&direction_source(&a.params)?, sc.dim())?;
    let est = bench::replicate_estimates(&sc, &method.table, a.n, a.randomizations, a.seed)?;
    let (mean, stderr) = if est.len() > 1 {
        let (m, s) = finance::mean_and_stderr(&est);
        (m, s.to_string())
    } else {
        (est[0], String::new())
    };
    println!("scenario,n,method,randomizations,mean,stderr");
    println!(
        "{},{},{},{},{mean},{stderr}",
        sc.name, a.n, method.label, a.randomizations
    );
    Ok(())
}

fn true_price(a: TruePriceArgs) -> Outcome {
    let sc = resolve_scenario(&a.scenario)?;
    let started = Instant::now();
    let (mean, stderr) = finance::reference_price(&sc, a.log2n, a.reps, a.seed)?;
    eprintln!("computed in {:.1?}", started.elapsed());
    println!("scenario,log2n,reps,mean,stderr");
    println!("{},{},{},{mean},{stderr}", sc.name, a.log2n, a.reps);
    Ok(())
}

fn benchmark(a: BenchmarkArgs) -> Outcome {
    let mut scenarios = a
        .scenarios
        .iter()
        .map(|s| resolve_scenario(s))
        .collect::<Outcome<Vec<_>>>()?;
    let dim = scenarios.iter().map(OptionScenario::dim).max().unwrap_or(1);
    let methods = a
        .methods
        .iter()
        .map(|m| Ok(Method::load(&direction_source(m)?, dim)?))
        .collect::<Outcome<Vec<_>>>()?;
    let started = Instant::now();
    bench::resolve_truths(&mut scenarios, a.truth_cache.as_deref())?;
    let records = bench::run_mse_benchmark(&scenarios, &a.n_list, &methods, a.reps, a.seed)?;
    std::fs::write(&a.out, bench::to_csv(&records))
        .map_err(|e| anyhow::anyhow!("writing {}: {e}", a.out.display()))?;
    let mut summary = String::new();
    for r in &records {
        let _ = writeln!(
            summary,
            "{:>16} n={:<6} {:<10} mse={:.4e} p_adj={}",
            r.scenario,
            r.n,
            r.method,
            r.mse,
            r.p_adj.map_or("-".into(), |p| format!("{p:.3e}"))
        );
    }
    eprint!("{summary}");
    eprintln!(
        "{} rows in {:.1?}; wrote {}",
        records.len(),
        started.elapsed(),
        a.out.display()
    );
    Ok(())
}
