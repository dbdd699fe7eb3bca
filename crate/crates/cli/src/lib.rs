//! Command-line front end: solve for equilibrium strategies, verify them,
//! simulate auctions and scan bidder 1's deposit deviations.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use deposit_auction::pooling::{self, PoolingParams};
use deposit_auction::sequential::SequentialEquilibrium;
use deposit_auction::simultaneous::{SimultaneousEquilibrium, DEFAULT_STEP};
use deposit_auction::verify::{self, Pooling, Scaled, Sequential, Simultaneous, StrategyProfile, VerifyConfig};
use deposit_auction::{misallocation_quadrature, monte_carlo, ValuationDistribution};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_DRAWS: u64 = 1_000_000;
pub const GRID_POINTS: usize = 1001;

#[derive(Parser, Debug)]
#[command(name = "deposit-auction", version, about = "Second-price auctions with costly visible deposits")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve for the equilibrium and write `v,deposit,bid` to --out.
    Solve(SolveArgs),
    /// Check the equilibrium conditions numerically; exit 1 on failure.
    Verify(VerifyArgs),
    /// Monte Carlo outcome metrics.
    Simulate,
    /// Bidder 1's expected profit as a function of his deposit.
    DeviationScan(ScanArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    #[arg(long, global = true, value_enum)]
    pub regime: Option<Regime>,
    /// sqrt | uniform | quadratic | power:<alpha>
    #[arg(long, global = true)]
    pub dist: Option<String>,
    #[arg(long, global = true)]
    pub cost: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub n: Option<u64>,
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Flat TOML file with the same keys as the flags; flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    #[arg(long, default_value_t = DEFAULT_STEP)]
    pub step: f64,
    /// Emit bidder 2's `v2,deposit` after the given deposit, e.g. `d1=0.5`.
    #[arg(long, value_name = "d1=X")]
    pub response: Option<String>,
    /// Emit `d1,profit` for the given bidder-1 type, e.g. `v1=1`.
    #[arg(long, value_name = "v1=X")]
    pub deviation_scan: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// Perturb bidder 1's deposit rule, e.g. `scale=1.5`.
    #[arg(long, value_name = "scale=X")]
    pub mutate: Option<String>,
    #[arg(long, default_value_t = verify::DEFAULT_TYPES)]
    pub types: usize,
    #[arg(long, default_value_t = verify::DEFAULT_DEPOSITS)]
    pub deposits: usize,
}

#[derive(Args, Debug, Clone)]
pub struct ScanArgs {
    #[arg(long)]
    pub v1: f64,
    #[arg(long, default_value_t = GRID_POINTS)]
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Simultaneous,
    /// Resolved to sequential-sqrt or sequential-uniform by --dist.
    Sequential,
    SequentialSqrt,
    SequentialUniform,
    Pooling,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::Simultaneous => "simultaneous",
            Regime::Sequential => "sequential",
            Regime::SequentialSqrt => "sequential-sqrt",
            Regime::SequentialUniform => "sequential-uniform",
            Regime::Pooling => "pooling",
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    regime: Option<Regime>,
    dist: Option<String>,
    cost: Option<f64>,
    seed: Option<u64>,
    n: Option<u64>,
    eps: Option<f64>,
    out: Option<PathBuf>,
}

/// Fully resolved settings for one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub regime: Regime,
    pub dist: ValuationDistribution,
    pub cost: f64,
    pub seed: u64,
    pub n: u64,
    pub eps: f64,
    pub out: Option<PathBuf>,
}

/// Invalid flags or configuration; reported with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

impl RunConfig {
    pub fn resolve(common: &CommonArgs) -> Result<Self> {
        let file = match &common.config {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                toml::from_str::<FileConfig>(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        let regime = common.regime.or(file.regime).ok_or_else(|| usage("--regime is required"))?;
        let dist = match common.dist.clone().or(file.dist) {
            Some(s) => Some(s.parse::<ValuationDistribution>().map_err(|e| usage(e.to_string()))?),
            None => None,
        };
        let cost = common.cost.or(file.cost).ok_or_else(|| usage("--cost is required"))?;
        if !(cost.is_finite() && cost > 0.0) {
            return Err(usage(format!("--cost must be positive, got {cost}")));
        }
        let n = common.n.or(file.n).unwrap_or(DEFAULT_DRAWS);
        if n == 0 {
            return Err(usage("--n must be at least 1"));
        }
        let eps = common.eps.or(file.eps).unwrap_or(verify::DEFAULT_EPS);
        if !(eps.is_finite() && eps > 0.0) {
            return Err(usage(format!("--eps must be positive, got {eps}")));
        }
        let (regime, dist) = resolve_regime(regime, dist)?;
        Ok(Self {
            regime,
            dist,
            cost,
            seed: common.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            n,
            eps,
            out: common.out.clone().or(file.out),
        })
    }
}

fn resolve_regime(regime: Regime, dist: Option<ValuationDistribution>) -> Result<(Regime, ValuationDistribution)> {
    use ValuationDistribution as D;
    let fixed = |r: Regime, required: D| match dist {
        None => Ok((r, required)),
        Some(d) if d == required => Ok((r, required)),
        Some(d) => Err(usage(format!("regime {} requires --dist {required}, got {d}", r.label()))),
    };
    match regime {
        Regime::Simultaneous => {
            let d = dist.ok_or_else(|| usage("regime simultaneous requires --dist"))?;
            Ok((regime, d))
        }
        Regime::Sequential => match dist {
            Some(d) if d == D::SQRT => Ok((Regime::SequentialSqrt, d)),
            Some(d) if d == D::UNIFORM => Ok((Regime::SequentialUniform, d)),
            Some(d) => Err(usage(format!("regime sequential supports --dist sqrt or uniform, got {d}"))),
            None => Err(usage("regime sequential requires --dist sqrt or uniform")),
        },
        Regime::SequentialSqrt => fixed(regime, D::SQRT),
        Regime::SequentialUniform => fixed(regime, D::UNIFORM),
        Regime::Pooling => fixed(regime, D::QUADRATIC),
    }
}

pub fn build_profile(config: &RunConfig, step: f64) -> Result<Box<dyn StrategyProfile>> {
    let c = config.cost;
    Ok(match config.regime {
        Regime::Simultaneous => Box::new(Simultaneous::new(SimultaneousEquilibrium::solve(config.dist, c, step)?)),
        Regime::SequentialSqrt => Box::new(Sequential::sqrt(c).map_err(|e| usage(e.to_string()))?),
        Regime::SequentialUniform => Box::new(Sequential::uniform(c).map_err(|e| usage(e.to_string()))?),
        Regime::Pooling => Box::new(Pooling::new(pooling::solve_marginal_types(c)?)),
        Regime::Sequential => unreachable!("resolved by RunConfig"),
    })
}

/// Run a parsed command and return the process exit code.
pub fn run(cli: Cli) -> Result<i32> {
    let config = RunConfig::resolve(&cli.common)?;
    match cli.command {
        Command::Solve(args) => cmd_solve(&config, &args),
        Command::Verify(args) => cmd_verify(&config, &args),
        Command::Simulate => cmd_simulate(&config),
        Command::DeviationScan(args) => cmd_deviation_scan(&config, args.v1, args.points),
    }
}

/// Parse and run `args`, printing errors; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}

pub fn cmd_solve(config: &RunConfig, args: &SolveArgs) -> Result<i32> {
    if !(args.step.is_finite() && args.step > 0.0) {
        bail!(usage(format!("--step must be positive, got {}", args.step)));
    }
    if let Some(arg) = &args.response {
        let d1 = parse_assignment(arg, "d1")?;
        let profile = build_profile(config, args.step)?;
        let mut csv = String::from("v2,deposit\n");
        for v2 in unit_grid(GRID_POINTS) {
            let d2 = profile.bidder2_response(d1, v2).unwrap_or(0.0);
            writeln!(csv, "{},{}", fmt9(v2), fmt9(d2))?;
        }
        return emit_text(config.out.as_deref(), &csv).map(|_| EXIT_PASS);
    }
    if let Some(arg) = &args.deviation_scan {
        let v1 = parse_assignment(arg, "v1")?;
        return cmd_deviation_scan(config, v1, GRID_POINTS);
    }
    let (profile, summary) = match config.regime {
        Regime::Simultaneous => {
            let eq = SimultaneousEquilibrium::solve(config.dist, config.cost, args.step)?;
            let s = eq.summary();
            let summary = json!({
                "regime": "simultaneous",
                "dist": config.dist.to_string(),
                "cost": config.cost,
                "step": args.step,
                "deposit_at_one": s.deposit_at_one,
                "max_shading": s.max_shading,
            });
            (Box::new(Simultaneous::new(eq)) as Box<dyn StrategyProfile>, summary)
        }
        Regime::SequentialSqrt | Regime::SequentialUniform => {
            let eq = if config.regime == Regime::SequentialSqrt {
                SequentialEquilibrium::sqrt_separating(config.cost)
            } else {
                SequentialEquilibrium::uniform_entry(config.cost)
            }
            .map_err(|e| usage(e.to_string()))?;
            let summary = json!({
                "regime": eq.label(),
                "dist": config.dist.to_string(),
                "cost": config.cost,
                "kind": eq.kind,
                "thresholds": eq.thresholds,
                "dbar": eq.dbar,
            });
            (Box::new(Sequential::new(eq)) as Box<dyn StrategyProfile>, summary)
        }
        Regime::Pooling => {
            let params = pooling::solve_marginal_types(config.cost)?;
            (Box::new(Pooling::new(params)) as Box<dyn StrategyProfile>, pooling_summary(&params))
        }
        Regime::Sequential => unreachable!("resolved by RunConfig"),
    };
    if let Some(path) = &config.out {
        let mut csv = String::from("v,deposit,bid\n");
        for v in unit_grid(GRID_POINTS) {
            writeln!(csv, "{},{},{}", fmt9(v), fmt9(profile.bidder1_deposit(v)), fmt9(profile.bidder1_bid(v)))?;
        }
        write_file(path, &csv)?;
    }
    println!("{}", to_json(&summary)?);
    Ok(EXIT_PASS)
}

fn pooling_summary(p: &PoolingParams) -> Value {
    json!({
        "regime": "pooling",
        "dist": "quadratic",
        "cost": p.c,
        "u": p.u,
        "v": p.v,
        "dbar": p.dbar,
        "residuals": p.residuals(),
        "inequality_check": p.inequality_check(),
    })
}

pub fn cmd_verify(config: &RunConfig, args: &VerifyArgs) -> Result<i32> {
    let base = build_profile(config, DEFAULT_STEP)?;
    let verify_config = VerifyConfig { n_types: args.types.max(1), n_deposits: args.deposits.max(1), eps: config.eps };
    let report = match &args.mutate {
        Some(arg) => {
            let scale = parse_assignment(arg, "scale")?;
            verify::verify(&Scaled::new(base, scale), verify_config)
        }
        None => verify::verify(&base, verify_config),
    };
    let text = to_json(&report)?;
    if let Some(path) = &config.out {
        write_file(path, &format!("{text}\n"))?;
    }
    println!("{text}");
    Ok(if report.pass { EXIT_PASS } else { EXIT_FAIL })
}

pub fn cmd_simulate(config: &RunConfig) -> Result<i32> {
    let profile = build_profile(config, DEFAULT_STEP)?;
    let metrics = monte_carlo(&profile, config.n, config.seed);
    let out = json!({
        "regime": config.regime.label(),
        "dist": config.dist.to_string(),
        "cost": config.cost,
        "seed": config.seed,
        "metrics": metrics,
        "misallocation_quadrature": misallocation_quadrature(&profile),
    });
    let text = to_json(&out)?;
    if let Some(path) = &config.out {
        write_file(path, &format!("{text}\n"))?;
    }
    println!("{text}");
    Ok(EXIT_PASS)
}

/// `d1,profit` for bidder-1 type `v1` over `[lo, d̄]`, where `lo` is the
/// marginal type under pooling and 0 otherwise.
pub fn cmd_deviation_scan(config: &RunConfig, v1: f64, points: usize) -> Result<i32> {
    if !(0.0..=1.0).contains(&v1) {
        bail!(usage(format!("v1 must lie in [0, 1], got {v1}")));
    }
    if points < 2 {
        bail!(usage("--points must be at least 2"));
    }
    let profile = build_profile(config, DEFAULT_STEP)?;
    let lo = match config.regime {
        Regime::Pooling => profile.type_breakpoints()[0],
        _ => 0.0,
    };
    let hi = profile.max_deposit();
    let mut csv = String::from("d1,profit\n");
    for i in 0..points {
        let d1 = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        writeln!(csv, "{},{}", fmt9(d1), fmt9(verify::bidder1_expected_payoff(&profile, v1, d1)))?;
    }
    emit_text(config.out.as_deref(), &csv)?;
    Ok(EXIT_PASS)
}

fn unit_grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| i as f64 / (n - 1) as f64)
}

fn parse_assignment(arg: &str, key: &str) -> Result<f64> {
    let (k, v) = arg.split_once('=').ok_or_else(|| usage(format!("expected {key}=<number>, got {arg:?}")))?;
    if k.trim() != key {
        return Err(usage(format!("expected {key}=<number>, got {arg:?}")));
    }
    let x: f64 = v.trim().parse().map_err(|_| usage(format!("not a number in {arg:?}")))?;
    if !x.is_finite() {
        return Err(usage(format!("not a finite number in {arg:?}")));
    }
    Ok(x)
}

/// Round to 9 significant digits.
pub fn round9(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

pub fn fmt9(x: f64) -> String {
    let r = round9(x);
    if r == 0.0 {
        "0".into()
    } else {
        r.to_string()
    }
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                *v = serde_json::Number::from_f64(round9(x)).map_or(Value::Null, Value::Number);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with every float rounded to 9 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    Ok(serde_json::to_string_pretty(&v)?)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn emit_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
