//! Command-line front end. `main` parses arguments and calls [`run`].

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analytic::{cdf_interference, cdf_sum_upper, SumCdfEstimator};
use crate::cdma::{cutoff_closed_cdma, cutoff_closed_cdma_rate_scaled};
use crate::engine::with_workers;
use crate::error::{invalid_arg, Error, Result};
use crate::experiments::{
    decision_rows_to_table, decision_table, figure_preset, lambda_star_vs_backhaul, lambda_star_vs_density, run_preset,
    sweep_density, sweep_lambda, Cell, SweepSpec, Table, DEFAULT_GRID_STEP,
};
use crate::manifest::{unix_now, RunManifest};
use crate::model::NetworkConfig;
use crate::montecarlo::{find_open_cutoff, McOptions, DEFAULT_CUTOFF_EPS};
use crate::policy::AllocationPolicy;
use crate::rates::{Access, Scheme};
use crate::rng::{Stream, DEFAULT_SEED};
use crate::tdma::cutoff_closed_tdma;

const CDF_TAG: u64 = 0xCDF;

#[derive(Debug, Parser)]
#[command(name = "femtoaccess", version, about = "Open vs. closed femtocell access: uplink capacity")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct GlobalArgs {
    /// Key-value config file (`key = value` per line); unset keys keep the
    /// default network.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Override one config key, e.g. `--set C_b=2`. Repeatable; applied after `--config`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Monte Carlo replications; accepts `100000` or `1e5`.
    #[arg(long, global = true, default_value = "1e5", value_parser = parse_count)]
    pub reps: u64,
    /// Worker threads. Results do not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Write CSV here plus a `.manifest.json` sidecar instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Interference-factor CDF, its k-fold upper bound and a Monte Carlo
    /// estimate of the k-sum CDF.
    Cdf(CdfArgs),
    /// Ergodic rates for one scheme and access mode.
    Rates(RatesArgs),
    /// Load, split or backhaul sweeps.
    Sweep(SweepArgs),
    /// Smallest home-user share for which open access pays off.
    LambdaStar(LambdaStarArgs),
    /// Closed- and open-access cutoff loads.
    Cutoffs(CutoffsArgs),
    /// Preferred access mode of owner and operator at low, medium and high load.
    DecisionTable(DecisionArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Cdf(_) => "cdf",
            Command::Rates(_) => "rates",
            Command::Sweep(_) => "sweep",
            Command::LambdaStar(_) => "lambda-star",
            Command::Cutoffs(_) => "cutoffs",
            Command::DecisionTable(_) => "decision-table",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeArg {
    #[value(alias = "ofdma")]
    Tdma,
    Cdma,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Tdma => Scheme::Tdma,
            SchemeArg::Cdma => Scheme::Cdma,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AccessArg {
    Open,
    Closed,
    Both,
}

impl AccessArg {
    fn modes(self) -> Vec<Access> {
        match self {
            AccessArg::Open => vec![Access::Open],
            AccessArg::Closed => vec![Access::Closed],
            AccessArg::Both => vec![Access::Open, Access::Closed],
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct CdfArgs {
    /// `log:a:b:n` or `lin:a:b:n`.
    #[arg(long, default_value = "log:1e-4:1e3:200")]
    pub grid: String,
    /// Sum orders for the bound and Monte Carlo columns, comma separated.
    /// Pass `--k ''` for the single-user CDF only.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub k: Vec<u32>,
}

#[derive(Debug, Args, Serialize)]
pub struct RatesArgs {
    #[arg(long)]
    pub scheme: SchemeArg,
    #[arg(long, default_value = "open")]
    pub access: AccessArg,
    /// Cellular users: a single count or `start:stop[:step]`.
    #[arg(long)]
    pub n: String,
    /// Admission cap for open access.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// `proportional` or `fixed:LAMBDA`.
    #[arg(long, default_value = "proportional")]
    pub policy: String,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    /// Preset numbered after the figure it regenerates (1 to 7).
    #[arg(long, conflicts_with_all = ["scheme", "n", "lambda"])]
    pub fig: Option<u8>,
    #[arg(long, required_unless_present = "fig")]
    pub scheme: Option<SchemeArg>,
    /// `start:stop[:step]`; with `--lambda` a single count.
    #[arg(long, required_unless_present = "fig")]
    pub n: Option<String>,
    /// Comma-separated admission caps.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub k: Vec<usize>,
    #[arg(long, default_value = "both")]
    pub access: AccessArg,
    /// `proportional` or `fixed:LAMBDA`.
    #[arg(long, default_value = "proportional")]
    pub policy: String,
    /// Sweep the home-user share over this comma-separated grid at one load.
    #[arg(long, value_delimiter = ',')]
    pub lambda: Option<Vec<f64>>,
}

#[derive(Debug, Args, Serialize)]
pub struct LambdaStarArgs {
    #[arg(long)]
    pub scheme: SchemeArg,
    /// A single count or `start:stop[:step]`.
    #[arg(long)]
    pub n: String,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = DEFAULT_GRID_STEP)]
    pub grid_step: f64,
    /// Comma-separated backhaul capacities; needs a single `--n`.
    #[arg(long, value_delimiter = ',')]
    pub cb: Option<Vec<f64>>,
}

#[derive(Debug, Args, Serialize)]
pub struct CutoffsArgs {
    /// Admission caps for the open-access search, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1,3")]
    pub k: Vec<usize>,
    /// Collapse threshold as a fraction of `C`.
    #[arg(long, default_value_t = DEFAULT_CUTOFF_EPS)]
    pub eps: f64,
    /// Search limit for the open-access cutoff.
    #[arg(long, default_value_t = 1000)]
    pub n_max: usize,
    /// Use the rate-scaled CDMA feasibility condition for the closed cutoff.
    #[arg(long)]
    pub rate_scaled: bool,
    /// Closed-access cutoffs only.
    #[arg(long)]
    pub closed_only: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct DecisionArgs {
    #[arg(long, default_value_t = 3)]
    pub k: usize,
}

/// Parses `100000`, `1e5` or `2.5e4` as a count.
pub fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let v: f64 = s.parse().map_err(|_| format!("not a count: {s}"))?;
    if v.fract() != 0.0 || !(0.0..=u64::MAX as f64).contains(&v) {
        return Err(format!("not a whole non-negative count: {s}"));
    }
    Ok(v as u64)
}

/// `n` or `start:stop` or `start:stop:step`.
pub fn parse_n_range(s: &str) -> Result<(usize, usize, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |p: &str| p.trim().parse::<usize>().map_err(|_| invalid_arg(format!("bad N range `{s}`")));
    let (a, b, step) = match parts.as_slice() {
        [n] => {
            let n = num(n)?;
            (n, n, 1)
        }
        [a, b] => (num(a)?, num(b)?, 1),
        [a, b, c] => (num(a)?, num(b)?, num(c)?),
        _ => return Err(invalid_arg(format!("bad N range `{s}`"))),
    };
    if step == 0 || a > b || a == 0 {
        return Err(invalid_arg(format!("empty N range `{s}`")));
    }
    Ok((a, b, step))
}

/// `log:a:b:n` or `lin:a:b:n`, endpoints included.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || invalid_arg(format!("bad grid `{s}`; expected log:a:b:n or lin:a:b:n"));
    let parts: Vec<&str> = s.split(':').collect();
    let [kind, a, b, n] = parts.as_slice() else { return Err(bad()) };
    let a: f64 = a.parse().map_err(|_| bad())?;
    let b: f64 = b.parse().map_err(|_| bad())?;
    let n: usize = n.parse().map_err(|_| bad())?;
    if n == 0 || !(a.is_finite() && b.is_finite()) || (n > 1 && !(a < b)) {
        return Err(bad());
    }
    let frac = |j: usize| if n == 1 { 0.0 } else { j as f64 / (n - 1) as f64 };
    match *kind {
        "lin" => Ok((0..n).map(|j| if j + 1 == n { b } else { a + (b - a) * frac(j) }).collect()),
        "log" => {
            if !(a > 0.0) {
                return Err(invalid_arg(format!("log grid needs a positive start, got {a}")));
            }
            let (la, lb) = (a.ln(), b.ln());
            Ok((0..n)
                .map(|j| match j {
                    0 => a,
                    _ if j + 1 == n => b,
                    _ => (la + (lb - la) * frac(j)).exp(),
                })
                .collect())
        }
        _ => Err(bad()),
    }
}

/// `proportional` or `fixed:LAMBDA`.
pub fn parse_policy(s: &str, k: usize) -> Result<AllocationPolicy> {
    if s == "proportional" {
        return Ok(AllocationPolicy::proportional(k));
    }
    if let Some(v) = s.strip_prefix("fixed:") {
        let lambda: f64 = v.parse().map_err(|_| Error::InvalidPolicy(format!("bad lambda in `{s}`")))?;
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidPolicy(format!("lambda must lie in [0, 1], got {lambda}")));
        }
        return Ok(AllocationPolicy::fixed_lambda(k, lambda));
    }
    Err(Error::InvalidPolicy(format!("unknown policy `{s}`; use proportional or fixed:LAMBDA")))
}

pub fn load_config(global: &GlobalArgs) -> Result<NetworkConfig> {
    let mut cfg = match &global.config {
        Some(path) => NetworkConfig::from_kv_str(&std::fs::read_to_string(path)?)?,
        None => NetworkConfig::reference(),
    };
    for kv in &global.overrides {
        let (k, v) = kv.split_once('=').ok_or_else(|| invalid_arg(format!("expected KEY=VALUE, got `{kv}`")))?;
        let v: f64 = v.trim().parse().map_err(|_| invalid_arg(format!("bad value in `{kv}`")))?;
        cfg.set(k.trim(), v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_cdf(a: &CdfArgs, cfg: &NetworkConfig, g: &GlobalArgs) -> Result<Table> {
    let grid = parse_grid(&a.grid)?;
    let mut cols = vec!["i".to_string(), "cdf".to_string()];
    for k in &a.k {
        if *k == 0 {
            return Err(invalid_arg("k must be at least 1"));
        }
        cols.extend([format!("cdf_pow_{k}"), format!("sum_cdf_{k}"), format!("se_sum_cdf_{k}")]);
    }
    let gi = if a.k.is_empty() {
        None
    } else {
        Some(SumCdfEstimator::new(*cfg, g.reps, Stream::new(g.seed).derive(CDF_TAG))?)
    };
    let mut t = Table::new(cols);
    for &i in &grid {
        let mut row: Vec<Cell> = vec![i.into(), cdf_interference(i, cfg).into()];
        for &k in &a.k {
            let est = gi.as_ref().map(|e| e.eval(k, i)).unwrap_or_else(|| unreachable!());
            row.extend([cdf_sum_upper(k, i, cfg).into(), est.value.into(), est.std_error.into()]);
        }
        t.push(row);
    }
    Ok(t)
}

fn cmd_rates(a: &RatesArgs, cfg: &NetworkConfig, g: &GlobalArgs) -> Result<Table> {
    let (n_start, n_stop, n_step) = parse_n_range(&a.n)?;
    let policy = parse_policy(&a.policy, a.k)?;
    let spec = SweepSpec {
        access: a.access.modes(),
        ..SweepSpec::density(a.scheme.into(), n_start, n_stop, n_step, vec![a.k], g.reps, g.seed)
    };
    sweep_density(&spec, cfg, &policy)
}

fn cmd_sweep(a: &SweepArgs, cfg: &NetworkConfig, g: &GlobalArgs) -> Result<Table> {
    let opts = McOptions { reps: g.reps, seed: g.seed };
    if let Some(fig) = a.fig {
        return run_preset(&figure_preset(fig, g.reps, g.seed)?, cfg);
    }
    let scheme: Scheme = a.scheme.ok_or_else(|| invalid_arg("--scheme is required"))?.into();
    let n = a.n.as_deref().ok_or_else(|| invalid_arg("--n is required"))?;
    let (n_start, n_stop, n_step) = parse_n_range(n)?;
    if let Some(lambdas) = &a.lambda {
        if n_start != n_stop {
            return Err(invalid_arg("a lambda sweep takes a single --n"));
        }
        let [k] = a.k.as_slice() else { return Err(invalid_arg("a lambda sweep takes a single --k")) };
        return sweep_lambda(cfg, n_start, scheme, *k, lambdas, &opts);
    }
    let policy = parse_policy(&a.policy, 0)?;
    let spec = SweepSpec {
        access: a.access.modes(),
        ..SweepSpec::density(scheme, n_start, n_stop, n_step, a.k.clone(), g.reps, g.seed)
    };
    sweep_density(&spec, cfg, &policy)
}

fn cmd_lambda_star(a: &LambdaStarArgs, cfg: &NetworkConfig, g: &GlobalArgs) -> Result<Table> {
    let opts = McOptions { reps: g.reps, seed: g.seed };
    let (n_start, n_stop, n_step) = parse_n_range(&a.n)?;
    match &a.cb {
        Some(cb) => {
            if n_start != n_stop {
                return Err(invalid_arg("a backhaul sweep takes a single --n"));
            }
            lambda_star_vs_backhaul(cfg, n_start, a.scheme.into(), a.k, cb, &opts, a.grid_step)
        }
        None => {
            let ns: Vec<usize> = (n_start..=n_stop).step_by(n_step).collect();
            lambda_star_vs_density(cfg, &ns, a.scheme.into(), a.k, &opts, a.grid_step)
        }
    }
}

fn cmd_cutoffs(a: &CutoffsArgs, cfg: &NetworkConfig, g: &GlobalArgs) -> Result<Table> {
    let opts = McOptions { reps: g.reps, seed: g.seed };
    let mut t = Table::new(["scheme", "k", "n_closed", "n_open", "n_closed_plus_k", "within_bound"]);
    for scheme in [Scheme::Tdma, Scheme::Cdma] {
        let n_closed = match scheme {
            Scheme::Tdma => cutoff_closed_tdma(cfg),
            Scheme::Cdma if a.rate_scaled => cutoff_closed_cdma_rate_scaled(cfg),
            Scheme::Cdma => cutoff_closed_cdma(cfg),
        };
        t.push(vec![
            scheme.to_string().into(),
            0usize.into(),
            n_closed.into(),
            Cell::Empty,
            n_closed.into(),
            Cell::Empty,
        ]);
        if a.closed_only {
            continue;
        }
        for &k in &a.k {
            if k == 0 {
                continue;
            }
            let policy = AllocationPolicy::proportional(k);
            let oc = find_open_cutoff(cfg, &policy, scheme, a.eps, a.n_max, &opts)?;
            let within = oc.n_open <= n_closed + k;
            t.push(vec![
                scheme.to_string().into(),
                k.into(),
                n_closed.into(),
                oc.n_open.into(),
                (n_closed + k).into(),
                if within { "true" } else { "false" }.into(),
            ]);
        }
    }
    Ok(t)
}

fn cmd_decision(a: &DecisionArgs, cfg: &NetworkConfig, g: &GlobalArgs) -> Result<Table> {
    let rows = decision_table(cfg, a.k, &McOptions { reps: g.reps, seed: g.seed })?;
    Ok(decision_rows_to_table(&rows))
}

fn dispatch(cli: &Cli, cfg: &NetworkConfig) -> Result<Table> {
    let g = &cli.global;
    match &cli.command {
        Command::Cdf(a) => cmd_cdf(a, cfg, g),
        Command::Rates(a) => cmd_rates(a, cfg, g),
        Command::Sweep(a) => cmd_sweep(a, cfg, g),
        Command::LambdaStar(a) => cmd_lambda_star(a, cfg, g),
        Command::Cutoffs(a) => cmd_cutoffs(a, cfg, g),
        Command::DecisionTable(a) => cmd_decision(a, cfg, g),
    }
}

/// Runs a parsed command. CSV goes to `--out` with a manifest sidecar, or
/// to `stdout` when no path is given.
pub fn run(cli: &Cli, args: Vec<String>, stdout: &mut dyn Write) -> Result<()> {
    let cfg = load_config(&cli.global)?;
    let started = unix_now();
    let clock = Instant::now();
    let table = with_workers(cli.global.workers, || dispatch(cli, &cfg))??;
    let bytes = table.to_csv_bytes()?;
    match &cli.global.out {
        None => {
            stdout.write_all(&bytes)?;
            stdout.flush()?;
        }
        Some(path) => {
            write_with_parents(path, &bytes)?;
            let manifest = RunManifest {
                tool: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                command: cli.command.name().to_string(),
                args,
                config: cfg,
                seed: cli.global.seed,
                reps: cli.global.reps,
                workers: cli.global.workers,
                parameters: serde_json::to_value(&cli.command)?,
                started_unix: started,
                elapsed_seconds: clock.elapsed().as_secs_f64(),
                outputs: vec![RunManifest::checksum(path, &bytes)],
            };
            manifest.write(&RunManifest::sidecar_path(path))?;
        }
    }
    Ok(())
}

fn write_with_parents(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, bytes)?;
    Ok(())
}
