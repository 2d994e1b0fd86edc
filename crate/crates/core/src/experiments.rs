//! Sweeps over load, resource split and backhaul, and the access-mode
//! decision table. Every driver returns a [`Table`] that serializes to CSV.

use std::io::Write;

use serde::Serialize;

use crate::analytic::SumCdfEstimator;
use crate::cdma::{
    closed_access_cdma, cutoff_closed_cdma, home_rate_lower_bound_cdma, sum_throughput_lower_bound_cdma_k1,
};
use crate::engine::MIN_REPS;
use crate::error::{invalid_arg, Error, Result};
use crate::model::NetworkConfig;
use crate::montecarlo::{estimate, find_open_cutoff, McOptions, McResult, DEFAULT_CUTOFF_EPS};
use crate::policy::AllocationPolicy;
use crate::rates::{Access, Scheme};
use crate::rng::Stream;
use crate::tdma::{closed_access_tdma, cutoff_closed_tdma, open_access_tdma_k1};

/// Bisection stops once the bracket is this narrow.
pub const LAMBDA_TOL: f64 = 1e-3;
/// Default grid spacing for the lambda search.
pub const DEFAULT_GRID_STEP: f64 = 0.01;
/// Relative tolerance used to call two home-user rates equal.
const SATURATION_RTOL: f64 = 1e-12;
/// Tag for the sum-CDF estimator streams used by the bound columns.
const BOUND_TAG: u64 = 0xB0_0D;

// ---------------------------------------------------------------------------
// Tables

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_g9(*v),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Float(v) => Some(*v),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn get(&self, row: usize, name: &str) -> Option<&Cell> {
        self.rows.get(row)?.get(self.column(name)?)
    }

    /// Comma-separated, header row, LF line endings.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_bytes(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(buf)
    }
}

/// `printf("%.9g")`.
pub fn format_g9(x: f64) -> String {
    const P: i32 = 9;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').unwrap_or((&sci, "0"));
    let exp: i32 = exp.parse().unwrap_or(0);
    if !(-4..P).contains(&exp) {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (P - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

// ---------------------------------------------------------------------------
// Density sweep

/// Parameters of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub scheme: Scheme,
    pub access: Vec<Access>,
    pub n_start: usize,
    pub n_stop: usize,
    pub n_step: usize,
    pub k_list: Vec<usize>,
    pub lambda_grid: Vec<f64>,
    pub cb_grid: Vec<f64>,
    pub reps: u64,
    pub seed: u64,
}

impl SweepSpec {
    /// A load sweep with everything else defaulted.
    pub fn density(
        scheme: Scheme,
        n_start: usize,
        n_stop: usize,
        n_step: usize,
        k_list: Vec<usize>,
        reps: u64,
        seed: u64,
    ) -> Self {
        SweepSpec {
            scheme,
            access: vec![Access::Open, Access::Closed],
            n_start,
            n_stop,
            n_step,
            k_list,
            lambda_grid: Vec::new(),
            cb_grid: Vec::new(),
            reps,
            seed,
        }
    }

    pub fn n_values(&self) -> Vec<usize> {
        if self.n_step == 0 || self.n_start > self.n_stop {
            return Vec::new();
        }
        (self.n_start..=self.n_stop).step_by(self.n_step).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_values().is_empty() {
            return Err(invalid_arg(format!("empty N range {}..={} step {}", self.n_start, self.n_stop, self.n_step)));
        }
        if self.n_start == 0 {
            return Err(invalid_arg("N must start at 1 or more"));
        }
        if self.access.is_empty() || self.k_list.is_empty() {
            return Err(invalid_arg("sweep needs at least one access mode and one K"));
        }
        let kmax = self.k_list.iter().copied().max().unwrap_or(0);
        if self.access.contains(&Access::Open) && self.n_start <= kmax {
            return Err(invalid_arg(format!(
                "open access needs N > K; N starts at {} but K reaches {kmax}",
                self.n_start
            )));
        }
        if self.reps < MIN_REPS {
            return Err(invalid_arg(format!("reps must be at least {MIN_REPS}, got {}", self.reps)));
        }
        if self.lambda_grid.iter().any(|l| !(0.0..=1.0).contains(l)) {
            return Err(invalid_arg("lambda grid values must lie in [0, 1]"));
        }
        if self.cb_grid.iter().any(|c| !(*c > 0.0)) {
            return Err(invalid_arg("backhaul values must be positive"));
        }
        Ok(())
    }

    fn opts(&self) -> McOptions {
        McOptions { reps: self.reps, seed: self.seed }
    }
}

/// Closed-form or bound values that accompany a Monte Carlo row.
#[derive(Debug, Clone, Copy, Default)]
struct Analytic {
    c0_exact: Option<f64>,
    csum_exact: Option<f64>,
    c0_upper: Option<f64>,
    c0_lower: Option<(f64, f64)>,
    csum_lower: Option<(f64, f64)>,
}

fn analytic_columns(
    cfg: &NetworkConfig,
    policy: &AllocationPolicy,
    n: usize,
    scheme: Scheme,
    access: Access,
    gi: &SumCdfEstimator,
) -> Result<Analytic> {
    let mut a = Analytic::default();
    match (scheme, access) {
        (Scheme::Tdma, Access::Closed) => {
            let r = closed_access_tdma(cfg, n)?;
            a.c0_exact = Some(r.c0);
            a.csum_exact = Some(r.csum);
        }
        (Scheme::Tdma, Access::Open) if policy.k == 1 => {
            let r = open_access_tdma_k1(cfg, policy, n)?.report;
            a.c0_exact = Some(r.c0);
            a.csum_exact = Some(r.csum);
        }
        (Scheme::Tdma, Access::Open) => {}
        (Scheme::Cdma, Access::Closed) => {
            let r = closed_access_cdma(cfg, n, gi)?;
            a.csum_exact = Some(r.report.csum);
            a.c0_upper = Some(r.c0_upper);
        }
        (Scheme::Cdma, Access::Open) => {
            if policy.k >= 1 {
                let b = home_rate_lower_bound_cdma(cfg, policy, n, gi)?;
                a.c0_lower = Some((b.value, b.std_error));
            }
            if policy.k == 1 {
                let b = sum_throughput_lower_bound_cdma_k1(cfg, policy, n, gi)?;
                a.csum_lower = Some((b.csum.value, b.csum.std_error));
            }
        }
    }
    Ok(a)
}

/// One row per `(N, K, access)`: Monte Carlo rates with standard errors,
/// closed forms or bounds where they exist, and the handoff-level
/// distribution `P(A_L)`.
pub fn sweep_density(spec: &SweepSpec, cfg: &NetworkConfig, policy: &AllocationPolicy) -> Result<Table> {
    spec.validate()?;
    cfg.validate()?;
    let kmax = spec.k_list.iter().copied().max().unwrap_or(0);
    let mut cols: Vec<String> = [
        "scheme",
        "access",
        "n",
        "k",
        "c0",
        "se_c0",
        "csum",
        "se_csum",
        "csum_macro",
        "se_csum_macro",
        "c0_exact",
        "csum_exact",
        "c0_upper",
        "c0_lower",
        "se_c0_lower",
        "csum_lower",
        "se_csum_lower",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for l in 0..=kmax {
        cols.push(format!("p_a{l}"));
        cols.push(format!("se_p_a{l}"));
    }
    let mut table = Table::new(cols);
    let opts = spec.opts();
    let gi = SumCdfEstimator::new(*cfg, spec.reps, Stream::new(spec.seed).derive(BOUND_TAG))?;
    for n in spec.n_values() {
        let mut closed_cache: Option<(McResult, Analytic)> = None;
        for &k in &spec.k_list {
            let pk = policy.with_k(k)?;
            for &access in &spec.access {
                let (res, an) = match access {
                    Access::Closed => {
                        if closed_cache.is_none() {
                            let res = estimate(cfg, &pk, n, spec.scheme, access, &opts)?;
                            let an = analytic_columns(cfg, &pk.with_k(0)?, n, spec.scheme, access, &gi)?;
                            closed_cache = Some((res, an));
                        }
                        closed_cache.clone().unwrap_or_else(|| unreachable!())
                    }
                    Access::Open => {
                        let res = estimate(cfg, &pk, n, spec.scheme, access, &opts)?;
                        let an = analytic_columns(cfg, &pk, n, spec.scheme, access, &gi)?;
                        (res, an)
                    }
                };
                let r = res.report;
                let mut row: Vec<Cell> = vec![
                    spec.scheme.to_string().into(),
                    access.to_string().into(),
                    n.into(),
                    k.into(),
                    r.c0.into(),
                    r.se_c0.into(),
                    r.csum.into(),
                    r.se_csum.into(),
                    r.csum_macro.into(),
                    r.se_csum_macro.into(),
                    an.c0_exact.into(),
                    an.csum_exact.into(),
                    an.c0_upper.into(),
                    an.c0_lower.map(|v| v.0).into(),
                    an.c0_lower.map(|v| v.1).into(),
                    an.csum_lower.map(|v| v.0).into(),
                    an.csum_lower.map(|v| v.1).into(),
                ];
                for l in 0..=kmax {
                    match res.events.probs.get(l) {
                        Some(e) => {
                            row.push(e.value.into());
                            row.push(e.std_error.into());
                        }
                        None => {
                            row.push(Cell::Empty);
                            row.push(Cell::Empty);
                        }
                    }
                }
                table.push(row);
            }
        }
    }
    Ok(table)
}

// ---------------------------------------------------------------------------
// Resource split

/// What "the home user benefits" means when searching for `lambda*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaCriterion {
    /// Smallest `lambda` with open-access `c0` at least the closed-access `c0`.
    BreakEven,
    /// Smallest `lambda` whose open-access `c0` equals that at `lambda = 1`:
    /// below it the home user's share of the backhaul limits its rate.
    Saturation,
}

impl LambdaCriterion {
    /// Break-even for TDMA. In CDMA open access beats closed access for
    /// every split, so break-even is trivially the smallest grid point; the
    /// informative threshold there is where the rate stops depending on the
    /// split.
    pub fn default_for(scheme: Scheme) -> Self {
        match scheme {
            Scheme::Tdma => LambdaCriterion::BreakEven,
            Scheme::Cdma => LambdaCriterion::Saturation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaStar {
    pub lambda: f64,
    pub criterion: LambdaCriterion,
    pub n: usize,
    pub k: usize,
    pub scheme: Scheme,
    pub closed_c0: f64,
    pub open_c0: f64,
}

/// Home-user rates as a function of `lambda` at one load, with the split
/// `lambda_L = lambda`, `mu_L = (1 - lambda)/L`.
struct SplitEvaluator<'a> {
    cfg: &'a NetworkConfig,
    n: usize,
    k: usize,
    scheme: Scheme,
    opts: McOptions,
}

impl SplitEvaluator<'_> {
    fn open_c0(&self, lambda: f64) -> Result<f64> {
        let p = AllocationPolicy::fixed_lambda(self.k, lambda);
        if self.scheme == Scheme::Tdma && self.k == 1 {
            return Ok(open_access_tdma_k1(self.cfg, &p, self.n)?.report.c0);
        }
        Ok(estimate(self.cfg, &p, self.n, self.scheme, Access::Open, &self.opts)?.report.c0)
    }

    fn closed_c0(&self) -> Result<f64> {
        if self.scheme == Scheme::Tdma {
            return Ok(closed_access_tdma(self.cfg, self.n)?.c0);
        }
        let p = AllocationPolicy::fixed_lambda(0, 1.0);
        Ok(estimate(self.cfg, &p, self.n, self.scheme, Access::Closed, &self.opts)?.report.c0)
    }
}

/// Smallest `lambda` on the grid `step, 2 step, ..., 1` meeting `criterion`,
/// refined by bisection against the previous grid point.
pub fn lambda_star_with(
    cfg: &NetworkConfig,
    n: usize,
    scheme: Scheme,
    k: usize,
    opts: &McOptions,
    grid_step: f64,
    criterion: LambdaCriterion,
) -> Result<LambdaStar> {
    if !(grid_step > 0.0 && grid_step <= 0.05) {
        return Err(invalid_arg(format!("grid step must lie in (0, 0.05], got {grid_step}")));
    }
    if k == 0 || n <= k {
        return Err(invalid_arg(format!("need N > K >= 1, got N = {n}, K = {k}")));
    }
    cfg.validate()?;
    let ev = SplitEvaluator { cfg, n, k, scheme, opts: *opts };
    let closed = ev.closed_c0()?;
    let reference = match criterion {
        LambdaCriterion::BreakEven => closed,
        LambdaCriterion::Saturation => ev.open_c0(1.0)?,
    };
    let meets = |c0: f64| match criterion {
        LambdaCriterion::BreakEven => c0 >= reference,
        LambdaCriterion::Saturation => (c0 - reference).abs() <= SATURATION_RTOL * reference.abs(),
    };
    let steps = (1.0 / grid_step).round() as usize;
    let grid = |j: usize| j as f64 / steps as f64;
    let mut found = None;
    for j in 1..=steps {
        let c0 = ev.open_c0(grid(j))?;
        if meets(c0) {
            found = Some((j, c0));
            break;
        }
    }
    let (j, c0_at) = found.ok_or(Error::NeverBeneficial { n })?;
    let (mut lo, mut hi, mut c0_hi) = (grid(j - 1), grid(j), c0_at);
    if j > 1 {
        while hi - lo > LAMBDA_TOL {
            let mid = 0.5 * (lo + hi);
            let c0 = ev.open_c0(mid)?;
            if meets(c0) {
                hi = mid;
                c0_hi = c0;
            } else {
                lo = mid;
            }
        }
    }
    Ok(LambdaStar { lambda: hi, criterion, n, k, scheme, closed_c0: closed, open_c0: c0_hi })
}

/// [`lambda_star_with`] using the scheme's default criterion.
pub fn lambda_star(
    cfg: &NetworkConfig,
    n: usize,
    scheme: Scheme,
    k: usize,
    opts: &McOptions,
    grid_step: f64,
) -> Result<LambdaStar> {
    lambda_star_with(cfg, n, scheme, k, opts, grid_step, LambdaCriterion::default_for(scheme))
}

const LAMBDA_STAR_COLUMNS: [&str; 9] =
    ["scheme", "n", "k", "c_b", "lambda_star", "backhaul_floor", "criterion", "closed_c0", "status"];

fn lambda_star_row(
    cfg: &NetworkConfig,
    n: usize,
    scheme: Scheme,
    k: usize,
    res: Result<LambdaStar>,
) -> Result<Vec<Cell>> {
    let floor = (cfg.rate / cfg.backhaul).min(1.0);
    let crit = format!("{:?}", LambdaCriterion::default_for(scheme)).to_lowercase();
    let head: Vec<Cell> = vec![scheme.to_string().into(), n.into(), k.into(), cfg.backhaul.into()];
    let tail: Vec<Cell> = match res {
        Ok(s) => vec![s.lambda.into(), floor.into(), crit.into(), s.closed_c0.into(), "ok".into()],
        Err(Error::NeverBeneficial { .. }) => {
            vec![Cell::Empty, floor.into(), crit.into(), Cell::Empty, "never_beneficial".into()]
        }
        Err(e) => return Err(e),
    };
    Ok(head.into_iter().chain(tail).collect())
}

/// `lambda*` at each load in `ns`.
pub fn lambda_star_vs_density(
    cfg: &NetworkConfig,
    ns: &[usize],
    scheme: Scheme,
    k: usize,
    opts: &McOptions,
    grid_step: f64,
) -> Result<Table> {
    if ns.is_empty() {
        return Err(invalid_arg("empty N list"));
    }
    let mut t = Table::new(LAMBDA_STAR_COLUMNS);
    for &n in ns {
        let res = lambda_star(cfg, n, scheme, k, opts, grid_step);
        t.push(lambda_star_row(cfg, n, scheme, k, res)?);
    }
    Ok(t)
}

/// `lambda*` for each backhaul capacity, with the floor `C / C_b` below
/// which the home user's backhaul share cannot carry its rate.
pub fn lambda_star_vs_backhaul(
    cfg: &NetworkConfig,
    n: usize,
    scheme: Scheme,
    k: usize,
    cb_values: &[f64],
    opts: &McOptions,
    grid_step: f64,
) -> Result<Table> {
    if cb_values.is_empty() {
        return Err(invalid_arg("empty backhaul list"));
    }
    if let Some(c) = cb_values.iter().find(|c| !(**c > 0.0)) {
        return Err(invalid_arg(format!("backhaul values must be positive, got {c}")));
    }
    let mut t = Table::new(LAMBDA_STAR_COLUMNS);
    for &cb in cb_values {
        let mut c = *cfg;
        c.backhaul = cb;
        let res = lambda_star(&c, n, scheme, k, opts, grid_step);
        t.push(lambda_star_row(&c, n, scheme, k, res)?);
    }
    Ok(t)
}

/// Open- and closed-access rates across a `lambda` grid at one load.
pub fn sweep_lambda(
    cfg: &NetworkConfig,
    n: usize,
    scheme: Scheme,
    k: usize,
    lambdas: &[f64],
    opts: &McOptions,
) -> Result<Table> {
    if lambdas.is_empty() {
        return Err(invalid_arg("empty lambda grid"));
    }
    let mut t = Table::new([
        "scheme",
        "n",
        "k",
        "lambda",
        "c0_open",
        "se_c0_open",
        "c0_open_exact",
        "csum_open",
        "se_csum_open",
        "c0_closed",
        "se_c0_closed",
        "csum_closed",
    ]);
    let closed = estimate(cfg, &AllocationPolicy::fixed_lambda(0, 1.0), n, scheme, Access::Closed, opts)?.report;
    for &lam in lambdas {
        let p = AllocationPolicy::fixed_lambda(k, lam);
        let open = estimate(cfg, &p, n, scheme, Access::Open, opts)?.report;
        let exact =
            if scheme == Scheme::Tdma && k == 1 { Some(open_access_tdma_k1(cfg, &p, n)?.report.c0) } else { None };
        t.push(vec![
            scheme.to_string().into(),
            n.into(),
            k.into(),
            lam.into(),
            open.c0.into(),
            open.se_c0.into(),
            exact.into(),
            open.csum.into(),
            open.se_csum.into(),
            closed.c0.into(),
            closed.se_c0.into(),
            closed.csum.into(),
        ]);
    }
    Ok(t)
}

// ---------------------------------------------------------------------------
// Decision table

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Preference {
    Open,
    Closed,
    Indifferent,
}

impl Preference {
    pub fn label(&self) -> &'static str {
        match self {
            Preference::Open => "open",
            Preference::Closed => "closed",
            Preference::Indifferent => "indifferent",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Density {
    Low,
    Medium,
    High,
}

impl Density {
    pub fn label(&self) -> &'static str {
        match self {
            Density::Low => "low",
            Density::Medium => "medium",
            Density::High => "high",
        }
    }
}

/// Owner dead band, relative to the closed-access home rate.
pub const OWNER_MARGIN: f64 = 0.03;
/// Operator dead band, relative to the full load `N C`.
pub const OPERATOR_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecisionRow {
    pub scheme: Scheme,
    pub density: Density,
    pub n: usize,
    pub n_closed: usize,
    pub n_open: usize,
    pub c0_open: f64,
    pub se_c0_open: f64,
    pub c0_closed: f64,
    pub se_c0_closed: f64,
    pub csum_open: f64,
    pub se_csum_open: f64,
    pub csum_closed: f64,
    pub se_csum_closed: f64,
    pub owner: Preference,
    pub operator: Preference,
}

/// The owner takes open access only for a clear gain: more than two
/// standard errors and more than [`OWNER_MARGIN`] of the closed-access
/// rate. Otherwise it keeps its femtocell private.
pub fn owner_preference(open: f64, se_open: f64, closed: f64, se_closed: f64) -> Preference {
    let band = (2.0 * se_open.hypot(se_closed)).max(OWNER_MARGIN * closed);
    if open - closed > band && open > 0.0 {
        Preference::Open
    } else {
        Preference::Closed
    }
}

/// The operator is indifferent unless the sum throughputs differ by more
/// than two standard errors and [`OPERATOR_MARGIN`] of the full load `N C`.
pub fn operator_preference(open: f64, se_open: f64, closed: f64, se_closed: f64, full_load: f64) -> Preference {
    let band = (2.0 * se_open.hypot(se_closed)).max(OPERATOR_MARGIN * full_load);
    if open - closed > band {
        Preference::Open
    } else if closed - open > band {
        Preference::Closed
    } else {
        Preference::Indifferent
    }
}

/// Representative loads for the three density regimes.
pub fn representative_loads(n_closed: usize, n_open: usize) -> [(Density, usize); 3] {
    let low = n_closed.div_ceil(2).max(1);
    let medium = (n_closed + n_open).div_ceil(2).max(n_closed + 1);
    let high = (2 * n_open).max(medium + 1);
    [(Density::Low, low), (Density::Medium, medium), (Density::High, high)]
}

/// Classifies low, medium and high load for both schemes from each party's
/// point of view, with the proportional split and at most `k` handoffs.
pub fn decision_table(cfg: &NetworkConfig, k: usize, opts: &McOptions) -> Result<Vec<DecisionRow>> {
    if k == 0 {
        return Err(invalid_arg("the decision table needs K >= 1"));
    }
    cfg.validate()?;
    let policy = AllocationPolicy::proportional(k);
    let mut rows = Vec::new();
    for scheme in [Scheme::Tdma, Scheme::Cdma] {
        let n_closed = match scheme {
            Scheme::Tdma => cutoff_closed_tdma(cfg),
            Scheme::Cdma => cutoff_closed_cdma(cfg),
        };
        let n_max = 4 * (n_closed + k) + 50;
        let n_open = find_open_cutoff(cfg, &policy, scheme, DEFAULT_CUTOFF_EPS, n_max, opts)?.n_open;
        for (density, n) in representative_loads(n_closed, n_open) {
            let open = estimate(cfg, &policy, n, scheme, Access::Open, opts)?.report;
            let closed = estimate(cfg, &policy, n, scheme, Access::Closed, opts)?.report;
            rows.push(DecisionRow {
                scheme,
                density,
                n,
                n_closed,
                n_open,
                c0_open: open.c0,
                se_c0_open: open.se_c0,
                c0_closed: closed.c0,
                se_c0_closed: closed.se_c0,
                csum_open: open.csum,
                se_csum_open: open.se_csum,
                csum_closed: closed.csum,
                se_csum_closed: closed.se_csum,
                owner: owner_preference(open.c0, open.se_c0, closed.c0, closed.se_c0),
                operator: operator_preference(
                    open.csum,
                    open.se_csum,
                    closed.csum,
                    closed.se_csum,
                    n as f64 * cfg.rate,
                ),
            });
        }
    }
    Ok(rows)
}

pub fn decision_rows_to_table(rows: &[DecisionRow]) -> Table {
    let mut t = Table::new([
        "scheme",
        "density",
        "n",
        "n_closed",
        "n_open",
        "c0_open",
        "se_c0_open",
        "c0_closed",
        "se_c0_closed",
        "csum_open",
        "se_csum_open",
        "csum_closed",
        "se_csum_closed",
        "owner",
        "operator",
    ]);
    for r in rows {
        t.push(vec![
            r.scheme.to_string().into(),
            r.density.label().into(),
            r.n.into(),
            r.n_closed.into(),
            r.n_open.into(),
            r.c0_open.into(),
            r.se_c0_open.into(),
            r.c0_closed.into(),
            r.se_c0_closed.into(),
            r.csum_open.into(),
            r.se_csum_open.into(),
            r.csum_closed.into(),
            r.se_csum_closed.into(),
            r.owner.label().into(),
            r.operator.label().into(),
        ]);
    }
    t
}

// ---------------------------------------------------------------------------
// Figure presets

/// Canned experiments, numbered like the figures they regenerate.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Preset {
    Density { spec: SweepSpec },
    LambdaStarVsDensity { scheme: Scheme, ns: Vec<usize>, k: usize, reps: u64, seed: u64 },
    LambdaSweep { scheme: Scheme, n: usize, k: usize, lambdas: Vec<f64>, reps: u64, seed: u64 },
    LambdaStarVsBackhaul { scheme: Scheme, n: usize, k: usize, cb: Vec<f64>, reps: u64, seed: u64 },
}

pub fn figure_preset(fig: u8, reps: u64, seed: u64) -> Result<Preset> {
    let lambdas: Vec<f64> = (1..=20).map(|j| j as f64 / 20.0).collect();
    Ok(match fig {
        1 => Preset::Density { spec: SweepSpec::density(Scheme::Tdma, 5, 70, 1, vec![1, 3], reps, seed) },
        2 => Preset::Density { spec: SweepSpec::density(Scheme::Tdma, 5, 120, 5, vec![1, 3], reps, seed) },
        3 => Preset::LambdaStarVsDensity {
            scheme: Scheme::Tdma,
            ns: (1..=12).map(|j| 5 * j).collect(),
            k: 1,
            reps,
            seed,
        },
        4 => Preset::LambdaSweep { scheme: Scheme::Tdma, n: 30, k: 1, lambdas, reps, seed },
        5 => Preset::LambdaStarVsBackhaul {
            scheme: Scheme::Tdma,
            n: 30,
            k: 1,
            cb: vec![0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0],
            reps,
            seed,
        },
        6 => Preset::Density { spec: SweepSpec::density(Scheme::Cdma, 20, 220, 20, vec![1, 3], reps, seed) },
        7 => Preset::Density { spec: SweepSpec::density(Scheme::Cdma, 20, 220, 10, vec![1], reps, seed) },
        _ => return Err(invalid_arg(format!("no preset for figure {fig}; choose 1 to 7"))),
    })
}

pub fn run_preset(preset: &Preset, cfg: &NetworkConfig) -> Result<Table> {
    match preset {
        Preset::Density { spec } => sweep_density(spec, cfg, &AllocationPolicy::proportional(0)),
        Preset::LambdaStarVsDensity { scheme, ns, k, reps, seed } => {
            lambda_star_vs_density(cfg, ns, *scheme, *k, &McOptions { reps: *reps, seed: *seed }, DEFAULT_GRID_STEP)
        }
        Preset::LambdaSweep { scheme, n, k, lambdas, reps, seed } => {
            sweep_lambda(cfg, *n, *scheme, *k, lambdas, &McOptions { reps: *reps, seed: *seed })
        }
        Preset::LambdaStarVsBackhaul { scheme, n, k, cb, reps, seed } => lambda_star_vs_backhaul(
            cfg,
            *n,
            *scheme,
            *k,
            cb,
            &McOptions { reps: *reps, seed: *seed },
            DEFAULT_GRID_STEP,
        ),
    }
}
