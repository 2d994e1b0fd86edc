//! Simulation of the handoff procedure and per-drop success evaluation.
//!
//! Each replication drops `N` users, runs the sequential handoff of the
//! strongest interferers, and evaluates the conditional success
//! probabilities of every population given that drop. Slot scheduling is
//! averaged exactly rather than sampled.

use serde::Serialize;

use crate::analytic::Estimate;
use crate::cdma::{cutoff_closed_cdma, sir_targets_cdma};
use crate::engine::{run_blocks, Moments, MIN_REPS};
use crate::error::{invalid_arg, Error, Result};
use crate::model::{home_interference_factor, sample_sorted_factors, InterferenceRealization, NetworkConfig};
use crate::policy::AllocationPolicy;
use crate::rates::{Access, RateReport, Scheme, SirTargets};
use crate::rng::{Stream, DEFAULT_SEED};
use crate::tdma::{cutoff_closed_tdma, sir_targets_tdma};

/// Tag separating the per-`N` replication streams from other consumers of
/// the master seed.
const ESTIMATE_TAG: u64 = 0xE5_71_4A_7E;

/// Result of the handoff procedure on one drop.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccessOutcome {
    /// Number of handed-off users.
    pub l: usize,
    /// 1-based ranks of the handed-off users: `N, N-1, ..., N-L+1`.
    pub served_ranks: Vec<usize>,
    /// Original user indices of the handed-off users (empty when the drop
    /// was built without positions).
    pub served_users: Vec<usize>,
}

/// Conditional success contributions and rates of one drop.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Contribution {
    /// Home-user success probability.
    pub s_f: f64,
    /// Sum over handed-off users of their success probabilities.
    pub s_h: f64,
    /// Sum over macrocell users of their success probabilities.
    pub s_c: f64,
    pub c0: f64,
    pub csum: f64,
    pub csum_macro: f64,
}

/// Replication budget and master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct McOptions {
    pub reps: u64,
    pub seed: u64,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions { reps: 100_000, seed: DEFAULT_SEED }
    }
}

/// `P(A_L)` for `L = 0..=K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventDistribution {
    pub probs: Vec<Estimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McResult {
    pub report: RateReport,
    pub events: EventDistribution,
}

/// Per-level targets and shares, precomputed once per `(N, policy)`.
struct Levels {
    targets: Vec<SirTargets>,
    lambda: Vec<f64>,
    mu: Vec<f64>,
    k: usize,
    n: usize,
    i0: f64,
    scheme: Scheme,
}

impl Levels {
    fn new(cfg: &NetworkConfig, policy: &AllocationPolicy, n: usize, scheme: Scheme) -> Result<Self> {
        if n <= policy.k {
            return Err(invalid_arg(format!("need N > K, got N = {n}, K = {}", policy.k)));
        }
        cfg.validate()?;
        policy.validate(n)?;
        let targets = (0..=policy.k)
            .map(|l| match scheme {
                Scheme::Tdma => sir_targets_tdma(cfg, policy, l, n),
                Scheme::Cdma => sir_targets_cdma(cfg, policy, l, n),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Levels {
            targets,
            lambda: (0..=policy.k).map(|l| policy.lambda(l, n)).collect(),
            mu: (0..=policy.k).map(|l| policy.mu(l, n)).collect(),
            k: policy.k,
            n,
            i0: home_interference_factor(cfg),
            scheme,
        })
    }
}

/// Prefix sums `p[m] = I_(1) + ... + I_(m)`.
fn prefix_sums(ordered: &[f64], out: &mut Vec<f64>) {
    out.clear();
    out.push(0.0);
    let mut acc = 0.0;
    for &x in ordered {
        acc += x;
        out.push(acc);
    }
}

/// Handoff level for a sorted drop.
fn handoff_level(cfg: &NetworkConfig, lv: &Levels, ordered: &[f64], prefix: &[f64]) -> usize {
    let (pf, pc, n) = (cfg.p_femto, cfg.p_macro, lv.n);
    let mut l = 0;
    while l < lv.k {
        let g = lv.targets[l].gamma_f;
        let outage = match lv.scheme {
            Scheme::Tdma => pf / (pc * ordered[n - 1 - l]) < g,
            Scheme::Cdma => pf / (l as f64 * pf + pc * prefix[n - l]) < g,
        };
        if !outage {
            break;
        }
        l += 1;
    }
    l
}

fn contribution(cfg: &NetworkConfig, lv: &Levels, ordered: &[f64], prefix: &[f64], l: usize) -> Contribution {
    let (pf, pc, n) = (cfg.p_femto, cfg.p_macro, lv.n);
    let t = lv.targets[l];
    let (lam, mu) = (lv.lambda[l], lv.mu[l]);
    let remaining = &ordered[..n - l];
    let served = &ordered[n - l..];
    let (s_f, s_h, s_c) = match lv.scheme {
        Scheme::Tdma => {
            // Fraction of macrocell slots in which a femtocell user with
            // target g survives; `remaining` is ascending so this is a prefix.
            let slot_share =
                |g: f64| remaining.partition_point(|&x| pf / (pc * x) >= g) as f64 / remaining.len() as f64;
            let s_f = if l < lv.k { 1.0 } else { slot_share(t.gamma_f) };
            let s_h = if l == 0 || mu == 0.0 { 0.0 } else { l as f64 * slot_share(t.gamma_h) };
            let home_ok = (lv.i0 * pc / pf >= t.gamma_c) as u8 as f64;
            let served_ok = served.iter().filter(|&&x| pc * x / pf >= t.gamma_c).count() as f64;
            let s_c = (n - l) as f64 * (lam * home_ok + mu * served_ok);
            (s_f, s_h, s_c)
        }
        Scheme::Cdma => {
            let macro_interf = prefix[n - l];
            let s_f = if l < lv.k { 1.0 } else { (pf / (l as f64 * pf + pc * macro_interf) >= t.gamma_f) as u8 as f64 };
            let s_h = if l == 0 || mu == 0.0 {
                0.0
            } else {
                l as f64 * ((pf / (pc * macro_interf + l as f64 * pf) >= t.gamma_h) as u8 as f64)
            };
            let femto_interf = pf / lv.i0 + served.iter().map(|&x| pf / x).sum::<f64>();
            let macro_sir = pc / ((n - l - 1) as f64 * pc + femto_interf);
            let s_c = (n - l) as f64 * ((macro_sir >= t.gamma_c) as u8 as f64);
            (s_f, s_h, s_c)
        }
    };
    let c0 = cfg.femto_rate(lam) * s_f;
    let csum_macro = cfg.rate * s_c;
    let csum = csum_macro + cfg.femto_rate(mu) * s_h;
    Contribution { s_f, s_h, s_c, c0, csum, csum_macro }
}

/// Runs the sequential handoff on one drop: while the home user is in
/// outage and fewer than `K` users are served, hand off the strongest
/// remaining interferer.
pub fn handoff(
    real: &InterferenceRealization,
    cfg: &NetworkConfig,
    policy: &AllocationPolicy,
    scheme: Scheme,
) -> Result<AccessOutcome> {
    let n = real.len();
    let lv = Levels::new(cfg, policy, n, scheme)?;
    let mut prefix = Vec::with_capacity(n + 1);
    prefix_sums(real.ordered(), &mut prefix);
    let l = handoff_level(cfg, &lv, real.ordered(), &prefix);
    let served_ranks: Vec<usize> = (0..l).map(|j| n - j).collect();
    let served_users = if real.positions().is_empty() {
        Vec::new()
    } else {
        served_ranks.iter().map(|&r| real.perm()[r - 1]).collect()
    };
    Ok(AccessOutcome { l, served_ranks, served_users })
}

fn rates_for(
    real: &InterferenceRealization,
    outcome: &AccessOutcome,
    cfg: &NetworkConfig,
    policy: &AllocationPolicy,
    scheme: Scheme,
) -> Result<Contribution> {
    let n = real.len();
    if outcome.l >= n {
        return Err(invalid_arg("every user handed off: no macrocell users left"));
    }
    if outcome.l > policy.k {
        return Err(invalid_arg(format!("outcome serves {} users but K = {}", outcome.l, policy.k)));
    }
    let mut lv = Levels::new(cfg, policy, n, scheme)?;
    lv.i0 = real.i0();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix_sums(real.ordered(), &mut prefix);
    Ok(contribution(cfg, &lv, real.ordered(), &prefix, outcome.l))
}

/// Conditional TDMA success contributions for a drop and its handoff outcome.
pub fn rates_tdma(
    real: &InterferenceRealization,
    outcome: &AccessOutcome,
    cfg: &NetworkConfig,
    policy: &AllocationPolicy,
) -> Result<Contribution> {
    rates_for(real, outcome, cfg, policy, Scheme::Tdma)
}

/// Deterministic CDMA success indicators for a drop and its handoff outcome.
pub fn rates_cdma(
    real: &InterferenceRealization,
    outcome: &AccessOutcome,
    cfg: &NetworkConfig,
    policy: &AllocationPolicy,
) -> Result<Contribution> {
    rates_for(real, outcome, cfg, policy, Scheme::Cdma)
}

#[derive(Clone)]
struct Acc {
    c0: Moments,
    csum: Moments,
    csum_macro: Moments,
    events: Vec<u64>,
}

impl Acc {
    fn new(k: usize) -> Self {
        Acc { c0: Moments::default(), csum: Moments::default(), csum_macro: Moments::default(), events: vec![0; k + 1] }
    }

    fn merge(mut self, o: Acc) -> Acc {
        self.c0 = self.c0.merge(o.c0);
        self.csum = self.csum.merge(o.csum);
        self.csum_macro = self.csum_macro.merge(o.csum_macro);
        for (a, b) in self.events.iter_mut().zip(o.events) {
            *a += b;
        }
        self
    }
}

/// Stream feeding the drops at load `n`. Independent of scheme, access mode
/// and policy, so comparisons at the same `N` share their drops.
pub fn drop_stream(seed: u64, n: usize) -> Stream {
    Stream::new(seed).derive_all(&[ESTIMATE_TAG, n as u64])
}

/// Monte Carlo ergodic rates. Closed access runs the same procedure with
/// `K = 0`.
pub fn estimate(
    cfg: &NetworkConfig,
    policy: &AllocationPolicy,
    n: usize,
    scheme: Scheme,
    access: Access,
    opts: &McOptions,
) -> Result<McResult> {
    if opts.reps < MIN_REPS {
        return Err(invalid_arg(format!("reps must be at least {MIN_REPS}, got {}", opts.reps)));
    }
    if n == 0 {
        return Err(invalid_arg("N must be at least 1"));
    }
    let policy = match access {
        Access::Open => policy.clone(),
        Access::Closed => policy.with_k(0)?,
    };
    let lv = Levels::new(cfg, &policy, n, scheme)?;
    let stream = drop_stream(opts.seed, n);
    let acc = run_blocks(
        opts.reps,
        |range| {
            let mut acc = Acc::new(lv.k);
            let mut ordered = Vec::with_capacity(n);
            let mut prefix = Vec::with_capacity(n + 1);
            for rep in range {
                sample_sorted_factors(n, cfg, &mut stream.rng(rep), &mut ordered);
                prefix_sums(&ordered, &mut prefix);
                let l = handoff_level(cfg, &lv, &ordered, &prefix);
                let c = contribution(cfg, &lv, &ordered, &prefix, l);
                acc.events[l] += 1;
                acc.c0.push(c.c0);
                acc.csum.push(c.csum);
                acc.csum_macro.push(c.csum_macro);
            }
            acc
        },
        Acc::merge,
    )
    .unwrap_or_else(|| Acc::new(lv.k));
    let report = RateReport {
        c0: acc.c0.mean(),
        csum: acc.csum.mean(),
        csum_macro: acc.csum_macro.mean(),
        se_c0: acc.c0.std_error(),
        se_csum: acc.csum.std_error(),
        se_csum_macro: acc.csum_macro.std_error(),
        n,
        k: lv.k,
        scheme,
        access,
    };
    let probs = acc.events.iter().map(|&h| Estimate::proportion(h, opts.reps)).collect();
    Ok(McResult { report, events: EventDistribution { probs } })
}

/// Open-access cutoff search result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OpenCutoff {
    /// Largest load before the per-user macrocell throughput collapses.
    pub n_open: usize,
    /// Closed-access cutoff of the same scheme.
    pub n_closed: usize,
    /// `n_open <= n_closed + K`.
    pub within_bound: bool,
}

/// Default collapse threshold for [`find_open_cutoff`], as a fraction of `C`.
pub const DEFAULT_CUTOFF_EPS: f64 = 1e-2;

/// Scans `N = K+1, K+2, ...` and returns the last load before the
/// macrocell users' mean throughput `csum_macro / N` falls below `eps * C`.
/// Throughput of the handed-off users is excluded: it does not vanish with
/// load and would otherwise hide the collapse.
pub fn find_open_cutoff(
    cfg: &NetworkConfig,
    policy: &AllocationPolicy,
    scheme: Scheme,
    eps: f64,
    n_max: usize,
    opts: &McOptions,
) -> Result<OpenCutoff> {
    if !(eps > 0.0) {
        return Err(invalid_arg(format!("eps must be positive, got {eps}")));
    }
    let n_closed = match scheme {
        Scheme::Tdma => cutoff_closed_tdma(cfg),
        Scheme::Cdma => cutoff_closed_cdma(cfg),
    };
    for n in policy.k + 1..=n_max {
        let r = estimate(cfg, policy, n, scheme, Access::Open, opts)?.report;
        if r.csum_macro / (n as f64) < eps * cfg.rate {
            let n_open = n - 1;
            return Ok(OpenCutoff { n_open, n_closed, within_bound: n_open <= n_closed + policy.k });
        }
    }
    Err(Error::CutoffExceedsLimit { n_max })
}
