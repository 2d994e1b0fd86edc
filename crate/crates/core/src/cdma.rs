//! Non-orthogonal access (CDMA): interference adds up across users.

use serde::Serialize;

use crate::analytic::{order_tail_at, CdfSegments, Estimate, SumCdfEstimator};
use crate::error::{invalid_arg, Result};
use crate::model::{home_interference_factor, NetworkConfig};
use crate::policy::AllocationPolicy;
use crate::rates::{pow2m1, Access, RateReport, Scheme, SirTargets};

/// SIR targets at handoff level `l` with `n` cellular users.
pub fn sir_targets_cdma(cfg: &NetworkConfig, policy: &AllocationPolicy, l: usize, n: usize) -> Result<SirTargets> {
    if l > n {
        return Err(invalid_arg(format!("level L = {l} exceeds N = {n}")));
    }
    if l > policy.k {
        return Err(invalid_arg(format!("level L = {l} exceeds K = {}", policy.k)));
    }
    let g = cfg.spreading;
    Ok(SirTargets {
        gamma_f: pow2m1(cfg.femto_rate(policy.lambda(l, n))) / g,
        gamma_h: pow2m1(cfg.femto_rate(policy.mu(l, n))) / g,
        gamma_c: pow2m1(cfg.rate) / g,
        scheme: Scheme::Cdma,
    })
}

/// Closed-access macrocell SIR `P_c / (P_f/I_0 + (N-1) P_c)`.
fn closed_macro_sir(cfg: &NetworkConfig, n: usize) -> f64 {
    cfg.p_macro / (cfg.p_femto / home_interference_factor(cfg) + (n as f64 - 1.0) * cfg.p_macro)
}

/// Closed access, with the dominant-interferer upper bound on `c0` alongside
/// the Monte Carlo value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedCdma {
    pub report: RateReport,
    /// `min(C, C_b) F_I^N(t_0)`.
    pub c0_upper: f64,
}

pub fn closed_access_cdma(cfg: &NetworkConfig, n: usize, gi: &SumCdfEstimator) -> Result<ClosedCdma> {
    if n == 0 {
        return Err(invalid_arg("N must be at least 1"));
    }
    cfg.validate()?;
    let t = sir_targets_cdma(cfg, &AllocationPolicy::proportional(0), 0, n)?;
    let t0 = cfg.p_femto / (cfg.p_macro * t.gamma_f);
    let rate = cfg.femto_rate(1.0);
    let g = gi.eval(n as u32, t0);
    let ok = closed_macro_sir(cfg, n) >= t.gamma_c;
    let csum = if ok { n as f64 * cfg.rate } else { 0.0 };
    let mut report = RateReport::exact(rate * g.value, csum, csum, n, 0, Scheme::Cdma, Access::Closed);
    report.se_c0 = rate * g.std_error;
    let c0_upper = rate * CdfSegments::new(cfg).cdf(t0).powi(n as i32);
    Ok(ClosedCdma { report, c0_upper })
}

/// Largest `N` whose closed-access macrocell SIR meets the per-user target
/// `(2^C - 1)/G`.
pub fn cutoff_closed_cdma(cfg: &NetworkConfig) -> usize {
    let gamma = pow2m1(cfg.rate) / cfg.spreading;
    let i0 = home_interference_factor(cfg);
    let guess = 1.0 + (cfg.p_macro / gamma - cfg.p_femto / i0) / cfg.p_macro;
    let mut n = guess.floor().max(0.0) as usize;
    // Settle rounding at the boundary against the inequality itself.
    while closed_macro_sir(cfg, n + 1) >= gamma {
        n += 1;
    }
    while n > 0 && closed_macro_sir(cfg, n) < gamma {
        n -= 1;
    }
    n
}

/// Cutoff when the macrocell target is scaled with the load as
/// `(2^(N C) - 1)/G`. Kept for comparison; not the reference definition.
pub fn cutoff_closed_cdma_rate_scaled(cfg: &NetworkConfig) -> usize {
    let mut n = 0;
    while n < 1_000_000 && pow2m1((n + 1) as f64 * cfg.rate) / cfg.spreading <= closed_macro_sir(cfg, n + 1) {
        n += 1;
    }
    n
}

/// Propagates independent standard errors through `sum_j w_j x_j`.
fn weighted_sum(terms: &[(f64, Estimate)]) -> Estimate {
    let value = terms.iter().map(|(w, e)| w * e.value).sum();
    let var: f64 = terms.iter().map(|(w, e)| (w * e.std_error).powi(2)).sum();
    Estimate { value, std_error: var.sqrt() }
}

/// Lower bound on the open-access home-user rate for general `K`.
pub fn home_rate_lower_bound_cdma(
    cfg: &NetworkConfig,
    policy: &AllocationPolicy,
    n: usize,
    gi: &SumCdfEstimator,
) -> Result<Estimate> {
    if policy.k == 0 || n <= policy.k {
        return Err(invalid_arg(format!("need N > K >= 1, got N = {n}, K = {}", policy.k)));
    }
    cfg.validate()?;
    policy.validate(n)?;
    let seg = CdfSegments::new(cfg);
    let ratio = cfg.p_femto / cfg.p_macro;
    let t0 = sir_targets_cdma(cfg, policy, 0, n)?;
    let mut terms = vec![(cfg.femto_rate(1.0), gi.eval(n as u32, ratio / t0.gamma_f))];
    let mut prev_gamma = t0.gamma_f;
    for l in 1..=policy.k {
        let t = sir_targets_cdma(cfg, policy, l, n)?;
        let x = seg.cdf(ratio / prev_gamma);
        let tail = order_tail_at(n as u64, l as u64, x)?;
        let arg = if t.gamma_f > 0.0 { ratio * (1.0 / t.gamma_f - l as f64) } else { f64::INFINITY };
        let g = if arg > 0.0 { gi.eval((n - l) as u32, arg) } else { Estimate::exact(0.0) };
        let factor = Estimate { value: tail * g.value, std_error: tail * g.std_error };
        terms.push((cfg.femto_rate(policy.lambda(l, n)), factor));
        prev_gamma = t.gamma_f;
    }
    Ok(weighted_sum(&terms))
}

/// Lower bound on the single-handoff open-access sum throughput.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CsumBoundCdma {
    pub csum: Estimate,
    /// Part of `csum` earned by users left at the macrocell.
    pub csum_macro: Estimate,
    /// Bound on the handed-off user's success probability.
    pub p_h1: Estimate,
    /// Bound on each macrocell user's success probability after handoff.
    pub p_c1: f64,
    /// Set when the macrocell target is infeasible for every placement of
    /// the handed-off user, which zeroes the `p_c1` bound.
    pub degenerate: bool,
}

pub fn sum_throughput_lower_bound_cdma_k1(
    cfg: &NetworkConfig,
    policy: &AllocationPolicy,
    n: usize,
    gi: &SumCdfEstimator,
) -> Result<CsumBoundCdma> {
    if n < 2 {
        return Err(invalid_arg("the single-handoff bound needs N >= 2"));
    }
    if policy.k != 1 {
        return Err(invalid_arg(format!("the single-handoff bound needs K = 1, got {}", policy.k)));
    }
    cfg.validate()?;
    policy.validate(n)?;
    let seg = CdfSegments::new(cfg);
    let (pf, pc) = (cfg.p_femto, cfg.p_macro);
    let nf = n as f64;
    let i0 = home_interference_factor(cfg);
    let t0 = sir_targets_cdma(cfg, policy, 0, n)?;
    let t1 = sir_targets_cdma(cfg, policy, 1, n)?;
    let thr0 = pf / (pc * t0.gamma_f);
    let no_handoff = gi.eval(n as u32, thr0);
    let p_a1 = 1.0 - seg.cdf(thr0).powi(n as i32);

    let closed_ok = if closed_macro_sir(cfg, n) >= t0.gamma_c { 1.0 } else { 0.0 };

    let p_h1 = if t1.gamma_h >= 1.0 {
        Estimate::exact(0.0)
    } else {
        let arg = if t1.gamma_h > 0.0 { pf * (1.0 - t1.gamma_h) / (pc * t1.gamma_h) } else { f64::INFINITY };
        let g = gi.eval((n - 1) as u32, arg);
        Estimate { value: p_a1 * g.value, std_error: p_a1 * g.std_error }
    };

    let gc = t1.gamma_c;
    let denom = pc - (nf - 2.0) * pc * gc - pf * gc / i0;
    let degenerate = denom <= 0.0;
    let p_c1 = if degenerate {
        0.0
    } else {
        let y = (pf * gc / denom).max(thr0);
        (1.0 - seg.cdf(y).powi(n as i32)).clamp(0.0, 1.0)
    };

    let csum_macro =
        weighted_sum(&[(nf * cfg.rate * closed_ok, no_handoff), ((nf - 1.0) * cfg.rate, Estimate::exact(p_c1))]);
    let csum = weighted_sum(&[(1.0, csum_macro), (cfg.femto_rate(policy.mu(1, n)), p_h1)]);
    Ok(CsumBoundCdma { csum, csum_macro, p_h1, p_c1, degenerate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    const CFG: NetworkConfig = NetworkConfig::reference();

    fn gi() -> SumCdfEstimator {
        SumCdfEstimator::new(CFG, 20_000, Stream::new(9)).unwrap()
    }

    #[test]
    fn reference_targets() {
        let p = AllocationPolicy::proportional(1);
        let t = sir_targets_cdma(&CFG, &p, 0, 10).unwrap();
        assert!((t.gamma_f - 6.472e-3).abs() < 1e-6);
        assert_eq!(t.gamma_h, 0.0);
        let a = sir_targets_cdma(&CFG, &p, 1, 10).unwrap().gamma_c;
        let b = sir_targets_cdma(&CFG, &p, 0, 150).unwrap().gamma_c;
        assert_eq!(a, b);
        assert!((a - 0.0064721).abs() < 1e-7);
    }

    #[test]
    fn closed_access_indicator() {
        let est = gi();
        assert_eq!(closed_access_cdma(&CFG, 100, &est).unwrap().report.csum, 50.0);
        assert_eq!(closed_access_cdma(&CFG, 200, &est).unwrap().report.csum, 0.0);
        // One interferer: G_I(1, .) = F_I.
        let one = closed_access_cdma(&CFG, 1, &est).unwrap();
        let f = CdfSegments::new(&CFG)
            .cdf(1.0 / sir_targets_cdma(&CFG, &AllocationPolicy::proportional(0), 0, 1).unwrap().gamma_f);
        assert!((one.report.c0 - 0.5 * f).abs() < 3.0 * one.report.se_c0 + 1e-12);
        assert!((one.c0_upper - 0.5 * f).abs() < 1e-15);
    }

    #[test]
    fn closed_cutoff() {
        let n = cutoff_closed_cdma(&CFG);
        assert_eq!(n, 155);
        let est = gi();
        assert!(closed_access_cdma(&CFG, n, &est).unwrap().report.csum > 0.0);
        assert_eq!(closed_access_cdma(&CFG, n + 1, &est).unwrap().report.csum, 0.0);
        let mut g2 = CFG;
        g2.spreading *= 2.0;
        let n2 = cutoff_closed_cdma(&g2);
        assert!((n2 as f64 / n as f64 - 2.0).abs() < 0.02);
        let mut far = CFG;
        far.home_distance = 1e-6;
        assert_eq!(cutoff_closed_cdma(&far), (64.0 / (2f64.sqrt() - 1.0)) as usize + 1);
        assert_eq!(cutoff_closed_cdma_rate_scaled(&CFG), 7);
    }

    #[test]
    fn bounds_are_in_range() {
        let est = gi();
        let p = AllocationPolicy::proportional(1);
        for n in [20, 100, 170] {
            let h = home_rate_lower_bound_cdma(&CFG, &p, n, &est).unwrap();
            assert!((0.0..=0.5).contains(&h.value));
            let closed = closed_access_cdma(&CFG, n, &est).unwrap().report.c0;
            assert!(h.value >= closed);
            let s = sum_throughput_lower_bound_cdma_k1(&CFG, &p, n, &est).unwrap();
            assert!(s.csum.value >= 0.0 && s.csum.value <= n as f64 * 0.5);
            assert!((0.0..=1.0).contains(&s.p_c1));
            assert!((0.0..=1.0).contains(&s.p_h1.value));
        }
        assert!(home_rate_lower_bound_cdma(&CFG, &AllocationPolicy::proportional(0), 10, &est).is_err());
        assert!(home_rate_lower_bound_cdma(&CFG, &AllocationPolicy::proportional(3), 3, &est).is_err());
    }

    #[test]
    fn single_handoff_tail_reduction() {
        // With K = 1 the order-statistic factor is 1 - F^N.
        let n = 30u64;
        let x = 0.8;
        assert!((order_tail_at(n, 1, x).unwrap() - (1.0 - x.powi(30))).abs() < 1e-12);
    }

    #[test]
    fn infeasible_served_target_zeroes_bound() {
        // A served-user target of at least 1 cannot be met in CDMA.
        let mut cfg = CFG;
        cfg.spreading = 0.4;
        let p = AllocationPolicy::fixed_lambda(1, 0.0);
        let est = SumCdfEstimator::new(cfg, 1_000, Stream::new(1)).unwrap();
        let s = sum_throughput_lower_bound_cdma_k1(&cfg, &p, 10, &est).unwrap();
        assert_eq!(s.p_h1.value, 0.0);
    }

    #[test]
    fn degenerate_macro_bound_is_flagged() {
        let est = gi();
        let s = sum_throughput_lower_bound_cdma_k1(&CFG, &AllocationPolicy::proportional(1), 170, &est).unwrap();
        assert!(s.degenerate);
        assert_eq!(s.p_c1, 0.0);
        assert!(s.csum.value > 0.0);
        let s = sum_throughput_lower_bound_cdma_k1(&CFG, &AllocationPolicy::proportional(1), 50, &est).unwrap();
        assert!(!s.degenerate);
    }

    #[test]
    fn two_users_without_home_interference() {
        // I_0 -> infinity: y = max(P_f G_c / P_c, P_f / (P_c G_f0)).
        let mut cfg = CFG;
        cfg.home_distance = 1e-9;
        let est = SumCdfEstimator::new(cfg, 1_000, Stream::new(1)).unwrap();
        let p = AllocationPolicy::proportional(1);
        let s = sum_throughput_lower_bound_cdma_k1(&cfg, &p, 2, &est).unwrap();
        let t0 = sir_targets_cdma(&cfg, &p, 0, 2).unwrap();
        let y = t0.gamma_c.max(1.0 / t0.gamma_f);
        let expect = 1.0 - CdfSegments::new(&cfg).cdf(y).powi(2);
        assert!((s.p_c1 - expect).abs() < 1e-12);
    }
}
