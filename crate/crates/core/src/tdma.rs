//! Orthogonal multiple access (TDMA, or OFDMA per subband).
//!
//! Interference is time shared: in any slot the FAP sees one macrocell user
//! and the macrocell BS sees one femtocell user.

use serde::Serialize;

use crate::analytic::CdfSegments;
use crate::error::{invalid_arg, Result};
use crate::model::{home_interference_factor, NetworkConfig};
use crate::policy::AllocationPolicy;
use crate::rates::{pow2m1, Access, RateReport, Scheme, SirTargets};

/// `2^min(C/share, C_b) - 1`; a zero share hits the backhaul cap.
fn femto_target(cfg: &NetworkConfig, share: f64) -> f64 {
    let exponent = if share > 0.0 { (cfg.rate / share).min(cfg.backhaul) } else { cfg.backhaul };
    pow2m1(exponent)
}

/// SIR targets at handoff level `l` with `n` cellular users.
pub fn sir_targets_tdma(cfg: &NetworkConfig, policy: &AllocationPolicy, l: usize, n: usize) -> Result<SirTargets> {
    if l > n {
        return Err(invalid_arg(format!("level L = {l} exceeds N = {n}")));
    }
    if l > policy.k {
        return Err(invalid_arg(format!("level L = {l} exceeds K = {}", policy.k)));
    }
    Ok(SirTargets {
        gamma_f: femto_target(cfg, policy.lambda(l, n)),
        gamma_h: femto_target(cfg, policy.mu(l, n)),
        gamma_c: pow2m1((n - l) as f64 * cfg.rate),
        scheme: Scheme::Tdma,
    })
}

/// Largest interference factor a macrocell user may have without putting
/// the home user (target `gamma_f`) in outage during its slot.
pub(crate) fn fap_threshold(cfg: &NetworkConfig, gamma: f64) -> f64 {
    cfg.p_femto / (cfg.p_macro * gamma)
}

/// Whether the macrocell users meet `gamma_c` while the home user transmits.
pub(crate) fn macro_ok_vs_home(cfg: &NetworkConfig, i0: f64, gamma_c: f64) -> bool {
    i0 * cfg.p_macro / cfg.p_femto >= gamma_c
}

/// Closed access: the FAP serves only the home user.
pub fn closed_access_tdma(cfg: &NetworkConfig, n: usize) -> Result<RateReport> {
    if n == 0 {
        return Err(invalid_arg("N must be at least 1"));
    }
    cfg.validate()?;
    let closed = AllocationPolicy::proportional(0);
    let t = sir_targets_tdma(cfg, &closed, 0, n)?;
    let f = CdfSegments::new(cfg).cdf(fap_threshold(cfg, t.gamma_f));
    let c0 = cfg.femto_rate(1.0) * f;
    let ok = macro_ok_vs_home(cfg, home_interference_factor(cfg), t.gamma_c);
    let csum = if ok { n as f64 * cfg.rate } else { 0.0 };
    Ok(RateReport::exact(c0, csum, csum, n, 0, Scheme::Tdma, Access::Closed))
}

/// Largest `N` for which closed-access macrocell users meet their targets:
/// `floor(log2(1 + P_c I_0 / P_f) / C)`.
pub fn cutoff_closed_tdma(cfg: &NetworkConfig) -> usize {
    let i0 = home_interference_factor(cfg);
    let v = (cfg.p_macro * i0 / cfg.p_femto).ln_1p() / std::f64::consts::LN_2 / cfg.rate;
    v.floor().max(0.0) as usize
}

/// Event and success probabilities of the single-handoff closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TdmaK1Probabilities {
    /// `P(A_0) = F^N(t_0)`.
    pub p_a0: f64,
    /// `P(A_1) = 1 - F^N(t_0)`.
    pub p_a1: f64,
    pub p_f1: f64,
    pub p_h1: f64,
    /// Macrocell success indicator in `A_0`.
    pub p_c0: f64,
    pub p_c1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TdmaK1 {
    pub report: RateReport,
    pub probabilities: TdmaK1Probabilities,
}

/// Open access with at most one handed-off user, in closed form.
pub fn open_access_tdma_k1(cfg: &NetworkConfig, policy: &AllocationPolicy, n: usize) -> Result<TdmaK1> {
    if n < 2 {
        return Err(invalid_arg("the single-handoff closed form needs N >= 2"));
    }
    if policy.k != 1 {
        return Err(invalid_arg(format!("the single-handoff closed form needs K = 1, got {}", policy.k)));
    }
    cfg.validate()?;
    policy.validate(n)?;
    let seg = CdfSegments::new(cfg);
    let i0 = home_interference_factor(cfg);
    let nf = n as f64;
    let t0 = sir_targets_tdma(cfg, policy, 0, n)?;
    let t1 = sir_targets_tdma(cfg, policy, 1, n)?;

    let q = seg.cdf(fap_threshold(cfg, t0.gamma_f));
    let q_n = q.powi(n as i32);
    let q_n1 = q.powi(n as i32 - 1);
    let scale = nf / (nf - 1.0);

    let p_f1 = (scale * seg.cdf(fap_threshold(cfg, t1.gamma_f)) * (1.0 - q_n1)).clamp(0.0, 1.0);
    let p_h1 = (scale * seg.cdf(fap_threshold(cfg, t1.gamma_h)) * (1.0 - q_n1)).clamp(0.0, 1.0);
    let p_c0 = if macro_ok_vs_home(cfg, i0, t0.gamma_c) { 1.0 } else { 0.0 };
    let home_ok1 = if macro_ok_vs_home(cfg, i0, t1.gamma_c) { 1.0 } else { 0.0 };
    // The handed-off user succeeds towards the macrocell when I_(N) >= P_f Gamma_c / P_c.
    let served_ok = 1.0 - seg.cdf(cfg.p_femto * t1.gamma_c / cfg.p_macro).powi(n as i32);
    let (lam1, mu1) = (policy.lambda(1, n), policy.mu(1, n));
    let p_c1 = (lam1 * home_ok1 * (1.0 - q_n) + mu1 * (1.0 - q_n).min(served_ok)).clamp(0.0, 1.0);

    let c0 = cfg.femto_rate(1.0) * q_n + cfg.femto_rate(lam1) * p_f1;
    let csum_macro = nf * cfg.rate * p_c0 * q_n + cfg.rate * (nf - 1.0) * p_c1;
    let csum = csum_macro + cfg.femto_rate(mu1) * p_h1;
    Ok(TdmaK1 {
        report: RateReport::exact(c0, csum, csum_macro, n, 1, Scheme::Tdma, Access::Open),
        probabilities: TdmaK1Probabilities { p_a0: q_n, p_a1: 1.0 - q_n, p_f1, p_h1, p_c0, p_c1 },
    })
}

/// Large-`N` limits of the home-user rate for a fixed `lambda_1`:
/// `(closed, open)`.
pub fn asymptotic_home_rate_tdma(cfg: &NetworkConfig, lambda1: f64) -> Result<(f64, f64)> {
    if !(lambda1 > 0.0 && lambda1 <= 1.0) {
        return Err(invalid_arg(format!("lambda_1 must lie in (0, 1], got {lambda1}")));
    }
    cfg.validate()?;
    let seg = CdfSegments::new(cfg);
    let closed = cfg.femto_rate(1.0) * seg.cdf(fap_threshold(cfg, femto_target(cfg, 1.0)));
    let open = cfg.femto_rate(lambda1) * seg.cdf(fap_threshold(cfg, femto_target(cfg, lambda1)));
    Ok((closed, open))
}
