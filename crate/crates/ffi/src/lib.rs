//! C interface to `femtoaccess`.
//!
//! Configurations and policies are opaque heap handles released with their
//! `_free` function. Every fallible call returns an [`FaStatus`] and writes
//! its result through an out-pointer; on failure
//! [`fa_last_error_message`] describes the error on the calling thread.
//! Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use femtoaccess::analytic::{cdf_interference, cdf_sum_mc, cdf_sum_upper, Estimate, SumCdfEstimator};
use femtoaccess::cdma::{
    cutoff_closed_cdma, cutoff_closed_cdma_rate_scaled, home_rate_lower_bound_cdma, sum_throughput_lower_bound_cdma_k1,
};
use femtoaccess::montecarlo::{estimate, find_open_cutoff, McOptions};
use femtoaccess::tdma::{closed_access_tdma, cutoff_closed_tdma, open_access_tdma_k1};
use femtoaccess::{Access, AllocationPolicy, Error, NetworkConfig, RateReport, Scheme, Stream};

/// Scheme selector: time division.
pub const FA_SCHEME_TDMA: u32 = 0;
/// Scheme selector: code division.
pub const FA_SCHEME_CDMA: u32 = 1;
/// Access selector: open (hybrid) access.
pub const FA_ACCESS_OPEN: u32 = 0;
/// Access selector: closed access.
pub const FA_ACCESS_CLOSED: u32 = 1;

const BOUND_TAG: u64 = 0xB0_0D;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidConfig = 3,
    InvalidPolicy = 4,
    DegeneratePlacement = 5,
    NotFound = 6,
    Io = 7,
    Panic = 99,
}

/// Network configuration handle.
pub struct FaConfig {
    inner: NetworkConfig,
}

/// Resource-allocation policy handle.
pub struct FaPolicy {
    inner: AllocationPolicy,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FaEstimate {
    pub value: f64,
    pub std_error: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FaRateReport {
    pub c0: f64,
    pub csum: f64,
    pub csum_macro: f64,
    pub se_c0: f64,
    pub se_csum: f64,
    pub se_csum_macro: f64,
    pub n: u64,
    pub k: u64,
}

impl From<RateReport> for FaRateReport {
    fn from(r: RateReport) -> Self {
        FaRateReport {
            c0: r.c0,
            csum: r.csum,
            csum_macro: r.csum_macro,
            se_c0: r.se_c0,
            se_csum: r.se_csum,
            se_csum_macro: r.se_csum_macro,
            n: r.n as u64,
            k: r.k as u64,
        }
    }
}

impl From<Estimate> for FaEstimate {
    fn from(e: Estimate) -> Self {
        FaEstimate { value: e.value, std_error: e.std_error }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> FaStatus {
    match e {
        Error::InvalidArgument(_) => FaStatus::InvalidArgument,
        Error::InvalidConfig(_) | Error::ConfigParse { .. } => FaStatus::InvalidConfig,
        Error::InvalidPolicy(_) => FaStatus::InvalidPolicy,
        Error::DegeneratePlacement { .. } => FaStatus::DegeneratePlacement,
        Error::CutoffExceedsLimit { .. } | Error::NeverBeneficial { .. } => FaStatus::NotFound,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) | Error::ThreadPool(_) => FaStatus::Io,
    }
}

/// Failure carried to the boundary: a status and a message.
struct Fail(FaStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(FaStatus::NullPointer, format!("{what} is null"))
}

fn bad_arg(msg: String) -> Fail {
    Fail(FaStatus::InvalidArgument, msg)
}

/// Runs `f`, storing its value through `out`.
fn guard<T>(out: *mut T, f: impl FnOnce() -> Result<T, Fail>) -> FaStatus {
    clear_last_error();
    if out.is_null() {
        set_last_error("output pointer is null".into());
        return FaStatus::NullPointer;
    }
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(v)) => {
            // SAFETY: checked non-null; the caller guarantees it points to writable storage for T.
            unsafe { out.write(v) };
            FaStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            FaStatus::Panic
        }
    }
}

unsafe fn config<'a>(cfg: *const FaConfig) -> Result<&'a NetworkConfig, Fail> {
    // SAFETY: the caller passes null or a live handle from this library.
    unsafe { cfg.as_ref() }.map(|c| &c.inner).ok_or_else(|| null("config"))
}

unsafe fn policy<'a>(p: *const FaPolicy) -> Result<&'a AllocationPolicy, Fail> {
    // SAFETY: as for `config`.
    unsafe { p.as_ref() }.map(|p| &p.inner).ok_or_else(|| null("policy"))
}

unsafe fn c_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    // SAFETY: non-null and, per the contract, NUL-terminated.
    unsafe { CStr::from_ptr(s) }.to_str().map_err(|_| bad_arg(format!("{what} is not valid UTF-8")))
}

fn scheme(s: u32) -> Result<Scheme, Fail> {
    match s {
        FA_SCHEME_TDMA => Ok(Scheme::Tdma),
        FA_SCHEME_CDMA => Ok(Scheme::Cdma),
        _ => Err(bad_arg(format!("unknown scheme {s}"))),
    }
}

fn access(a: u32) -> Result<Access, Fail> {
    match a {
        FA_ACCESS_OPEN => Ok(Access::Open),
        FA_ACCESS_CLOSED => Ok(Access::Closed),
        _ => Err(bad_arg(format!("unknown access mode {a}"))),
    }
}

fn count(n: u64) -> Result<usize, Fail> {
    usize::try_from(n).map_err(|_| bad_arg(format!("{n} does not fit in usize")))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fa_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn fa_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Default network parameters.
#[no_mangle]
pub extern "C" fn fa_config_new_default(out: *mut *mut FaConfig) -> FaStatus {
    guard(out, || Ok(Box::into_raw(Box::new(FaConfig { inner: NetworkConfig::reference() }))))
}

/// Parses `key = value` lines over the defaults.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fa_config_from_kv(text: *const c_char, out: *mut *mut FaConfig) -> FaStatus {
    guard(out, || {
        let text = unsafe { c_str(text, "text") }?;
        let inner = NetworkConfig::from_kv_str(text)?;
        Ok(Box::into_raw(Box::new(FaConfig { inner })))
    })
}

/// Sets one parameter and revalidates; on failure the handle is unchanged.
///
/// # Safety
/// `cfg` must be a live handle and `key` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn fa_config_set(cfg: *mut FaConfig, key: *const c_char, value: f64) -> FaStatus {
    let mut unit = ();
    guard(&mut unit, || {
        // SAFETY: null or a live handle, per the contract.
        let handle = unsafe { cfg.as_mut() }.ok_or_else(|| null("config"))?;
        let key = unsafe { c_str(key, "key") }?;
        let mut next = handle.inner;
        next.set(key, value)?;
        next.validate()?;
        handle.inner = next;
        Ok(())
    })
}

/// # Safety
/// `cfg` must be a live handle, `key` a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fa_config_get(cfg: *const FaConfig, key: *const c_char, out: *mut f64) -> FaStatus {
    guard(out, || {
        let cfg = unsafe { config(cfg) }?;
        let key = unsafe { c_str(key, "key") }?;
        cfg.get(key).ok_or_else(|| Fail(FaStatus::InvalidConfig, format!("unknown config key `{key}`")))
    })
}

/// # Safety
/// `cfg` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fa_config_free(cfg: *mut FaConfig) {
    if !cfg.is_null() {
        // SAFETY: allocated by Box::into_raw in this library.
        drop(unsafe { Box::from_raw(cfg) });
    }
}

/// `lambda_L = 1 - L/N`, `mu_L = 1/N` for up to `k` admitted users.
#[no_mangle]
pub extern "C" fn fa_policy_proportional(k: u64, out: *mut *mut FaPolicy) -> FaStatus {
    guard(out, || {
        let inner = AllocationPolicy::proportional(count(k)?);
        Ok(Box::into_raw(Box::new(FaPolicy { inner })))
    })
}

/// `lambda_L = lambda`, `mu_L = (1 - lambda)/L`.
#[no_mangle]
pub extern "C" fn fa_policy_fixed_lambda(k: u64, lambda: f64, out: *mut *mut FaPolicy) -> FaStatus {
    guard(out, || {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Fail(FaStatus::InvalidPolicy, format!("lambda must lie in [0, 1], got {lambda}")));
        }
        let inner = AllocationPolicy::fixed_lambda(count(k)?, lambda);
        Ok(Box::into_raw(Box::new(FaPolicy { inner })))
    })
}

/// Explicit per-level shares; `len = K + 1`, entry 0 is the no-handoff level.
///
/// # Safety
/// `lambda` and `mu` must each point to `len` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn fa_policy_explicit(
    lambda: *const f64,
    mu: *const f64,
    len: usize,
    out: *mut *mut FaPolicy,
) -> FaStatus {
    guard(out, || {
        if lambda.is_null() || mu.is_null() {
            return Err(null("share array"));
        }
        // SAFETY: non-null with `len` elements, per the contract.
        let (l, m) = unsafe { (std::slice::from_raw_parts(lambda, len), std::slice::from_raw_parts(mu, len)) };
        let inner = AllocationPolicy::explicit(l.to_vec(), m.to_vec())?;
        Ok(Box::into_raw(Box::new(FaPolicy { inner })))
    })
}

/// # Safety
/// `p` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fa_policy_free(p: *mut FaPolicy) {
    if !p.is_null() {
        // SAFETY: allocated by Box::into_raw in this library.
        drop(unsafe { Box::from_raw(p) });
    }
}

/// CDF of one user's interference factor.
///
/// # Safety
/// `cfg` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fa_cdf_interference(cfg: *const FaConfig, i: f64, out: *mut f64) -> FaStatus {
    guard(out, || Ok(cdf_interference(i, unsafe { config(cfg) }?)))
}

/// Upper bound `F(i)^k` on the CDF of a sum of `k` interference factors.
///
/// # Safety
/// `cfg` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fa_cdf_sum_upper(cfg: *const FaConfig, k: u32, i: f64, out: *mut f64) -> FaStatus {
    guard(out, || Ok(cdf_sum_upper(k, i, unsafe { config(cfg) }?)))
}

/// Monte Carlo CDF of a sum of `k` interference factors.
///
/// # Safety
/// `cfg` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fa_cdf_sum_mc(
    cfg: *const FaConfig,
    k: u32,
    i: f64,
    reps: u64,
    seed: u64,
    out: *mut FaEstimate,
) -> FaStatus {
    guard(out, || Ok(cdf_sum_mc(k, i, unsafe { config(cfg) }?, reps, Stream::new(seed))?.into()))
}

/// Closed-access cutoff load. `rate_scaled` selects the rate-scaled CDMA
/// feasibility condition and is ignored for TDMA.
///
/// # Safety
/// `cfg` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fa_cutoff_closed(
    cfg: *const FaConfig,
    scheme_id: u32,
    rate_scaled: bool,
    out: *mut u64,
) -> FaStatus {
    guard(out, || {
        let cfg = unsafe { config(cfg) }?;
        let n = match scheme(scheme_id)? {
            Scheme::Tdma => cutoff_closed_tdma(cfg),
            Scheme::Cdma if rate_scaled => cutoff_closed_cdma_rate_scaled(cfg),
            Scheme::Cdma => cutoff_closed_cdma(cfg),
        };
        Ok(n as u64)
    })
}

/// Open-access cutoff load found by Monte Carlo search up to `n_max`.
///
/// # Safety
/// `cfg` and `p` must be live handles and `out` writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn fa_cutoff_open(
    cfg: *const FaConfig,
    p: *const FaPolicy,
    scheme_id: u32,
    eps: f64,
    n_max: u64,
    reps: u64,
    seed: u64,
    out: *mut u64,
) -> FaStatus {
    guard(out, || {
        let (cfg, p) = unsafe { (config(cfg)?, policy(p)?) };
        let r = find_open_cutoff(cfg, p, scheme(scheme_id)?, eps, count(n_max)?, &McOptions { reps, seed })?;
        Ok(r.n_open as u64)
    })
}

/// Exact closed-access TDMA rates.
///
/// # Safety
/// `cfg` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fa_closed_access_tdma(cfg: *const FaConfig, n: u64, out: *mut FaRateReport) -> FaStatus {
    guard(out, || Ok(closed_access_tdma(unsafe { config(cfg) }?, count(n)?)?.into()))
}

/// Exact open-access TDMA rates with one admitted user.
///
/// # Safety
/// `cfg` and `p` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fa_open_access_tdma_k1(
    cfg: *const FaConfig,
    p: *const FaPolicy,
    n: u64,
    out: *mut FaRateReport,
) -> FaStatus {
    guard(out, || {
        let (cfg, p) = unsafe { (config(cfg)?, policy(p)?) };
        Ok(open_access_tdma_k1(cfg, p, count(n)?)?.report.into())
    })
}

/// Monte Carlo rates for any scheme, access mode and policy.
///
/// # Safety
/// `cfg` and `p` must be live handles and `out` writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn fa_estimate(
    cfg: *const FaConfig,
    p: *const FaPolicy,
    n: u64,
    scheme_id: u32,
    access_id: u32,
    reps: u64,
    seed: u64,
    out: *mut FaRateReport,
) -> FaStatus {
    guard(out, || {
        let (cfg, p) = unsafe { (config(cfg)?, policy(p)?) };
        let r = estimate(cfg, p, count(n)?, scheme(scheme_id)?, access(access_id)?, &McOptions { reps, seed })?;
        Ok(r.report.into())
    })
}

/// Lower bound on the open-access CDMA home-user rate.
///
/// # Safety
/// `cfg` and `p` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fa_home_rate_lower_bound_cdma(
    cfg: *const FaConfig,
    p: *const FaPolicy,
    n: u64,
    reps: u64,
    seed: u64,
    out: *mut FaEstimate,
) -> FaStatus {
    guard(out, || {
        let (cfg, p) = unsafe { (config(cfg)?, policy(p)?) };
        let gi = SumCdfEstimator::new(*cfg, reps, Stream::new(seed).derive(BOUND_TAG))?;
        Ok(home_rate_lower_bound_cdma(cfg, p, count(n)?, &gi)?.into())
    })
}

/// Lower bound on the open-access CDMA sum throughput with one admitted user.
///
/// # Safety
/// `cfg` and `p` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fa_sum_throughput_lower_bound_cdma_k1(
    cfg: *const FaConfig,
    p: *const FaPolicy,
    n: u64,
    reps: u64,
    seed: u64,
    out: *mut FaEstimate,
) -> FaStatus {
    guard(out, || {
        let (cfg, p) = unsafe { (config(cfg)?, policy(p)?) };
        let gi = SumCdfEstimator::new(*cfg, reps, Stream::new(seed).derive(BOUND_TAG))?;
        Ok(sum_throughput_lower_bound_cdma_k1(cfg, p, count(n)?, &gi)?.csum.into())
    })
}
