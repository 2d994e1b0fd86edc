//! Distribution of the interference factor and of sums and order statistics
//! of i.i.d. factors.

use std::f64::consts::PI;

use serde::Serialize;

use crate::engine::{run_blocks, MIN_REPS};
use crate::error::{invalid_arg, Result};
use crate::model::{sample_user, NetworkConfig};
use crate::rng::Stream;
use crate::special::{incomplete_beta, ln_binomial};

/// Below this `|1 - i^(2/alpha)|` the boundary circle is treated as the
/// perpendicular bisector of the two base stations.
pub const HALF_PLANE_EPS: f64 = 1e-9;

/// Breakpoints of the piecewise CDF for one configuration.
///
/// For `i != 1` the set `{I <= i}` is bounded by a circle of radius `r`
/// centred on the x-axis at distance `x_c` from the macrocell BS (on the FAP
/// side when `i > 1`). The CDF is the fraction of the disk on the macrocell
/// side of that circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CdfSegments {
    /// `(R / (R + D))^alpha`: the circle is inside the disk below this.
    pub b1: f64,
    /// Always 1: the half-plane case.
    pub b2: f64,
    /// `(R / (R - D))^alpha`: the circle is inside the disk above this.
    pub b3: f64,
    /// `arccos(D / 2R)`.
    pub varphi: f64,
    radius: f64,
    fap_distance: f64,
    alpha: f64,
}

impl CdfSegments {
    pub fn new(cfg: &NetworkConfig) -> Self {
        let (r, d) = (cfg.radius, cfg.fap_distance);
        CdfSegments {
            b1: (r / (r + d)).powf(cfg.alpha),
            b2: 1.0,
            b3: (r / (r - d)).powf(cfg.alpha),
            varphi: (d / (2.0 * r)).clamp(-1.0, 1.0).acos(),
            radius: r,
            fap_distance: d,
            alpha: cfg.alpha,
        }
    }

    /// `F_I(i)`.
    pub fn cdf(&self, i: f64) -> f64 {
        if i.is_nan() {
            return f64::NAN;
        }
        if i <= 0.0 {
            return 0.0;
        }
        if i == f64::INFINITY {
            return 1.0;
        }
        let big_r = self.radius;
        let dd = self.fap_distance;
        let disk = PI * big_r * big_r;

        // u = i^(1/alpha), s = u^2; 1 - s via expm1 keeps precision near i = 1.
        let t = i.ln() / self.alpha;
        let u = t.exp();
        let one_minus_s = -(2.0 * t).exp_m1();
        if one_minus_s.abs() < HALF_PLANE_EPS {
            return self.half_plane();
        }
        let s = u * u;
        let r = u * dd / one_minus_s.abs();
        let x_c = s * dd / one_minus_s.abs();

        if i < self.b1 {
            return ((r / big_r).powi(2)).min(1.0);
        }
        if i > self.b3 {
            return (1.0 - (r / big_r).powi(2)).max(0.0);
        }
        // x_c^2 - r^2, without cancellation.
        let diff = -s * dd * dd / one_minus_s;
        let lens = lens_area(big_r, r, x_c, diff) / disk;
        let f = if i < 1.0 { lens } else { 1.0 - lens };
        f.clamp(0.0, 1.0)
    }

    /// Value at `i = 1`: the disk on the macrocell side of `x = D/2`.
    pub fn half_plane(&self) -> f64 {
        let p = self.varphi;
        (PI - p + 0.5 * (2.0 * p).sin()) / PI
    }
}

/// Area of the intersection of the disk (radius `big_r`, centre origin) with
/// a circle of radius `r` whose centre is `x_c` away; `diff = x_c^2 - r^2`.
fn lens_area(big_r: f64, r: f64, x_c: f64, diff: f64) -> f64 {
    // Foot of the common chord, measured from the disk centre.
    let a = (diff + big_r * big_r) / (2.0 * x_c);
    let h = ((big_r - a) * (big_r + a)).max(0.0).sqrt();
    // Half-angles subtended by the chord; equal to the arccos forms
    // theta = acos((r^2 + x_c^2 - R^2) / 2 r x_c), phi = acos(a / R)
    // but well conditioned near tangency.
    let theta = h.atan2(x_c - a);
    let phi = h.atan2(a);
    segment(r, theta) + segment(big_r, phi)
}

/// Circular segment of radius `rho` cut by a chord at half-angle `th`.
fn segment(rho: f64, th: f64) -> f64 {
    let core = if th < 1e-3 {
        let t2 = th * th;
        let t3 = t2 * th;
        t3 * (2.0 / 3.0 - t2 * (2.0 / 15.0 - t2 * (4.0 / 315.0)))
    } else {
        th - 0.5 * (2.0 * th).sin()
    };
    rho * rho * core
}

/// `F_I(i)` for a single cellular user.
pub fn cdf_interference(i: f64, cfg: &NetworkConfig) -> f64 {
    CdfSegments::new(cfg).cdf(i)
}

/// Dominant-interferer upper bound `F_I(i)^k` on the CDF of a sum of `k`
/// factors.
pub fn cdf_sum_upper(k: u32, i: f64, cfg: &NetworkConfig) -> f64 {
    cdf_interference(i, cfg).powi(k as i32)
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    pub const fn exact(value: f64) -> Self {
        Estimate { value, std_error: 0.0 }
    }

    /// Binomial proportion `hits / reps`.
    pub fn proportion(hits: u64, reps: u64) -> Self {
        let p = hits as f64 / reps as f64;
        Estimate { value: p, std_error: (p * (1.0 - p) / reps as f64).sqrt() }
    }
}

/// Monte Carlo estimate of `G_I(k, i) = P(I_1 + ... + I_k <= i)`.
pub fn cdf_sum_mc(k: u32, i: f64, cfg: &NetworkConfig, reps: u64, stream: Stream) -> Result<Estimate> {
    if reps < MIN_REPS {
        return Err(invalid_arg(format!("reps must be at least {MIN_REPS}, got {reps}")));
    }
    if i.is_nan() {
        return Err(invalid_arg("sum-CDF argument is NaN"));
    }
    if k == 0 {
        return Ok(Estimate::exact(if i >= 0.0 { 1.0 } else { 0.0 }));
    }
    if i <= 0.0 {
        return Ok(Estimate::exact(0.0));
    }
    if i == f64::INFINITY {
        return Ok(Estimate::exact(1.0));
    }
    let hits = run_blocks(
        reps,
        |range| {
            let mut hits = 0u64;
            for rep in range {
                let mut rng = stream.rng(rep);
                let mut sum = 0.0;
                let mut ok = true;
                for _ in 0..k {
                    sum += sample_user(cfg, &mut rng).1;
                    if sum > i {
                        ok = false;
                        break;
                    }
                }
                hits += ok as u64;
            }
            hits
        },
        |a, b| a + b,
    )
    .unwrap_or(0);
    Ok(Estimate::proportion(hits, reps))
}

/// Reusable `G_I` evaluator with a fixed replication budget. Each `(k, i)`
/// query draws from its own substream, so repeated queries agree exactly.
#[derive(Debug, Clone, Copy)]
pub struct SumCdfEstimator {
    cfg: NetworkConfig,
    reps: u64,
    stream: Stream,
}

impl SumCdfEstimator {
    pub fn new(cfg: NetworkConfig, reps: u64, stream: Stream) -> Result<Self> {
        if reps < MIN_REPS {
            return Err(invalid_arg(format!("reps must be at least {MIN_REPS}, got {reps}")));
        }
        Ok(SumCdfEstimator { cfg, reps, stream })
    }

    pub fn reps(&self) -> u64 {
        self.reps
    }

    pub fn eval(&self, k: u32, i: f64) -> Estimate {
        let sub = self.stream.derive_all(&[k as u64, i.to_bits()]);
        cdf_sum_mc(k, i, &self.cfg, self.reps, sub).unwrap_or(Estimate::exact(f64::NAN))
    }
}

/// `P(I_(N-L+1) > t) = 1 - L * C(N, L) * B(F_I(t); N-L+1, L)`: the
/// probability that the L-th strongest of `n` factors exceeds `t`.
pub fn order_tail(n: u64, l: u64, t: f64, cfg: &NetworkConfig) -> Result<f64> {
    if l == 0 || l > n {
        return Err(invalid_arg(format!("order_tail needs 1 <= L <= N, got N={n}, L={l}")));
    }
    if t.is_nan() || t < 0.0 {
        return Err(invalid_arg(format!("order_tail needs t >= 0, got {t}")));
    }
    let x = cdf_interference(t, cfg);
    order_tail_at(n, l, x)
}

/// [`order_tail`] with `F_I(t)` already evaluated.
pub fn order_tail_at(n: u64, l: u64, x: f64) -> Result<f64> {
    if l == 0 || l > n {
        return Err(invalid_arg(format!("order_tail needs 1 <= L <= N, got N={n}, L={l}")));
    }
    if x <= 0.0 {
        return Ok(1.0);
    }
    let b = incomplete_beta(x.min(1.0), (n - l + 1) as f64, l as f64)?;
    if b == 0.0 {
        return Ok(1.0);
    }
    let ln_coef = (l as f64).ln() + ln_binomial(n, l);
    Ok((1.0 - (ln_coef + b.ln()).exp()).clamp(0.0, 1.0))
}
