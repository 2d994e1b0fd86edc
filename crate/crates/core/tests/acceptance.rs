//! Acceptance checks. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits nonzero if any fails.

use std::process::{Command, ExitCode};
use std::sync::OnceLock;
use std::time::Instant;

use femtoaccess::analytic::{cdf_interference, cdf_sum_mc, cdf_sum_upper, SumCdfEstimator};
use femtoaccess::cdma::{
    closed_access_cdma, cutoff_closed_cdma, home_rate_lower_bound_cdma, sum_throughput_lower_bound_cdma_k1,
};
use femtoaccess::experiments::{lambda_star, lambda_star_vs_backhaul, Cell};
use femtoaccess::montecarlo::{estimate, find_open_cutoff, McOptions, DEFAULT_CUTOFF_EPS};
use femtoaccess::tdma::{closed_access_tdma, cutoff_closed_tdma, open_access_tdma_k1};
use femtoaccess::{Access, AllocationPolicy, NetworkConfig, Scheme, Stream};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const CFG: NetworkConfig = NetworkConfig::reference();
const SEED: u64 = 7_331;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|j| (a.ln() + (b.ln() - a.ln()) * j as f64 / (n - 1) as f64).exp()).collect()
}

/// Fraction of uniform disk points whose gain ratio `(d_bs/d_fap)^alpha` is
/// at most `i`, drawn fresh for each grid point.
fn disk_area_fraction(cfg: &NetworkConfig, i: f64, samples: u64, seed: u64) -> f64 {
    let chunks = 64u64;
    let per = samples / chunks;
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let mut hits = 0u64;
            for _ in 0..per {
                // Polar draw, unlike the library's rejection sampler.
                let r = cfg.radius * rng.random::<f64>().sqrt();
                let (sin, cos) = (std::f64::consts::TAU * rng.random::<f64>()).sin_cos();
                let (x, y) = (r * cos, r * sin);
                let bs2 = x * x + y * y;
                let fap2 = (x - cfg.fap_distance).powi(2) + y * y;
                if (bs2 / fap2).powf(0.5 * cfg.alpha) <= i {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    hits as f64 / (per * chunks) as f64
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let grid = log_grid(1e-4, 1e3, 100);
    let worst = grid
        .iter()
        .enumerate()
        .map(|(j, &i)| (cdf_interference(i, &CFG) - disk_area_fraction(&CFG, i, 1_000_000, SEED + j as u64)).abs())
        .fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    outcome(worst <= 0.01 && secs < 60.0, format!("sup |F - area MC| = {worst:.2e} (<= 1e-2), {secs:.1} s (< 60 s)"))
}

fn criterion_2() -> Outcome {
    let grid = log_grid(1e-3, 1e3, 20);
    let mut violations = Vec::new();
    for k in [2u32, 5, 10] {
        for (j, &i) in grid.iter().enumerate() {
            let stream = Stream::new(SEED).derive_all(&[2, k as u64, j as u64]);
            let est = cdf_sum_mc(k, i, &CFG, 100_000, stream).unwrap();
            let upper = cdf_sum_upper(k, i, &CFG);
            if est.value > upper + 3.0 * est.std_error {
                violations.push(format!("k={k} i={i:.3e}: {:.4} > {upper:.4}", est.value));
            }
        }
    }
    outcome(violations.is_empty(), format!("{} violations in 60 points {:?}", violations.len(), violations))
}

fn criterion_3() -> Outcome {
    let p = AllocationPolicy::proportional(1);
    let opts = McOptions { reps: 1_000_000, seed: SEED };
    let mut worst: f64 = 0.0;
    let mut notes = Vec::new();
    for n in [5, 10, 30, 60] {
        let exact = open_access_tdma_k1(&CFG, &p, n).unwrap().report;
        let mc = estimate(&CFG, &p, n, Scheme::Tdma, Access::Open, &opts).unwrap().report;
        for (name, e, m, se) in [("c0", exact.c0, mc.c0, mc.se_c0), ("csum", exact.csum, mc.csum, mc.se_csum)] {
            let diff = (e - m).abs();
            let z = if diff == 0.0 {
                0.0
            } else if se > 0.0 {
                diff / se
            } else {
                f64::INFINITY
            };
            worst = worst.max(z);
            notes.push(format!("N={n} {name}: {e:.5}/{m:.5} z={z:.2}"));
        }
    }
    outcome(worst <= 3.0, format!("max |z| = {worst:.2} (<= 3); {}", notes.join(", ")))
}

fn criterion_4() -> Outcome {
    let nc = cutoff_closed_tdma(&CFG);
    let opts = McOptions { reps: 100_000, seed: SEED };
    let mut ok = (48..=49).contains(&nc);
    let mut notes = vec![format!("N_c* = {nc}")];
    for k in [1usize, 3] {
        for lambda in [0.3, 0.5, 0.8] {
            let p = AllocationPolicy::fixed_lambda(k, lambda);
            let r = find_open_cutoff(&CFG, &p, Scheme::Tdma, DEFAULT_CUTOFF_EPS, 200, &opts).unwrap();
            ok &= r.n_open == nc + k && r.within_bound;
            notes.push(format!("K={k} lambda={lambda}: N_o* = {}", r.n_open));
        }
    }
    outcome(ok, notes.join(", "))
}

fn criterion_5() -> Outcome {
    let p = AllocationPolicy::proportional(3);
    let opts = McOptions { reps: 1_000_000, seed: SEED };
    let open = estimate(&CFG, &p, 20, Scheme::Tdma, Access::Open, &opts).unwrap().report;
    let closed = closed_access_tdma(&CFG, 20).unwrap();
    let gain = open.c0 / closed.c0 - 1.0;
    let loss = 1.0 - open.csum / closed.csum;
    let ok = (gain - 0.15).abs() <= 0.05 && (loss - 0.20).abs() <= 0.05;
    outcome(ok, format!("home gain {:.1}% (15 +/- 5), cellular loss {:.1}% (20 +/- 5)", 100.0 * gain, 100.0 * loss))
}

fn criterion_6() -> Outcome {
    let nc = cutoff_closed_cdma(&CFG);
    let gi = SumCdfEstimator::new(CFG, 1_000, Stream::new(SEED)).unwrap();
    let at = closed_access_cdma(&CFG, nc, &gi).unwrap().report.csum;
    let after = closed_access_cdma(&CFG, nc + 1, &gi).unwrap().report.csum;
    let opts = McOptions { reps: 10_000, seed: SEED };
    let p = AllocationPolicy::proportional(0);
    let mc_at = estimate(&CFG, &p, nc, Scheme::Cdma, Access::Closed, &opts).unwrap().report.csum;
    let mc_after = estimate(&CFG, &p, nc + 1, Scheme::Cdma, Access::Closed, &opts).unwrap().report.csum;
    let full = nc as f64 * CFG.rate;
    let ok = (154..=156).contains(&nc) && at == full && after == 0.0 && mc_at == full && mc_after == 0.0;
    outcome(ok, format!("N_c* = {nc}; csum {at} -> {after} (MC {mc_at} -> {mc_after})"))
}

struct CdmaHome {
    n: usize,
    open: f64,
    closed: f64,
    se: f64,
}

/// Shared by both halves of criterion 7.
fn cdma_home_rates() -> &'static [CdmaHome] {
    static ROWS: OnceLock<Vec<CdmaHome>> = OnceLock::new();
    ROWS.get_or_init(compute_cdma_home_rates)
}

fn compute_cdma_home_rates() -> Vec<CdmaHome> {
    let p = AllocationPolicy::proportional(1);
    let opts = McOptions { reps: 200_000, seed: SEED };
    (1..=11)
        .map(|j| {
            let n = 20 * j;
            let open = estimate(&CFG, &p, n, Scheme::Cdma, Access::Open, &opts).unwrap().report;
            let closed = estimate(&CFG, &p, n, Scheme::Cdma, Access::Closed, &opts).unwrap().report;
            CdmaHome { n, open: open.c0, closed: closed.c0, se: open.se_c0.hypot(closed.se_c0) }
        })
        .collect()
}

fn criterion_7a() -> Outcome {
    let rows = cdma_home_rates();
    let bad: Vec<usize> = rows.iter().filter(|r| r.open < r.closed - 3.0 * r.se).map(|r| r.n).collect();
    outcome(bad.is_empty(), format!("open c0 >= closed c0 - 3 sigma at N = 20..220; violations at {bad:?}"))
}

fn criterion_7b() -> Outcome {
    let rows = cdma_home_rates();
    let mut ok = true;
    let mut notes = Vec::new();
    for r in rows.iter().filter(|r| (60..=200).contains(&r.n)) {
        let ratio = r.open / r.closed;
        // 0/0 is NaN and fails; x/0 with x > 0 is infinite and passes.
        ok &= ratio >= 2.5;
        notes.push(format!("N={}: {:.3e}/{:.3e}", r.n, r.open, r.closed));
    }
    outcome(ok, format!("open/closed >= 2.5 for N in [60, 200]; {}", notes.join(", ")))
}

fn criterion_8() -> Outcome {
    let opts = McOptions { reps: 200_000, seed: SEED };
    let gi = SumCdfEstimator::new(CFG, 200_000, Stream::new(SEED).derive(8)).unwrap();
    let mut ok = true;
    let mut notes = Vec::new();
    for k in [1usize, 3] {
        let p = AllocationPolicy::proportional(k);
        for n in [20, 50, 100, 150, 170] {
            let mc = estimate(&CFG, &p, n, Scheme::Cdma, Access::Open, &opts).unwrap().report;
            let b4 = home_rate_lower_bound_cdma(&CFG, &p, n, &gi).unwrap();
            if b4.value > mc.c0 + 3.0 * b4.std_error.hypot(mc.se_c0) {
                ok = false;
                notes.push(format!("c0 bound K={k} N={n}: {:.4e} > {:.4e}", b4.value, mc.c0));
            }
            if k == 1 {
                let b5 = sum_throughput_lower_bound_cdma_k1(&CFG, &p, n, &gi).unwrap().csum;
                if b5.value > mc.csum + 3.0 * b5.std_error.hypot(mc.se_csum) {
                    ok = false;
                    notes.push(format!("csum bound N={n}: {:.4} > {:.4}", b5.value, mc.csum));
                }
            }
        }
    }
    let p = AllocationPolicy::proportional(1);
    for n in [50, 100, 150] {
        let b4 = home_rate_lower_bound_cdma(&CFG, &p, n, &gi).unwrap().value;
        let closed = closed_access_cdma(&CFG, n, &gi).unwrap().report.c0;
        if b4 < closed {
            ok = false;
            notes.push(format!("N={n}: bound {b4:.4e} < closed {closed:.4e}"));
        }
    }
    outcome(
        ok,
        format!(
            "bounds below MC + 3 sigma and above closed c0; {}",
            if notes.is_empty() { "no violations".into() } else { notes.join(", ") }
        ),
    )
}

fn criterion_9() -> Outcome {
    let n = 10_000;
    let mut worst: f64 = 0.0;
    let mut notes = Vec::new();
    for (policy, lambda) in [
        (AllocationPolicy::fixed_lambda(1, 0.5), 0.5),
        (AllocationPolicy::fixed_lambda(1, 0.8), 0.8),
        (AllocationPolicy::proportional(1), 1.0),
    ] {
        let c0 = open_access_tdma_k1(&CFG, &policy, n).unwrap().report.c0;
        let exponent = (CFG.rate / lambda).min(CFG.backhaul);
        let gamma = exponent.exp2() - 1.0;
        let limit = lambda * exponent * cdf_interference(CFG.p_femto / (CFG.p_macro * gamma), &CFG);
        let rel = (c0 - limit).abs() / limit;
        worst = worst.max(rel);
        notes.push(format!("lambda={lambda}: {c0:.6} vs {limit:.6}"));
    }
    outcome(worst <= 1e-3, format!("max rel err {worst:.2e} (<= 1e-3); {}", notes.join(", ")))
}

fn criterion_10() -> Outcome {
    let opts = McOptions { reps: 100_000, seed: SEED };
    let mut ok = true;
    let mut notes = Vec::new();
    let by_n: Vec<f64> =
        [10, 20, 30, 40].iter().map(|&n| lambda_star(&CFG, n, Scheme::Tdma, 1, &opts, 0.01).unwrap().lambda).collect();
    ok &= by_n.windows(2).all(|w| w[0] <= w[1]);
    notes.push(format!("TDMA lambda* over N=10..40: {by_n:?}"));

    let cbs = [1.5, 2.0, 3.0, 5.0, 10.0];
    let t = lambda_star_vs_backhaul(&CFG, 30, Scheme::Tdma, 1, &cbs, &opts, 0.01).unwrap();
    let by_cb: Vec<f64> =
        (0..cbs.len()).map(|r| t.get(r, "lambda_star").and_then(Cell::as_f64).unwrap_or(f64::NAN)).collect();
    let spread = by_cb.iter().cloned().fold(f64::MIN, f64::max) - by_cb.iter().cloned().fold(f64::MAX, f64::min);
    ok &= spread <= 1e-3;
    ok &= by_cb.iter().zip(cbs).all(|(l, cb)| *l >= CFG.rate / cb);
    notes.push(format!("TDMA lambda* over C_b/C = 3..20: {by_cb:?}"));

    for cb in [2.0, 4.0] {
        let mut cfg = CFG;
        cfg.backhaul = cb;
        let s = lambda_star(&cfg, 30, Scheme::Cdma, 1, &McOptions { reps: 20_000, seed: SEED }, 0.01).unwrap();
        let floor = cfg.rate / cb;
        ok &= (s.lambda - floor).abs() <= 1e-3;
        notes.push(format!("CDMA C_b={cb}: lambda* = {} (floor {floor})", s.lambda));
    }
    outcome(ok, notes.join("; "))
}

fn criterion_11() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_femtoaccess");
    let commands: [&[&str]; 5] = [
        &["rates", "--scheme", "cdma", "--access", "both", "--n", "20:100:40", "--k", "1"],
        &["rates", "--scheme", "tdma", "--access", "open", "--n", "30", "--k", "3"],
        &["cdf", "--grid", "log:1e-2:1e2:12", "--k", "2,5"],
        &["sweep", "--scheme", "tdma", "--n", "10:50:20", "--k", "1,2"],
        &["lambda-star", "--scheme", "cdma", "--n", "20"],
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for args in commands {
        let mut outputs = Vec::new();
        for workers in ["1", "3", "8"] {
            let out = Command::new(bin)
                .args(["--seed", "99", "--reps", "4000", "--workers", workers])
                .args(args)
                .output()
                .expect("run binary");
            ok &= out.status.success();
            outputs.push(out.stdout);
        }
        let same = outputs.windows(2).all(|w| w[0] == w[1]) && !outputs[0].is_empty();
        ok &= same;
        notes.push(format!("{}: {}", args[0], if same { "identical" } else { "DIFFERENT" }));
    }
    outcome(ok, format!("workers 1/3/8; {}", notes.join(", ")))
}

type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("1", "interference CDF vs disk-area oracle", criterion_1),
        ("2", "k-sum CDF below product bound", criterion_2),
        ("3", "TDMA single-handoff closed form vs Monte Carlo", criterion_3),
        ("4", "TDMA closed and open cutoffs", criterion_4),
        ("5", "TDMA gain and loss at N = 20, K = 3", criterion_5),
        ("6", "CDMA closed cutoff", criterion_6),
        ("7a", "CDMA open home rate dominates closed", criterion_7a),
        ("7b", "CDMA open/closed home-rate ratio", criterion_7b),
        ("8", "CDMA lower bounds", criterion_8),
        ("9", "TDMA large-N home rate", criterion_9),
        ("10", "lambda* structure", criterion_10),
        ("11", "determinism across worker counts", criterion_11),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (id, name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f == id) {
            continue;
        }
        let start = Instant::now();
        let o = check();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {id} ({name}) [{:.1} s]: {}", start.elapsed().as_secs_f64(), o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {failed} failed");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
