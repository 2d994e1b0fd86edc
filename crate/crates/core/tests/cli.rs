use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_femtoaccess"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("run binary")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("femtoaccess-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn rows(stdout: &[u8]) -> Vec<Vec<String>> {
    String::from_utf8_lossy(stdout).lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn col(table: &[Vec<String>], name: &str) -> Vec<String> {
    let j = table[0].iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    table[1..].iter().map(|r| r[j].clone()).collect()
}

#[test]
fn cdf_grid_rows_and_shape() {
    let out = run(&["--reps", "2000", "cdf", "--grid", "log:1e-4:1e3:200"]);
    assert!(out.status.success());
    let t = rows(&out.stdout);
    assert_eq!(t.len(), 201);
    let i: Vec<f64> = col(&t, "i").iter().map(|s| s.parse().unwrap()).collect();
    let f: Vec<f64> = col(&t, "cdf").iter().map(|s| s.parse().unwrap()).collect();
    assert!(i.windows(2).all(|w| w[0] < w[1]));
    assert!(f.iter().all(|v| (0.0..=1.0).contains(v)));
    assert!(f.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn closed_tdma_sum_throughput() {
    let out = run(&["--reps", "1000", "rates", "--scheme", "tdma", "--access", "closed", "--n", "20"]);
    assert!(out.status.success());
    let t = rows(&out.stdout);
    assert_eq!(col(&t, "csum_exact"), ["10"]);
    assert_eq!(col(&t, "csum"), ["10"]);
}

#[test]
fn cdma_open_home_rate_not_below_closed() {
    let out = run(&["--reps", "1e5", "rates", "--scheme", "cdma", "--access", "both", "--n", "100", "--k", "1"]);
    assert!(out.status.success());
    let t = rows(&out.stdout);
    let c0: Vec<f64> = col(&t, "c0").iter().map(|s| s.parse().unwrap()).collect();
    let se: Vec<f64> = col(&t, "se_c0").iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!(col(&t, "access"), ["open", "closed"]);
    assert!(c0[0] >= c0[1] - 3.0 * se[1]);
}

#[test]
fn usage_errors_exit_nonzero() {
    let out = run(&["rates", "--n", "20"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--scheme"));
    assert!(!run(&["bogus"]).status.success());
    assert!(!run(&["cdf", "--grid", "log:0:1:5"]).status.success());
    let out = run(&["--reps", "10", "rates", "--scheme", "tdma", "--n", "20"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    assert!(!run(&["--set", "G=-1", "cutoffs", "--closed-only"]).status.success());
}

#[test]
fn cutoffs_closed_values() {
    let out = run(&["cutoffs", "--closed-only"]);
    assert!(out.status.success());
    let t = rows(&out.stdout);
    assert_eq!(col(&t, "n_closed"), ["48", "155"]);
}

#[test]
fn config_file_and_overrides() {
    let dir = scratch("config");
    let path = dir.join("net.cfg");
    std::fs::write(&path, "# smaller spreading gain\nG = 32\n").unwrap();
    let p = path.to_str().unwrap();
    let t = rows(&run(&["--config", p, "cutoffs", "--closed-only"]).stdout);
    let cdma: usize = col(&t, "n_closed")[1].parse().unwrap();
    assert!(cdma < 155);
    let t = rows(&run(&["--config", p, "--set", "G=64", "cutoffs", "--closed-only"]).stdout);
    assert_eq!(col(&t, "n_closed")[1], "155");
}

#[test]
fn manifest_matches_output_and_is_reproducible() {
    let dir = scratch("manifest");
    let mut digests = Vec::new();
    for (run_id, workers) in [(0, "1"), (1, "4")] {
        let out = dir.join(format!("run{run_id}/sweep.csv"));
        let o = run(&[
            "--reps",
            "2000",
            "--seed",
            "5",
            "--workers",
            workers,
            "--out",
            out.to_str().unwrap(),
            "sweep",
            "--scheme",
            "cdma",
            "--n",
            "20:60:20",
            "--k",
            "1",
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty());
        let csv = std::fs::read(&out).unwrap();
        let manifest: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(dir.join(format!("run{run_id}/sweep.csv.manifest.json"))).unwrap(),
        )
        .unwrap();
        let digest = manifest["outputs"][0]["sha256"].as_str().unwrap().to_string();
        let csv_text = String::from_utf8(csv).unwrap();
        assert_eq!(manifest["outputs"][0]["bytes"].as_u64().unwrap(), csv_text.len() as u64);
        assert_eq!(manifest["seed"], 5);
        assert_eq!(manifest["command"], "sweep");
        assert_eq!(manifest["config"]["G"], 64.0);
        assert!(!csv_text.contains('\r'));
        assert_eq!(csv_text.lines().count(), 1 + 3 * 2);
        digests.push(digest);
    }
    assert_eq!(digests[0], digests[1]);
}

#[test]
fn figure_preset_runs() {
    let out = run(&["--reps", "1000", "sweep", "--fig", "4"]);
    assert!(out.status.success());
    let t = rows(&out.stdout);
    assert_eq!(t.len(), 21);
    assert_eq!(col(&t, "n")[0], "30");
}

#[test]
fn lambda_sweep_and_backhaul() {
    let out = run(&["--reps", "1000", "sweep", "--scheme", "tdma", "--n", "30", "--lambda", "0.2,0.6,1"]);
    assert!(out.status.success());
    let t = rows(&out.stdout);
    assert_eq!(col(&t, "lambda"), ["0.2", "0.6", "1"]);
    let out = run(&["--reps", "1000", "lambda-star", "--scheme", "tdma", "--n", "30", "--cb", "1,3,5"]);
    assert!(out.status.success());
    let t = rows(&out.stdout);
    assert_eq!(col(&t, "backhaul_floor"), ["0.5", "0.166666667", "0.1"]);
    assert!(!run(&["lambda-star", "--scheme", "tdma", "--n", "30", "--grid-step", "0.2"]).status.success());
}
