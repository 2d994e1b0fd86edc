use std::path::PathBuf;
use std::process::Command;

fn header_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include").join("femtoaccess.h")
}

#[test]
fn header_declares_the_interface() {
    let h = std::fs::read_to_string(header_path()).expect("header generated by build script");
    assert!(h.contains("#ifndef FEMTOACCESS_H"));
    assert!(h.contains("typedef struct FaConfig FaConfig;"));
    assert!(h.contains("typedef struct FaPolicy FaPolicy;"));
    assert!(h.contains("FA_STATUS_OK = 0"));
    assert!(h.contains("FA_STATUS_PANIC = 99"));
    for f in [
        "fa_version",
        "fa_last_error_message",
        "fa_config_new_default",
        "fa_config_from_kv",
        "fa_config_set",
        "fa_config_get",
        "fa_config_free",
        "fa_policy_proportional",
        "fa_policy_fixed_lambda",
        "fa_policy_explicit",
        "fa_policy_free",
        "fa_cdf_interference",
        "fa_cdf_sum_upper",
        "fa_cdf_sum_mc",
        "fa_cutoff_closed",
        "fa_cutoff_open",
        "fa_closed_access_tdma",
        "fa_open_access_tdma_k1",
        "fa_estimate",
        "fa_home_rate_lower_bound_cdma",
        "fa_sum_throughput_lower_bound_cdma_k1",
    ] {
        assert!(h.contains(&format!("{f}(")), "missing {f}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = Command::new("cc").arg("--version").output() else {
        eprintln!("no C compiler; skipping");
        return;
    };
    assert!(cc.status.success());
    let out = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c"])
        .arg(header_path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
