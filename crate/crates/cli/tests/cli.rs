//! End-to-end checks of the `sma` binary: subcommands, exit codes, output
//! files, and rerun determinism.

use std::fs;
use std::process::Command;

fn sma() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sma"))
}

#[test]
fn list_presets_names_all_three() {
    let out = sma().arg("list-presets").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["fig2", "fig3", "fig4"] {
        assert!(text.contains(name), "missing {name} in: {text}");
    }
}

#[test]
fn validate_accepts_presets_and_rejects_garbage() {
    let out = sma().args(["validate", "--config", "fig2"]).output().unwrap();
    assert!(out.status.success());

    let out = sma().args(["validate", "--config", "no_such_preset"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "name = \"x\"\nmetrics = [\"ber\"]\nnot_a_key = 1\n").unwrap();
    let out = sma()
        .args(["validate", "--config", bad.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn run_writes_expected_files_and_respects_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let out = sma()
        .args([
            "run",
            "--config",
            "fig2",
            "--trials",
            "2000",
            "--snr-db",
            "0,10",
            "--out",
            dir.path().to_str().unwrap(),
            "--plots",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in [
        "ber_sma_ue1.csv",
        "ber_sma_ue2.csv",
        "ber_noma_ue1.csv",
        "ber_noma_ue2.csv",
        "plot_fig2_ber.py",
    ] {
        assert!(dir.path().join(f).is_file(), "missing {f}");
    }
    let csv = fs::read_to_string(dir.path().join("ber_sma_ue1.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "snr_db,estimate,standard_error,trials_used,analytic"
    );
    for line in lines {
        assert!(line.ends_with(",2000") || line.contains(",2000,"), "trials override: {line}");
    }
}

#[test]
fn rerun_with_same_seed_is_byte_identical() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let out = sma()
            .args([
                "run",
                "--config",
                "fig4",
                "--trials",
                "4096",
                "--snr-db",
                "0,5",
                "--out",
                dir.path().to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for f in ["outage_sma_ue1.csv", "outage_sma_ue2.csv", "outage_noma_ue1.csv"] {
        let a = fs::read(dir_a.path().join(f)).unwrap();
        let b = fs::read(dir_b.path().join(f)).unwrap();
        assert_eq!(a, b, "{f} differs between reruns");
    }
}

#[test]
fn failed_scenario_leaves_no_partial_outputs() {
    // NaN SNR grid entries pass clap but fail scenario validation at run
    // time, after the output directory exists.
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    fs::write(
        &cfg,
        "name = \"x\"\nmetrics = [\"ber\"]\ntrials = 10\nsnr_db = [0.0]\n\
         [scenario.sma]\nscheme = \"sma\"\nnt = 4\nnr = 4\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = sma()
        .args([
            "run",
            "--config",
            cfg.to_str().unwrap(),
            "--snr-db",
            "nan",
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    if out_dir.exists() {
        assert_eq!(fs::read_dir(&out_dir).unwrap().count(), 0, "no partial files");
    }
}
