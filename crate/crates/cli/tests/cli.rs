//! End-to-end tests of the `beamsplit` binary: output reproducibility,
//! CSV round-tripping, exit codes, and flag/config layering.

use std::path::Path;
use std::process::{Command, Output};

fn beamsplit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_beamsplit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = beamsplit(args);
    assert!(out.status.success(), "{:?}: {out:?}", args);
    String::from_utf8(out.stdout).unwrap()
}

/// Data rows (comments and the column header stripped).
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn column_header(csv: &str) -> &str {
    csv.lines().find(|l| !l.starts_with('#')).unwrap()
}

#[test]
fn bsr_preset_row_matches_reference() {
    let csv = stdout(&["bsr", "--preset", "thz"]);
    assert_eq!(
        column_header(&csv),
        "fc_hz,nt,m_subcarriers,bandwidth_hz,bsr"
    );
    let rows = rows(&csv);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0].parse::<f64>().unwrap(), 300e9);
    assert_eq!(rows[0][1].parse::<u64>().unwrap(), 256);
    assert_eq!(rows[0][2].parse::<u64>().unwrap(), 128);
    assert_eq!(rows[0][3].parse::<f64>().unwrap(), 30e9);
    assert!((rows[0][4].parse::<f64>().unwrap() - 1.6).abs() < 1e-9);
}

#[test]
fn bsr_without_preset_lists_all_three() {
    let csv = stdout(&["bsr"]);
    let rows = rows(&csv);
    assert_eq!(rows.len(), 3);
    let ratios: Vec<f64> = rows.iter().map(|r| r[4].parse().unwrap()).collect();
    assert!((ratios[0] - 0.03).abs() < 0.005);
    assert!((ratios[1] - 0.29).abs() < 0.005);
    assert!((ratios[2] - 1.6).abs() < 1e-9);
}

#[test]
fn gain_profile_classical_shows_beam_split() {
    let csv = stdout(&[
        "gain-profile",
        "--theta",
        "0.5",
        "--scheme",
        "classical",
        "--preset",
        "thz",
    ]);
    assert_eq!(column_header(&csv), "m,scheme,bandwidth_hz,gain");
    let rows = rows(&csv);
    assert_eq!(rows.len(), 128);
    // Outside the central band the beam has lost its mainlobe: every gain
    // sits at sidelobe level (the first sidelobe tops out near 0.217, so a
    // few subcarriers exceed the round 0.2), and at least half of all
    // subcarriers are at 0.2 or below.
    let mut low = 0usize;
    for r in &rows {
        assert_eq!(r[1], "classical");
        let m: usize = r[0].parse().unwrap();
        let gain: f64 = r[3].parse().unwrap();
        assert!((0.0..=1.0).contains(&gain));
        if gain <= 0.2 {
            low += 1;
        }
        if m <= 47 || m >= 81 {
            assert!(gain <= 0.22, "m={m} gain={gain}");
        }
    }
    assert!(low >= 64, "only {low} subcarriers at gain <= 0.2");
}

#[test]
fn beam_pattern_rows_cover_grid_and_schemes() {
    let csv = stdout(&["beam-pattern", "--theta", "0.3"]);
    assert_eq!(column_header(&csv), "theta,scheme,freq_label,gain");
    let rows = rows(&csv);
    // 2001-point grid x 2 schemes x 3 frequency labels.
    assert_eq!(rows.len(), 2001 * 6);
    for r in &rows {
        let theta: f64 = r[0].parse().unwrap();
        assert!((-1.0..=1.0).contains(&theta));
        assert!(["classical", "dpp"].contains(&r[1].as_str()));
        assert!(["f1", "fc", "fM"].contains(&r[2].as_str()));
        let gain: f64 = r[3].parse().unwrap();
        assert!((0.0..=1.0 + 1e-9).contains(&gain));
    }
    // DPP keeps its peak on target at the band edge; classical does not.
    let peak = |scheme: &str, label: &str| -> f64 {
        rows.iter()
            .filter(|r| r[1] == scheme && r[2] == label)
            .max_by(|a, b| {
                a[3].parse::<f64>()
                    .unwrap()
                    .partial_cmp(&b[3].parse::<f64>().unwrap())
                    .unwrap()
            })
            .map(|r| r[0].parse::<f64>().unwrap())
            .unwrap()
    };
    assert!((peak("dpp", "fM") - 0.3).abs() < 2e-3);
    assert!((peak("classical", "fM") - 0.3 / 1.0496).abs() < 2e-2);
}

#[test]
fn rate_sweep_vanishes_at_very_low_snr() {
    let csv = stdout(&["rate-sweep", "--trials", "1", "--snr-db", "-100"]);
    assert_eq!(column_header(&csv), "snr_db,scheme,mean_rate,stderr");
    let rows = rows(&csv);
    assert_eq!(rows.len(), 4); // three schemes + lower bound at one SNR
    for r in &rows {
        assert_eq!(r[0].parse::<f64>().unwrap(), -100.0);
        let rate: f64 = r[2].parse().unwrap();
        assert!(rate.abs() < 1e-6, "{}: {rate}", r[1]);
    }
}

#[test]
fn k_sweep_single_k_and_divisibility_check() {
    let csv = stdout(&["k-sweep", "--trials", "1", "--k", "8"]);
    assert_eq!(column_header(&csv), "k,mean_rate,stderr");
    let rows = rows(&csv);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "8");
    assert!(rows[0][1].parse::<f64>().unwrap() > 0.0);

    let out = beamsplit(&["k-sweep", "--trials", "1", "--k", "7"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reproducible_output_for_identical_spec() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = beamsplit(&[
            "rate-sweep",
            "--trials",
            "2",
            "--seed",
            "5",
            "--snr-db",
            "0",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let c = dir.path().join("c.csv");
    let out = beamsplit(&[
        "rate-sweep",
        "--trials",
        "2",
        "--seed",
        "6",
        "--snr-db",
        "0",
        "--out",
        c.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn plot_emission_is_a_pure_side_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let plain = dir.path().join("plain.csv");
    let plotted = dir.path().join("plotted.csv");
    let out = beamsplit(&["gain-profile", "--out", plain.to_str().unwrap()]);
    assert!(out.status.success());
    let out = beamsplit(&[
        "gain-profile",
        "--out",
        plotted.to_str().unwrap(),
        "--emit-plot",
    ]);
    assert!(out.status.success());
    assert_eq!(
        std::fs::read(&plain).unwrap(),
        std::fs::read(&plotted).unwrap()
    );
    let script = std::fs::read_to_string(dir.path().join("plotted.gp")).unwrap();
    assert!(script.contains("plotted.csv"));

    // Plot emission needs a file destination.
    let out = beamsplit(&["gain-profile", "--emit-plot"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_layering_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.cfg");
    std::fs::write(&cfg_path, "# overrides\nbandwidth = 0\nseed = 9\n").unwrap();
    let csv = stdout(&[
        "gain-profile",
        "--config",
        cfg_path.to_str().unwrap(),
        "--scheme",
        "classical",
    ]);
    assert!(csv.contains("bandwidth=0"));
    assert!(csv.contains("seed=9"));
    // At zero bandwidth the classical beam has no split: unit gain everywhere.
    for r in rows(&csv) {
        assert!((r[3].parse::<f64>().unwrap() - 1.0).abs() < 1e-6);
    }

    // Flags beat the file.
    let csv = stdout(&[
        "gain-profile",
        "--config",
        cfg_path.to_str().unwrap(),
        "--seed",
        "11",
    ]);
    assert!(csv.contains("seed=11"));
}

#[test]
fn bad_inputs_exit_2() {
    assert_eq!(beamsplit(&["no-such-experiment"]).status.code(), Some(2));
    assert_eq!(beamsplit(&["bsr", "--preset", "lte"]).status.code(), Some(2));
    assert_eq!(
        beamsplit(&["rate-sweep", "--trials", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        beamsplit(&["gain-profile", "--theta", "1.5"]).status.code(),
        Some(2)
    );

    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("bad.cfg");
    for bad in ["unknown_field = 3", "n_t = eleven", "k_td = 3"] {
        std::fs::write(&cfg_path, bad).unwrap();
        let out = beamsplit(&["bsr", "--config", cfg_path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "config `{bad}`: {out:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn unwritable_output_exits_3() {
    let out = beamsplit(&["bsr", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stderr.is_empty());
    assert!(Path::new("/nonexistent-dir").exists() == false);
}
