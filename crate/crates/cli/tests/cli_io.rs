//! Command-line I/O contracts: scenario parsing, CSV shape and
//! determinism, unit conversion at the formatting layer, and exit codes.

use isac_rdb_cli::scenario::ScenarioFile;
use std::path::PathBuf;
use std::process::Command;

fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_isac-rdb"))
}

fn tmp(name: &str) -> PathBuf {
    std::env::temp_dir().join(name)
}

fn parse_csv(text: &str) -> Vec<Vec<Option<f64>>> {
    text.lines()
        .skip(1)
        .map(|line| {
            line.split(',')
                .map(|cell| {
                    if cell.is_empty() {
                        None
                    } else {
                        Some(cell.parse::<f64>().expect("plain decimal cell"))
                    }
                })
                .collect()
        })
        .collect()
}

#[test]
fn bundled_scenarios_parse_and_match_presets() {
    for (name, shape) in [
        ("nakagami-m05.json", 0.5),
        ("nakagami-m1.json", 1.0),
        ("nakagami-m2.json", 2.0),
    ] {
        let text = std::fs::read_to_string(scenario_path(name)).unwrap();
        let file = ScenarioFile::parse(&text).unwrap();
        let cfg = file.system_config().unwrap();
        let preset = isac_rdb::presets::nakagami_mimo(shape);
        assert_eq!(cfg.tx_antennas, preset.tx_antennas);
        assert_eq!(cfg.coherence_length, preset.coherence_length);
        assert_eq!(cfg.avg_power, preset.avg_power);
        assert_eq!(cfg.sensing_fading, preset.sensing_fading);
        assert_eq!(cfg.comm_fading, preset.comm_fading);
    }
    let text = std::fs::read_to_string(scenario_path("occupancy.json")).unwrap();
    let file = ScenarioFile::parse(&text).unwrap();
    let occ = file.occupancy_config().unwrap();
    let preset = isac_rdb::presets::occupancy_4x4();
    assert_eq!(occ.p1, preset.p1);
    assert_eq!(occ.alpha_mag, preset.alpha_mag);
    assert_eq!(occ.system.comm_noise_var, preset.system.comm_noise_var);
    assert!(occ.steering.sub(&preset.steering).frobenius_norm() < 1e-12);
}

#[test]
fn scenario_round_trip_through_serialization() {
    for name in ["nakagami-m1.json", "occupancy.json"] {
        let text = std::fs::read_to_string(scenario_path(name)).unwrap();
        let parsed = ScenarioFile::parse(&text).unwrap();
        let serialized = serde_json::to_string_pretty(&parsed).unwrap();
        let reparsed = ScenarioFile::parse(&serialized).unwrap();
        assert_eq!(parsed, reparsed);
    }
}

#[test]
fn repeated_invocations_are_byte_identical() {
    let a = tmp("isac_rdb_det_a.csv");
    let b = tmp("isac_rdb_det_b.csv");
    for out in [&a, &b] {
        let status = bin()
            .args([
                "region-occupancy",
                "--scenario",
                scenario_path("occupancy.json").to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
                "--draws",
                "24",
                "--sweep",
                "4",
            ])
            .status()
            .unwrap();
        assert!(status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn severe_fading_leaves_bcrb_columns_empty() {
    let out = tmp("isac_rdb_m05.csv");
    let status = bin()
        .args([
            "region-nakagami",
            "--scenario",
            scenario_path("nakagami-m05.json").to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--draws",
            "16",
            "--sweep",
            "4",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(
        text.starts_with("sweep_param,D_rdb,D_rdb_stderr,R_mean,R_stderr,D_bcrb,D_bcrb_stderr\n")
    );
    let rows = parse_csv(&text);
    assert_eq!(rows.len(), 4);
    for row in &rows {
        assert_eq!(row.len(), 7);
        assert!(row[5].is_none(), "D_bcrb should be empty at m = 0.5");
        assert!(row[6].is_none());
        assert!(row[1].unwrap() > 0.0);
    }
    // rows ordered by the sweep parameter
    let sweep: Vec<f64> = rows.iter().map(|r| r[0].unwrap()).collect();
    assert!(sweep.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn occupancy_csv_shape_and_bits_flag() {
    let nats = tmp("isac_rdb_occ_nats.csv");
    let bits = tmp("isac_rdb_occ_bits.csv");
    for (out, flag) in [(&nats, false), (&bits, true)] {
        let mut args = vec![
            "region-occupancy".to_string(),
            "--scenario".into(),
            scenario_path("occupancy.json").to_str().unwrap().into(),
            "--out".into(),
            out.to_str().unwrap().to_string(),
            "--draws".into(),
            "16".into(),
            "--sweep".into(),
            "4".into(),
        ];
        if flag {
            args.push("--bits".into());
        }
        let status = bin().args(&args).status().unwrap();
        assert!(status.success());
    }
    let rows_nats = parse_csv(&std::fs::read_to_string(&nats).unwrap());
    let rows_bits = parse_csv(&std::fs::read_to_string(&bits).unwrap());
    assert_eq!(rows_nats[0][1].unwrap(), 0.5, "first row D at γ = 0");
    for (rn, rb) in rows_nats.iter().zip(&rows_bits) {
        // D and γ untouched; rates divided by ln 2 at the formatting layer
        assert_eq!(rn[0], rb[0]);
        assert_eq!(rn[1], rb[1]);
        let ratio = rn[2].unwrap() / rb[2].unwrap();
        assert!((ratio - std::f64::consts::LN_2).abs() < 1e-12);
    }
}

#[test]
fn relaxed_and_two_stage_bounds_agree() {
    let two = tmp("isac_rdb_occ_two.csv");
    let rel = tmp("isac_rdb_occ_rel.csv");
    for (out, flag) in [(&two, false), (&rel, true)] {
        let mut args = vec![
            "region-occupancy".to_string(),
            "--scenario".into(),
            scenario_path("occupancy.json").to_str().unwrap().into(),
            "--out".into(),
            out.to_str().unwrap().to_string(),
            "--draws".into(),
            "12".into(),
            "--sweep".into(),
            "5".into(),
        ];
        if flag {
            args.push("--relaxed-bound".into());
        }
        let status = bin().args(&args).status().unwrap();
        assert!(status.success());
    }
    let rows_two = parse_csv(&std::fs::read_to_string(&two).unwrap());
    let rows_rel = parse_csv(&std::fs::read_to_string(&rel).unwrap());
    for (a, b) in rows_two.iter().zip(&rows_rel) {
        assert!((a[1].unwrap() - b[1].unwrap()).abs() <= 1e-9);
        assert_eq!(a[2], b[2], "rates must be identical");
    }
}

#[test]
fn rd_oracle_column_tracks_closed_form() {
    let out = tmp("isac_rdb_rd4.csv");
    let status = bin()
        .args([
            "rd",
            "--source",
            "uniform:4",
            "--grid",
            "9",
            "--out",
            out.to_str().unwrap(),
            "--oracle",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("D,R_closed,R_oracle\n"));
    let rows = parse_csv(&text);
    assert_eq!(rows.len(), 9);
    assert!((rows[0][1].unwrap() - 4f64.ln()).abs() < 1e-12);
    for row in &rows {
        // the uniform Hamming closed form is tight, so the oracle agrees
        assert!(
            (row[1].unwrap() - row[2].unwrap()).abs() <= 1e-6,
            "D = {:?}",
            row[0]
        );
    }
}

#[test]
fn kl_convention_flag_changes_the_detection_bound() {
    let on = tmp("isac_rdb_occ_klon.csv");
    let off = tmp("isac_rdb_occ_kloff.csv");
    for (out, value) in [(&on, "on"), (&off, "off")] {
        let status = bin()
            .args([
                "region-occupancy",
                "--scenario",
                scenario_path("occupancy.json").to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
                "--draws",
                "8",
                "--sweep",
                "3",
                "--paper-kl-convention",
                value,
            ])
            .status()
            .unwrap();
        assert!(status.success());
    }
    let rows_on = parse_csv(&std::fs::read_to_string(&on).unwrap());
    let rows_off = parse_csv(&std::fs::read_to_string(&off).unwrap());
    // γ = 0: both conventions sit at the guessing error
    assert_eq!(rows_on[0][1].unwrap(), 0.5);
    assert_eq!(rows_off[0][1].unwrap(), 0.5);
    // beyond that the standard convention doubles the average divergence,
    // so its detection bound is strictly smaller; rates are untouched
    assert!(rows_off[1][1].unwrap() < rows_on[1][1].unwrap());
    assert_eq!(rows_on[1][2], rows_off[1][2]);
}

#[test]
fn single_point_sweep_is_the_pinned_endpoint() {
    let out = tmp("isac_rdb_occ_one.csv");
    let status = bin()
        .args([
            "region-occupancy",
            "--scenario",
            scenario_path("occupancy.json").to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--draws",
            "8",
            "--sweep",
            "1",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let rows = parse_csv(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 1);
    // the single grid point sits at the full budget: rank-one beamforming
    assert_eq!(rows[0][0].unwrap(), 640.0);
    assert!(rows[0][1].unwrap() < 1e-6);
}

#[test]
fn exit_codes() {
    // config errors: 2
    let status = bin()
        .args([
            "region-nakagami",
            "--scenario",
            "/nonexistent.json",
            "--out",
            tmp("x.csv").to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // occupancy command on a scenario without an occupancy section: 2
    let status = bin()
        .args([
            "region-occupancy",
            "--scenario",
            scenario_path("nakagami-m1.json").to_str().unwrap(),
            "--out",
            tmp("x.csv").to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // unknown verification filter: 2
    let status = bin()
        .args(["verify", "--only", "bogus-check"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // bad usage (unknown flag): 2 via the argument parser
    let status = bin().args(["rd", "--nope"]).status().unwrap();
    assert_eq!(status.code(), Some(2));

    // a passing single check: 0, and the report is valid JSON
    let output = bin()
        .args(["verify", "--only", "gaussian-equality"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let reports: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(reports.as_array().unwrap().len(), 1);
    assert_eq!(reports[0]["pass"], serde_json::Value::Bool(true));
}
