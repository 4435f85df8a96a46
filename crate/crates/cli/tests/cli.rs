use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_block-casimir"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn spectrum_csv_has_header_and_full_precision() {
    let out = run(&["spectrum", "--material", "gold", "--length", "1um", "--grid", "0.1:20:400", "--serial"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(header, ["omega_eV", "W", "W_free", "W_bulk", "W_C"]);
    assert_eq!(rows.len(), 400);
    for cell in rows.iter().flatten() {
        let mantissa = cell.split('e').next().unwrap().replace(['-', '.'], "");
        assert!(mantissa.len() >= 15, "{cell}");
    }
    // Damped below the plasma frequency.
    let at_5 = rows.iter().find(|r| r[0].parse::<f64>().unwrap() > 5.0).unwrap();
    assert!(at_5[1].parse::<f64>().unwrap() < at_5[2].parse::<f64>().unwrap());
}

#[test]
fn json_round_trips_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("s.json");
    let csv_path = dir.path().join("s.csv");
    let base = ["spectrum", "--material", "dielectric", "--length", "10um", "--grid", "0.1:20:300", "--serial"];
    let out = run(&[&base[..], &["--format", "json", "--out", json_path.to_str().unwrap()]].concat());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    run(&[&base[..], &["--out", csv_path.to_str().unwrap()]].concat());

    let text = std::fs::read_to_string(&json_path).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&value).unwrap() + "\n", text);

    assert_eq!(value["meta"]["command"], "spectrum");
    assert_eq!(value["meta"]["config"]["length"]["inv_ev"].as_f64(), Some(50.68));
    assert_eq!(value["meta"]["config"]["material"]["model"]["omega0"].as_f64(), Some(5.0));
    assert!(value["meta"]["version"].is_string());

    let (_, csv) = csv_rows(&std::fs::read_to_string(&csv_path).unwrap());
    let rows = value["rows"].as_array().unwrap();
    assert_eq!(rows.len(), csv.len());
    for (json_row, csv_row) in rows.iter().zip(&csv) {
        for (key, cell) in ["omega_eV", "W", "W_free", "W_bulk", "W_C"].iter().zip(csv_row) {
            let a = json_row[key].as_f64().unwrap();
            let b: f64 = cell.parse().unwrap();
            assert_eq!(a.to_bits(), b.to_bits(), "{key}");
        }
    }
}

#[test]
fn identical_config_gives_identical_bytes() {
    let args = ["spectrum", "--material", "gold", "--length", "10um", "--grid", "0.1:20:500", "--format", "json", "--serial"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let parallel = run(&args[..args.len() - 1]);
    let strip = |o: &Output| {
        let mut v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v["meta"]["config"]["serial"] = serde_json::Value::Null;
        v
    };
    assert_eq!(strip(&a), strip(&parallel));
}

#[test]
fn vacuum_spectrum_is_free_space() {
    let out = run(&["spectrum", "--material", "vacuum", "--length", "5.068inv_eV", "--grid", "0.1:20:100"]);
    let (_, rows) = csv_rows(&stdout(&out));
    for row in rows {
        assert_eq!(row[1], row[2]);
        assert_eq!(row[4].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn zero_damping_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let material = dir.path().join("lossless.toml");
    std::fs::write(&material, "omega0 = 0.0\nomega_p = 8.45\ngamma = 0.0\n").unwrap();
    let out = run(&["spectrum", "--material", material.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("gamma"), "{}", stderr(&out));

    let config = dir.path().join("run.toml");
    std::fs::write(&config, "material = { omega0 = 5.0, omega_p = 8.0, gamma = 0.0 }\n").unwrap();
    let out = run(&["verify", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_errors_name_the_field() {
    for (args, field) in [
        (vec!["spectrum", "--grid", "0.1:20:1"], "grid"),
        (vec!["spectrum", "--length", "3"], "length"),
        (vec!["spectrum", "--tol", "0"], "tol"),
        (vec!["spectrum", "--material", "unobtainium"], "material"),
        (vec!["variance", "--length", "1um"], "omega"),
        (vec!["variance", "--omega", "2", "--length", "2inv_eV", "--positions", "0:2:3"], "positions"),
        (vec!["kk-check", "--cutoff", "10"], "cutoff"),
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(stderr(&out).contains(&format!("`{field}`")), "{args:?}: {}", stderr(&out));
    }
    assert_eq!(run(&["spectrum", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "material = \"gold\"\nlength = \"1um\"\ngrid = \"1:2:3\"\nformat = \"json\"\nserial = true\n").unwrap();
    let out = run(&["spectrum", "--config", config.to_str().unwrap(), "--grid", "1:3:5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);
    assert_eq!(v["meta"]["config"]["serial"], true);

    std::fs::write(&config, "colour = \"blue\"\n").unwrap();
    assert_eq!(run(&["spectrum", "--config", config.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn variance_outside_energy_is_flat() {
    let out = run(&["variance", "--material", "gold", "--length", "1um", "--omega", "2", "--positions", "-10:20:60"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(header, ["x_inv_eV", "region", "dE2", "dB2", "u"]);
    let expected = 2.0 / (2.0 * std::f64::consts::PI);
    for row in rows.iter().filter(|r| r[1] != "inside") {
        let u: f64 = row[4].parse().unwrap();
        assert!((u - expected).abs() < 1e-12 * expected);
    }
    assert!(rows.iter().any(|r| r[1] == "inside"));
}

#[test]
fn total_energy_sweep() {
    let out = run(&["total-energy", "--material", "gold", "--lengths", "0.1um,1um", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for row in v["rows"].as_array().unwrap() {
        let e = row["E_C"].as_f64().unwrap();
        let err = row["error_estimate"].as_f64().unwrap();
        assert!(e > err && err > 0.0);
        assert_eq!(row["status"], "ok");
    }

    let out = run(&["total-energy", "--material", "vacuum", "--length", "1um", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let row = &v["rows"][0];
    assert!(row["E_C"].as_f64().unwrap().abs() <= row["error_estimate"].as_f64().unwrap());
}

#[test]
fn kk_check_reports_residual() {
    let out = run(&["kk-check", "--material", "gold", "--grid", "0.5:20:40", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["meta"]["summary"]["max_residual"].as_f64().unwrap() < 1e-3);
    assert_eq!(v["rows"].as_array().unwrap().len(), 40);
}

#[test]
fn verify_passes_and_mutation_fails() {
    let out = run(&["verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(header, ["check", "measured", "threshold", "passed"]);
    assert!(rows.iter().all(|r| r[3] == "true"));
    assert!(rows.iter().any(|r| r[0].starts_with("gold")) && rows.iter().any(|r| r[0].starts_with("dielectric")));

    let out = run(&["verify", "--corrupt-alpha-sign"]);
    assert_eq!(out.status.code(), Some(2));
    let (_, rows) = csv_rows(&stdout(&out));
    let failed: Vec<_> = rows.iter().filter(|r| r[3] == "false").collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|r| r[0].contains("integral of u")));
}

#[test]
fn output_to_unwritable_path_is_an_io_error() {
    let out = run(&["spectrum", "--grid", "1:2:2", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("/nonexistent-dir/x.csv"));
    assert!(!Path::new("/nonexistent-dir/x.csv").exists());
}
