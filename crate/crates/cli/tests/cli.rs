use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn xxz(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xxz"))
        .args(args)
        .current_dir(dir)
        .env("XXZ_CACHE_DIR", dir.join("cache"))
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = xxz(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap()
}

fn assert_schema_valid(doc: &Value) {
    let schema: Value = serde_json::from_str(xxz_cli::SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "schema violations: {errors:?}");
}

fn cache_entries(dir: &Path) -> usize {
    fs::read_dir(dir.join("cache")).map_or(0, |d| d.count())
}

#[test]
fn flags_override_config_file() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("run.toml"), "[spectrum]\nn = 3\neta = 0.5\nout = \"from-file\"\n").unwrap();
    ok(tmp.path(), &["--config", "run.toml", "spectrum", "--eta", "0.6"]);
    let doc = json(tmp.path().join("from-file/spectrum.json"));
    assert_eq!(doc["params"]["n_sites"], 3);
    assert_eq!(doc["params"]["eta"]["re"], 0.6);
    assert_eq!(doc["records"].as_array().unwrap().len(), 8);
    assert_schema_valid(&doc);
}

#[test]
fn cache_hit_reproduces_bytes() {
    let tmp = TempDir::new().unwrap();
    let first = ok(tmp.path(), &["spectrum", "--n", "4", "--thetas", "0.1,-0.2,0.3,0", "--out", "a"]);
    assert!(String::from_utf8_lossy(&first.stdout).contains("computed"));
    assert_eq!(cache_entries(tmp.path()), 1);
    let second = ok(tmp.path(), &["spectrum", "--n", "4", "--thetas", "0.1,-0.2,0.3,0", "--out", "b"]);
    assert!(String::from_utf8_lossy(&second.stdout).contains("cache"));
    let a = fs::read(tmp.path().join("a/spectrum.json")).unwrap();
    let b = fs::read(tmp.path().join("b/spectrum.json")).unwrap();
    assert_eq!(a, b);

    // a permutation of θ shares the key but not the document
    ok(tmp.path(), &["spectrum", "--n", "4", "--thetas", "0,0.3,-0.2,0.1", "--out", "c"]);
    let c = json(tmp.path().join("c/spectrum.json"));
    assert_eq!(c["params"]["thetas"][0], 0.0);
    assert_eq!(cache_entries(tmp.path()), 1);

    ok(tmp.path(), &["spectrum", "--n", "3", "--no-cache", "true", "--out", "d"]);
    assert_eq!(cache_entries(tmp.path()), 1);
}

#[test]
fn cache_dir_flag_beats_environment() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["spectrum", "--n", "2", "--cache-dir", "elsewhere"]);
    assert_eq!(cache_entries(tmp.path()), 0);
    assert_eq!(fs::read_dir(tmp.path().join("elsewhere")).unwrap().count(), 1);
}

#[test]
fn invalid_input_exits_1() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("bad.toml"), "[spectrum]\nn = 3\nsize = 4\n").unwrap();
    let cases: [&[&str]; 6] = [
        &["spectrum", "--n", "20"],
        &["spectrum", "--n", "3", "--thetas", "0.1,0.2"],
        &["spectrum", "--bogus", "1"],
        &["--config", "bad.toml", "spectrum"],
        &["dispersion", "--points", "0"],
        &["thermo", "--case", "af-even", "--n", "9"],
    ];
    for args in cases {
        let out = xxz(tmp.path(), args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn roots_csv_uses_17_digits_and_lf() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["roots", "--n", "3", "--all", "true", "--out", "r"]);
    let text = fs::read_to_string(tmp.path().join("r/roots.csv")).unwrap();
    assert!(!text.contains('\r'));
    assert!(text.ends_with('\n'));
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let header = rows.headers().unwrap().clone();
    assert_eq!(
        header.iter().collect::<Vec<_>>(),
        ["record", "energy", "momentum", "root", "re", "im", "tag", "partner", "string"]
    );
    let mut records = std::collections::BTreeSet::new();
    for row in rows.records() {
        let row = row.unwrap();
        records.insert(row[0].parse::<usize>().unwrap());
        for field in [&row[1], &row[4], &row[5]] {
            let mantissa = field.split('e').next().unwrap().trim_start_matches('-');
            let digits = mantissa.chars().filter(char::is_ascii_digit).count();
            assert_eq!(digits, 17, "{field}");
            assert!(field.parse::<f64>().unwrap().is_finite());
        }
    }
    // records without roots contribute no rows
    assert!(records.len() >= 4);
}

#[test]
fn continuation_reaches_homogeneous_state() {
    let tmp = TempDir::new().unwrap();
    ok(
        tmp.path(),
        &["continue", "--n", "4", "--thetas", "0.1,-0.2,0.3,0.05", "--steps", "4", "--out", "c"],
    );
    let doc = json(tmp.path().join("c/continuation.json"));
    assert_schema_valid(&doc);
    assert!(doc["ed_match"]["energy_delta"].as_f64().unwrap() < 1e-9);
    assert!(doc["ed_match"]["root_distance"].as_f64().unwrap() < 1e-6);
}

#[test]
fn bae_recovers_full_spectrum_at_n3() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["bae", "--n", "3", "--starts", "60", "--out", "b"]);
    let doc = json(tmp.path().join("b/bae.json"));
    assert_schema_valid(&doc);
    assert_eq!(doc["coverage"], 1.0);
    assert!(!doc["solutions"].as_array().unwrap().is_empty());
}

#[test]
fn thermo_cases_validate() {
    let tmp = TempDir::new().unwrap();
    let cases: [&[&str]; 5] = [
        &["--case", "ferro-ground"],
        &["--case", "ferro-excited", "--alpha", "-1.2"],
        &["--case", "af-even", "--beta", "0.1"],
        &["--case", "af-odd-ground", "--n", "9"],
        &["--case", "af-odd-excited", "--n", "9", "--p", "0.3", "--q", "-0.4"],
    ];
    for (i, case) in cases.iter().enumerate() {
        let out = format!("t{i}");
        let mut args = vec!["thermo", "--truncation", "40", "--points", "11", "--out", &out];
        args.extend_from_slice(case);
        ok(tmp.path(), &args);
        let doc = json(tmp.path().join(&out).join("thermo.json"));
        assert_schema_valid(&doc);
        assert!(doc["solve_closed_gap"].as_f64().unwrap() < 1e-8, "{case:?}");
        let csv = fs::read_to_string(tmp.path().join(&out).join("density.csv")).unwrap();
        assert_eq!(csv.lines().count(), 12);
    }
}

#[test]
fn fit_over_small_sizes_validates() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["fit", "--case", "ferro-ground", "--sizes", "4,5,6", "--out", "f"]);
    let doc = json(tmp.path().join("f/fit.json"));
    assert_schema_valid(&doc);
    assert_eq!(doc["points"].as_array().unwrap().len(), 3);
    assert!(doc["fit"]["rate"].as_f64().unwrap() > 0.0);
    let out = xxz(tmp.path(), &["fit", "--case", "ferro-ground", "--sizes", "4,5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn dispersion_single_point() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["dispersion", "--points", "1", "--out", "d"]);
    let text = fs::read_to_string(tmp.path().join("d/dispersion.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, ["t,epsilon,zeta", &lines[1]]);
    assert!(lines[1].starts_with("0.0000000000000000e0,"));
}

#[test]
fn reproduce_fig7_passes_and_validates() {
    let tmp = TempDir::new().unwrap();
    let out = ok(tmp.path(), &["reproduce", "--figure", "fig7", "--out", "rep"]);
    assert!(!String::from_utf8_lossy(&out.stdout).contains("FAIL"));
    let manifest = json(tmp.path().join("rep/fig7/manifest.json"));
    assert_schema_valid(&manifest);
    assert_eq!(manifest["passed"], true);
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
    for name in manifest["outputs"].as_array().unwrap() {
        assert!(tmp.path().join("rep/fig7").join(name.as_str().unwrap()).exists());
    }
}

#[test]
fn schema_rejects_malformed_documents() {
    let schema: Value = serde_json::from_str(xxz_cli::SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let bad = serde_json::json!({ "kind": "fit", "case": "ferro-ground", "eta": 0.75, "points": [] });
    assert!(!validator.is_valid(&bad));
    let extra = serde_json::json!({ "params": {}, "records": [], "extra": 1 });
    assert!(!validator.is_valid(&extra));
}
