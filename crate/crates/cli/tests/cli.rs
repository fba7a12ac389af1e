use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bragg(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bragg")).current_dir(dir).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn generate_lattice_window() {
    let dir = TempDir::new().unwrap();
    let out = bragg(dir.path(), &["generate", "--lattice", "1", "--window", "-10", "10", "--out", "z.json"]);
    assert_eq!(code(&out), 0);
    let v = json(&dir.path().join("z.json"));
    let pts = v["points"].as_array().unwrap();
    assert_eq!(pts.len(), 21);
    assert_eq!(pts[0], serde_json::json!([-10.0]));
    assert_eq!(pts[20], serde_json::json!([10.0]));
}

/// Fibonacci word over {L, S} by the substitution L → LS, S → L.
fn fibonacci_word(min_len: usize) -> String {
    let mut w = String::from("L");
    while w.len() < min_len {
        w = w.chars().map(|c| if c == 'L' { "LS" } else { "L" }).collect();
    }
    w
}

#[test]
fn fibonacci_gaps_follow_the_substitution() {
    let dir = TempDir::new().unwrap();
    let out = bragg(dir.path(), &["generate", "--fibonacci", "--window", "0", "100", "--out", "f.json"]);
    assert_eq!(code(&out), 0);
    let v = json(&dir.path().join("f.json"));
    let xs: Vec<f64> = v["points"].as_array().unwrap().iter().map(|p| p[0].as_f64().unwrap()).collect();
    let tau = (1.0 + 5f64.sqrt()) / 2.0;
    let gaps: String = xs
        .windows(2)
        .map(|w| {
            let g = w[1] - w[0];
            if (g - tau).abs() < 1e-9 {
                'L'
            } else {
                assert!((g - 1.0).abs() < 1e-9, "gap {g}");
                'S'
            }
        })
        .collect();
    assert!(gaps.len() > 60);
    assert!(fibonacci_word(5000).contains(&gaps), "gap word {gaps} is not a Fibonacci factor");
}

#[test]
fn zpz_sparseness_exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&bragg(dir.path(), &["generate", "--example", "zpz", "--out", "zpz.json"])), 0);
    // long alias kept for compatibility
    assert_eq!(code(&bragg(dir.path(), &["generate", "--paper-example", "zpz", "--out", "zpz2.json"])), 0);
    assert_eq!(fs::read(dir.path().join("zpz.json")).unwrap(), fs::read(dir.path().join("zpz2.json")).unwrap());
    let m = json(&dir.path().join("zpz.json"));
    assert_eq!(m["atoms"].as_array().unwrap().len(), 199);

    let below = bragg(dir.path(), &["sparse", "--input", "zpz.json", "--a", "1.2", "--out", "s.json"]);
    assert_eq!(code(&below), 2);
    let r = json(&dir.path().join("s.json"));
    assert_eq!(r["hypothesis_met"], false);
    assert!(r["b"].as_f64().unwrap() < 0.0);

    let above = bragg(dir.path(), &["sparse", "--input", "zpz.json", "--a", "1.5", "--out", "s2.json"]);
    assert_eq!(code(&above), 0);
}

#[test]
fn autocorrelation_passes_krein() {
    let dir = TempDir::new().unwrap();
    bragg(dir.path(), &["generate", "--fibonacci", "--window", "-40", "40", "--out", "f.json"]);
    assert_eq!(code(&bragg(dir.path(), &["autocorr", "--input", "f.json", "--half", "20", "--out", "ac.json"])), 0);
    let out = bragg(dir.path(), &["krein", "--input", "ac.json", "--out", "k.json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&dir.path().join("k.json"))["status"], "holds");
}

fn write_union_third(path: &Path) {
    let mut pts: Vec<f64> = (-10..=10).map(f64::from).collect();
    pts.extend((-11..10).map(|i| f64::from(i) + 1.0 / 3.0).filter(|x| x.abs() <= 10.0));
    pts.sort_by(f64::total_cmp);
    let v = serde_json::json!({
        "dim": 1,
        "points": pts.iter().map(|x| [x]).collect::<Vec<_>>(),
        "window": {"lo": [-10.0], "hi": [10.0]},
        "generator": {"kind": "explicit"},
    });
    fs::write(path, v.to_string()).unwrap();
}

#[test]
fn rigidity_refutes_with_witness() {
    let dir = TempDir::new().unwrap();
    write_union_third(&dir.path().join("zu.json"));
    let out = bragg(dir.path(), &["rigidity", "--input", "zu.json", "--out", "r.json"]);
    assert_eq!(code(&out), 1);
    let r = json(&dir.path().join("r.json"));
    assert_eq!(r["agree"], true);
    assert!(!r["subgroup"]["witness"].is_null());
    assert!(!r["gram"]["hermitian_violation"].is_null() || !r["gram"]["witness"].is_null());

    bragg(dir.path(), &["generate", "--lattice", "1", "--scale", "2", "--window", "-20", "20", "--out", "z2.json"]);
    assert_eq!(code(&bragg(dir.path(), &["rigidity", "--input", "z2.json"])), 0);
}

#[test]
fn reports_are_byte_identical_for_a_seed() {
    let dir = TempDir::new().unwrap();
    bragg(dir.path(), &["generate", "--lattice", "2", "--window", "-6", "6", "--out", "z2.json"]);
    let run = |seed: &str, threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_bragg"))
            .current_dir(dir.path())
            .env("BRAGG_THREADS", threads)
            .args(["--seed", seed, "rigidity", "--input", "z2.json"])
            .output()
            .unwrap();
        assert_eq!(code(&out), 0);
        out.stdout
    };
    let a = run("7", "1");
    assert_eq!(a, run("7", "4"));
    assert_eq!(a, run("7", "2"));
}

#[test]
fn diffract_writes_peaks_and_meyer_report() {
    let dir = TempDir::new().unwrap();
    bragg(dir.path(), &["generate", "--lattice", "1", "--window", "-40", "40", "--out", "z.json"]);
    let out = bragg(
        dir.path(),
        &["diffract", "--input", "z.json", "--family", "geometric:4", "--dual-window", "3", "--out", "peaks.csv"],
    );
    assert_eq!(code(&out), 0);
    let csv = fs::read_to_string(dir.path().join("peaks.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("k1,intensity,stderr_proxy,converged"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 7);
    for r in &rows {
        let k: f64 = r[0].parse().unwrap();
        let i: f64 = r[1].parse().unwrap();
        assert_eq!(k, k.round());
        // ((2s+1)/2s)² with s = 40
        assert!((i - (81.0f64 / 80.0).powi(2)).abs() < 1e-9);
    }

    let met = bragg(
        dir.path(),
        &["diffract", "--input", "z.json", "--family", "geometric:4", "--a", "0.9", "--report", "t.json"],
    );
    assert_eq!(code(&met), 0);
    assert_eq!(json(&dir.path().join("t.json"))["hypothesis"], "met");
    let unmet = bragg(dir.path(), &["diffract", "--input", "z.json", "--family", "geometric:4", "--a", "0.5"]);
    assert_eq!(code(&unmet), 2);
}

#[test]
fn epsdual_on_the_integers() {
    let dir = TempDir::new().unwrap();
    bragg(dir.path(), &["generate", "--lattice", "1", "--window", "-10", "10", "--out", "z.json"]);
    assert_eq!(code(&bragg(dir.path(), &["epsdual", "--input", "z.json", "--eps", "0.5", "--out", "e.json"])), 0);
    let e = json(&dir.path().join("e.json"));
    assert_eq!(e["representatives"]["points"].as_array().unwrap().len(), 21);
    let out = bragg(dir.path(), &["epsdual", "--input", "z.json", "--eps", "0.5", "--verify", "--out", "t.json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&dir.path().join("t.json"))["verdict"], "pass");
}

#[test]
fn reproduce_writes_a_bundle() {
    let dir = TempDir::new().unwrap();
    let out = bragg(dir.path(), &["reproduce", "theorem2_lattice", "--out", "bundle"]);
    assert_eq!(code(&out), 0);
    let exp = json(&dir.path().join("bundle/expectations.json"));
    assert!(exp["expectations"].as_array().unwrap().iter().all(|e| e["ok"] == true));
}

#[test]
fn errors_exit_with_three() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&bragg(dir.path(), &["reproduce", "nope", "--out", "x"])), 3);
    assert_eq!(code(&bragg(dir.path(), &["krein", "--input", "missing.json"])), 3);
    assert_eq!(code(&bragg(dir.path(), &["generate", "--lattice", "1", "--window", "3", "-3"])), 3);
    fs::write(dir.path().join("junk.json"), "{\"x\": 1}").unwrap();
    assert_eq!(code(&bragg(dir.path(), &["rigidity", "--input", "junk.json"])), 3);
    assert_eq!(code(&bragg(dir.path(), &["diffract", "--input", "junk.json"])), 3);
}
