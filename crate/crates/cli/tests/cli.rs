use std::path::PathBuf;
use std::process::{Command, Output};

fn toolkit() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_toolkit"));
    c.env_remove("TOOLKIT_SEED");
    c
}

fn repo() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn traces() -> Vec<PathBuf> {
    let mut v: Vec<_> = std::fs::read_dir(repo().join("traces"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .collect();
    v.sort();
    v
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn number_after(text: &str, key: &str) -> (f64, f64) {
    let line = text.lines().find(|l| l.starts_with(key)).expect(key);
    let mut it = line[key.len()..].split_whitespace();
    let v = it.next().unwrap().parse().unwrap();
    assert_eq!(it.next(), Some("±"));
    (v, it.next().unwrap().parse().unwrap())
}

#[test]
fn bundled_traces_give_reference_finesse() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fits.csv");
    let o = toolkit()
        .args(["fit-ringdown", "--fsr-hz", "7.410e9", "--fsr-sigma-hz", "13e6", "--out"])
        .arg(&csv)
        .args(traces())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (f, s) = number_after(&stdout(&o), "finesse");
    assert!((f - 14168.0).abs() < s, "{f} ± {s}");
    assert!((200.0..300.0).contains(&s), "{s}");
    let text = std::fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("trace,linewidth_hz,sigma_hz,v0\n"));
    assert_eq!(text.lines().count(), 1 + traces().len());
}

#[test]
fn length_instead_of_fsr() {
    let o = toolkit()
        .args(["fit-ringdown", "--length-m", "0.0202"])
        .args(traces())
        .output()
        .unwrap();
    assert!(o.status.success());
    let (f, _) = number_after(&stdout(&o), "finesse");
    assert!((f / 14168.0 - 1.0).abs() < 0.03, "{f}");
}

#[test]
fn noiseless_trace_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let o = toolkit()
        .args(["synth-traces", "--count", "1", "--noise", "0", "--out-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    let o = toolkit()
        .args(["fit-ringdown", "--fsr-hz", "7.41e9"])
        .arg(dir.path().join("trace_00.csv"))
        .output()
        .unwrap();
    assert!(o.status.success());
    let (lw, s) = number_after(&stdout(&o), "pooled linewidth");
    assert!((lw - 523.0).abs() < 1e-6, "{lw}");
    assert!(s < 1e-6, "{s}");
}

#[test]
fn empty_trace_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "").unwrap();
    let o = toolkit()
        .args(["fit-ringdown", "--fsr-hz", "7.41e9"])
        .arg(&empty)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn bad_file_among_good_ones_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "t,v\n0,1\n").unwrap();
    let o = toolkit()
        .args(["fit-ringdown", "--fsr-hz", "7.41e9"])
        .arg(&bad)
        .args(traces())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.csv"));
}

#[test]
fn reproduce_paper_passes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let o = toolkit()
            .args(["reproduce-paper", "--samples", "20000", "--out"])
            .arg(&path)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        (stdout(&o), std::fs::read(path).unwrap())
    };
    let (text, a) = run("a.csv");
    let (_, b) = run("b.csv");
    assert_eq!(a, b);
    assert!(text.contains("MISMATCH-DOCUMENTED"));
    let csv = String::from_utf8(a).unwrap();
    assert!(csv.starts_with("id,quantity,unit,computed,sigma,paper,rel_deviation,status,note\n"));
    let kappa_match = csv
        .lines()
        .filter(|l| l.starts_with("kappa_") && l.contains(",MATCH,"))
        .count();
    assert_eq!(kappa_match, 4);
    assert!(csv.lines().any(|l| l.starts_with("kappa_zno_128d") && l.contains("MISMATCH-DOCUMENTED")));
    assert!(csv.lines().any(|l| l.starts_with("gate_claim") && l.contains("MISMATCH-DOCUMENTED")));
    assert!(csv.lines().any(|l| l.starts_with("gate_fractional") && l.contains(",MATCH,")));
}

#[test]
fn budget_cooling_on_bundled_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let sweep = dir.path().join("sweep.csv");
    let o = toolkit()
        .args(["budget", "--target", "cooling", "--scenario"])
        .arg(repo().join("paper_yb.scenario"))
        .arg("--sweep-out")
        .arg(&sweep)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let line = text.lines().find(|l| l.trim_start().starts_with("q1_max")).unwrap();
    let q: f64 = line.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((q / 1400.0 - 1.0).abs() < 0.05, "{q}");
    let csv = std::fs::read_to_string(sweep).unwrap();
    assert_eq!(csv.lines().next(), Some("q1_e,carrier_intensity_factor"));
    assert_eq!(csv.lines().count(), 201);
}

#[test]
fn seed_override() {
    let dir = tempfile::tempdir().unwrap();
    let run = |seed: Option<&str>| {
        let mut c = toolkit();
        if let Some(s) = seed {
            c.env("TOOLKIT_SEED", s);
        }
        let o = c
            .args(["budget", "--target", "rydberg-gate", "--scenario"])
            .arg(repo().join("paper_yb.scenario"))
            .arg("--sweep-out")
            .arg(dir.path().join("s.csv"))
            .output()
            .unwrap();
        (o.status.code(), stdout(&o))
    };
    let (code, base) = run(None);
    assert_eq!(code, Some(0));
    assert!(base.contains("seed 0"));
    let (_, seeded) = run(Some("7"));
    assert!(seeded.contains("seed 7"));
    assert_ne!(base, seeded);
    assert_eq!(run(Some("not-a-number")).0, Some(2));
}

#[test]
fn budget_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let sc = dir.path().join("bare.scenario");
    std::fs::write(&sc, "name = \"bare\"\n").unwrap();
    let o = toolkit()
        .args(["budget", "--target", "cooling", "--scenario"])
        .arg(&sc)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("section required"));
    let o = toolkit()
        .args(["budget", "--target", "warp-drive", "--scenario"])
        .arg(repo().join("paper_yb.scenario"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = toolkit().args(["budget", "--target", "cooling", "--scenario", "/nonexistent"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn root_scenario_matches_bundled_copy() {
    let root = std::fs::read_to_string(repo().join("paper_yb.scenario")).unwrap();
    assert_eq!(root, tco_toolkit::scenario::PAPER_YB);
}
