use std::path::Path;
use std::process::Command;

use tempfile::TempDir;

const MARKOV: &str = r#"
[kernel]
family = "markov"
order = 1
alphabet = 2
table = [[0.9, 0.1], [0.2, 0.8]]

[run]
seed = 7
window = "0..99"
"#;

const RENEWAL: &str = r#"
[kernel]
family = "renewal"
epsilon = 0.2
weights = { kind = "power_geometric", exponent = 0.5 }

[run]
seed = 3
window = "0..20"
"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chainsim"))
}

fn write(dir: &TempDir, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> (i32, String) {
    let out = bin().args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn symbols(csv_path: &Path) -> Vec<(i64, i64)> {
    let mut r = csv::Reader::from_path(csv_path).unwrap();
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            (rec[0].parse().unwrap(), rec[1].parse().unwrap())
        })
        .collect()
}

#[test]
fn sample_is_deterministic_and_overlaps_agree() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "m.toml", MARKOV);
    let cfg = cfg.to_str().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let c = dir.path().join("c.csv");
    assert_eq!(run(&["sample", "--config", cfg, "--out", a.to_str().unwrap()]).0, 0);
    assert_eq!(run(&["sample", "--config", cfg, "--out", b.to_str().unwrap()]).0, 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let sa = symbols(&a);
    assert_eq!(sa.len(), 100);
    assert_eq!(
        run(&["sample", "--config", cfg, "--window", "50..149", "--out", c.to_str().unwrap()]).0,
        0
    );
    let sc = symbols(&c);
    assert_eq!(&sa[50..], &sc[..50]);
    let record = std::fs::read_to_string(dir.path().join("a.toml")).unwrap();
    assert!(record.contains("lambda") && record.contains("[[report.blocks]]"));
}

#[test]
fn renewal_record_lists_blocks() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "r.toml", RENEWAL);
    let out = dir.path().join("r.csv");
    let (code, _) = run(&["sample", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let doc: toml::Table = std::fs::read_to_string(dir.path().join("r.toml")).unwrap().parse().unwrap();
    let report = doc["report"].as_table().unwrap();
    assert!(report["lambda"].as_integer().unwrap() < 0);
    assert!(!report["blocks"].as_array().unwrap().is_empty());
    assert_eq!(doc["version"].as_str().unwrap(), chainsim::VERSION);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "m.toml", MARKOV);
    let cfg = cfg.to_str().unwrap();
    assert_eq!(run(&["tail", "--config", cfg, "--replicas", "0"]).0, 2);
    assert_eq!(run(&["sample", "--config", cfg, "--max-depth", "0"]).0, 3);
    let bad = write(&dir, "bad.toml", &MARKOV.replace("order = 1", "order = 1\nextra = 2"));
    assert_eq!(run(&["sample", "--config", bad.to_str().unwrap()]).0, 2);
    let dom = write(&dir, "dom.toml", &RENEWAL.replace("epsilon = 0.2", "epsilon = 0.6"));
    assert_eq!(run(&["sample", "--config", dom.to_str().unwrap()]).0, 2);
    assert_eq!(run(&["sample"]).0, 2);
    let (code, _) = run(&["verify", "--config", cfg, "--replicas", "3000"]);
    assert_eq!(code, 0);
}

#[test]
fn documents_round_trip() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "m.toml", MARKOV);
    for cmd in ["tail", "regime", "regen", "verify"] {
        let first = dir.path().join(format!("{cmd}1.toml"));
        let second = dir.path().join(format!("{cmd}2.toml"));
        let code = run(&[
            cmd,
            "--config",
            cfg.to_str().unwrap(),
            "--replicas",
            "500",
            "--out",
            first.to_str().unwrap(),
        ])
        .0;
        assert_eq!(code, 0, "{cmd}");
        let code = run(&[cmd, "--config", first.to_str().unwrap(), "--out", second.to_str().unwrap()]).0;
        assert_eq!(code, 0, "{cmd}");
        assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap(), "{cmd}");
    }
}

#[test]
fn results_do_not_depend_on_threads() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "r.toml", RENEWAL);
    let cfg = cfg.to_str().unwrap();
    let (_, one) = run(&["tail", "--config", cfg, "--seeds", "0..299", "--threads", "1"]);
    let (_, three) = run(&["tail", "--config", cfg, "--seeds", "0..299", "--threads", "3"]);
    assert_eq!(one, three);
}

#[test]
fn regime_on_empty_skeleton_reports_omega() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "m.toml", &format!("{MARKOV}horizon = 20\n"));
    let (code, out) = run(&["regime", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    let doc: toml::Table = out.parse().unwrap();
    let a = doc["report"]["a"].as_array().unwrap();
    assert_eq!(a.len(), 21);
    assert!(a[1..].iter().all(|x| x.as_float() == Some(1.0)));
}

#[test]
fn verify_markov_passes_to_depth_three() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "m.toml", &format!("{MARKOV}probe_depth = 3\n"));
    let (code, out) = run(&["verify", "--config", cfg.to_str().unwrap(), "--replicas", "20000"]);
    assert_eq!(code, 0);
    assert!(!out.contains("\"fail\""));
}
