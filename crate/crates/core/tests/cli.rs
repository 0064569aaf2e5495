use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twodelta")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn p(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn edge_count(path: &str) -> usize {
    fs::read_to_string(path).unwrap().lines().skip(1).filter(|l| !l.trim().is_empty()).count()
}

fn gen_regular(dir: &TempDir, name: &str, n: usize, d: usize, seed: u64) -> String {
    let out = p(dir, name);
    let r = bin(&["gen", "--model", "regular", "--n", &n.to_string(), "--d", &d.to_string(), "--seed", &seed.to_string(), "--out", &out]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    out
}

#[test]
fn gen_regular_has_nd_over_two_edges() {
    let dir = TempDir::new().unwrap();
    let g = gen_regular(&dir, "g.txt", 1024, 8, 7);
    let text = fs::read_to_string(&g).unwrap();
    let header: Vec<usize> = text.lines().next().unwrap().split_whitespace().map(|t| t.parse().unwrap()).collect();
    assert_eq!(header, vec![1024, 4096]);
    assert_eq!(edge_count(&g), 4096);
}

#[test]
fn gen_cycle_and_infeasible() {
    let dir = TempDir::new().unwrap();
    let c6 = p(&dir, "c6.txt");
    assert_eq!(code(&bin(&["gen", "--model", "cycle", "--n", "6", "--out", &c6])), 0);
    assert_eq!(edge_count(&c6), 6);
    let bad = bin(&["gen", "--model", "regular", "--n", "5", "--d", "3", "--out", &p(&dir, "x.txt")]);
    assert_ne!(code(&bad), 0);
    assert!(!bad.stderr.is_empty());
    assert!(!Path::new(&p(&dir, "x.txt")).exists());
}

#[test]
fn run_det_succeeds_with_bounded_palette() {
    let dir = TempDir::new().unwrap();
    let g = gen_regular(&dir, "g.txt", 512, 8, 3);
    let col = p(&dir, "c.txt");
    let r = bin(&["run", "--in", &g, "--variant", "det", "--out-coloring", &col]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&r.stdout).unwrap();
    assert_eq!(summary["palette"], 14);
    assert!(summary["colorsUsed"].as_u64().unwrap() <= 14);
    assert_eq!(code(&bin(&["verify", "--in", &g, "--coloring", &col])), 0);
}

#[test]
fn rand_is_reproducible_and_needs_a_seed() {
    let dir = TempDir::new().unwrap();
    let g = gen_regular(&dir, "g.txt", 256, 8, 1);
    let mut outputs = Vec::new();
    for i in 0..2 {
        let (c, t) = (p(&dir, &format!("c{i}")), p(&dir, &format!("t{i}")));
        let r = bin(&["run", "--in", &g, "--variant", "rand", "--seed", "42", "--out-coloring", &c, "--out-trace", &t]);
        assert_eq!(code(&r), 0);
        outputs.push((fs::read(c).unwrap(), fs::read(t).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(code(&bin(&["run", "--in", &g, "--variant", "rand"])), 2);
}

#[test]
fn bad_input_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let bad = p(&dir, "bad.txt");
    fs::write(&bad, "3 2\n0 1\n1 x\n").unwrap();
    let r = bin(&["run", "--in", &bad]);
    assert_eq!(code(&r), 2);
    assert!(String::from_utf8_lossy(&r.stderr).contains("line"));
    assert_eq!(code(&bin(&["run", "--in", &p(&dir, "missing.txt")])), 2);
}

#[test]
fn verify_rejects_conflicts_and_overflow() {
    let dir = TempDir::new().unwrap();
    let g = gen_regular(&dir, "g.txt", 64, 4, 2);
    let col = p(&dir, "c.txt");
    assert_eq!(code(&bin(&["run", "--in", &g, "--out-coloring", &col])), 0);
    assert_eq!(code(&bin(&["verify", "--in", &g, "--coloring", &col])), 0);
    let text = fs::read_to_string(&col).unwrap();
    let lines: Vec<&str> = text.lines().collect();

    // Give the first edge the color of an adjacent edge.
    let first: Vec<&str> = lines[0].split_whitespace().collect();
    let clash = lines[1..]
        .iter()
        .map(|l| l.split_whitespace().collect::<Vec<_>>())
        .find(|f| f[0] == first[0] || f[1] == first[0] || f[0] == first[1] || f[1] == first[1])
        .unwrap();
    let mut corrupted = vec![format!("{} {} {}", first[0], first[1], clash[2])];
    corrupted.extend(lines[1..].iter().map(|l| l.to_string()));
    let bad = p(&dir, "bad.txt");
    fs::write(&bad, corrupted.join("\n")).unwrap();
    let r = bin(&["verify", "--in", &g, "--coloring", &bad]);
    assert_eq!(code(&r), 1);
    assert!(!r.stdout.is_empty());

    // Color 7 exceeds the palette 2Δ−2 = 6.
    let mut overflow = vec![format!("{} {} 7", first[0], first[1])];
    overflow.extend(lines[1..].iter().map(|l| l.to_string()));
    fs::write(&bad, overflow.join("\n")).unwrap();
    assert_eq!(code(&bin(&["verify", "--in", &g, "--coloring", &bad])), 1);
}

#[test]
fn bench_rows_and_usage_errors() {
    let dir = TempDir::new().unwrap();
    let csv = p(&dir, "b.csv");
    let r = bin(&["bench", "--d", "8", "--n-list", "256", "--variant", "det", "--seeds", "1", "--csv", &csv]);
    assert_eq!(code(&r), 0);
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("n,delta,variant,seed,total_rounds,"));
    assert!(lines[1].starts_with("256,8,det,0,"));
    assert!(lines[1].ends_with(",ok"));

    let r = bin(&["bench", "--d", "8", "--n-list", "256,512", "--variant", "mis", "--seeds", "2"]);
    assert_eq!(code(&r), 0);
    let out = String::from_utf8(r.stdout).unwrap();
    let keys: Vec<String> = out.lines().skip(1).map(|l| l.split(',').take(4).collect::<Vec<_>>().join(",")).collect();
    assert_eq!(keys, ["256,8,mis,0", "256,8,mis,1", "512,8,mis,0", "512,8,mis,1"]);

    assert_eq!(code(&bin(&["bench", "--n-list", "256", "--variant", "bogus"])), 2);
}
