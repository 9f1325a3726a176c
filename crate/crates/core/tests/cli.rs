// Drives the `mmp` binary end to end.

use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn mmp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mmp"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn resolve_writes_report_and_dot() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "q.txt", "kind=quotient n=8 q=5\n");
    let dot = dir.path().join("q.dot");
    let o = mmp(&["resolve", "--input", &input, "--dot", dot.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stderr.is_empty());
    let text = stdout(&o);
    let digest = hex::encode(Sha256::digest(b"kind=quotient n=8 q=5\n"));
    assert_eq!(
        text.lines().next().unwrap(),
        format!("# mmp 0.1.0 input-sha256={digest}")
    );
    // 8/5 = 2 - 1/(3 - 1/2); discrepancies solve M a = (0, 1, 0)
    assert!(text.contains("chain [2,3,2]"));
    assert!(text.contains("F2 self_intersection=-3 discrepancy=-1/2"));
    assert!(text
        .lines()
        .last()
        .unwrap()
        .starts_with("# summary length=3"));
    let dot = std::fs::read_to_string(dot).unwrap();
    assert!(dot.starts_with("digraph resolution {"));
    assert!(dot.contains("F1 -> F2 [dir=none]"));
    assert!(dot.contains("F2 -> F3 [dir=none]"));
    assert_eq!(dot.matches("label=").count(), 3);
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "c.txt",
        "kind=curve_config case=3 points=[(9,5,1),(4,1,1)]\n",
    );
    let a = mmp(&["classify", "--input", &input]);
    let b = mmp(&["classify", "--input", &input]);
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.contains("self_intersection -7/36"));
    assert!(text.contains("k_dot_c -1/6"));
    let r1 = stdout(&mmp(&["flip-run", "--seed", "3", "--count", "20"]));
    let r2 = stdout(&mmp(&["flip-run", "--seed", "3", "--count", "20"]));
    assert_eq!(r1, r2);
    assert_eq!(r1.lines().count(), 2 + 20 + 1);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.txt", "kind=quotient\n  n=18 q=five\n");
    let o = mmp(&["classify", "--input", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    assert!(stderr(&o).contains("2:10:"), "{}", stderr(&o));

    let gcd = write(dir.path(), "gcd.txt", "kind=quotient n=6 q=2\n");
    let o = mmp(&["resolve", "--input", &gcd]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("gcd(n,q) must be 1"));

    assert_eq!(mmp(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(mmp(&["exclusion", "--lmax", "3"]).status.code(), Some(1));
    assert_eq!(
        mmp(&["classify", "--input", "/nonexistent/x"])
            .status
            .code(),
        Some(1)
    );

    let state = write(
        dir.path(),
        "s.txt",
        "kind=flip_state case=3 points=[(5,2,3)]\n",
    );
    let o = mmp(&["flip-run", "--input", &state, "--max-steps", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("budget"));
}

#[test]
fn exclusion_table() {
    let o = mmp(&["exclusion"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let header = text.lines().nth(2).unwrap();
    assert!(header.starts_with("case") && header.contains("verdict"));
    assert!(!text.contains("OPEN"));
    assert_eq!(
        text.lines()
            .filter(|l| l.ends_with("excluded:sign"))
            .count(),
        3
    );
    assert!(text.contains("survivors=3b3:5:3/10,3b4:3:1/6,3b7:6:5/14"));
}

#[test]
fn flip_run_trace() {
    let dir = tempfile::tempdir().unwrap();
    let state = write(
        dir.path(),
        "s.txt",
        "kind=flip_state case=3 points=[(5,2,3)]\n",
    );
    let o = mmp(&["flip-run", "--input", &state]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let steps: Vec<&str> = text
        .lines()
        .filter(|l| l.contains(" FLIP ") || l.contains(" FLOP "))
        .collect();
    // surface germ 1/75(44,1), b = 2^-1 mod 5 = 3: K.C = -b/r = -3/5;
    // a1 = 2, e = 3, post = 1/10 - 3/5 = -1/2
    assert_eq!(
        steps[0],
        "1 FLIP point=(5,3) measure=(5,2) kc=-3/5 kc_post=-1/2 d=0"
    );
    let mut prev = (5u32, 3u32);
    for line in &steps {
        let m = line.split("measure=(").nth(1).unwrap();
        let (r, rest) = m.split_once(',').unwrap();
        let n = rest.split_once(')').unwrap().0;
        let cur = (r.parse().unwrap(), n.parse().unwrap());
        if line.contains(" FLIP ") {
            assert!(cur < prev, "{line}");
        } else {
            assert_eq!(cur, prev, "{line}");
        }
        prev = cur;
    }
    assert_eq!(prev, (1, 0));
    assert!(text.contains("end index-one"));
    let summary = text.lines().last().unwrap();
    assert!(
        summary.starts_with("# summary flips=12 flops=9"),
        "{summary}"
    );
}

#[test]
fn json_output() {
    let o = mmp(&["--json", "exclusion", "--lmax", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["command"], "exclusion");
    let rows = v["result"]["rows"].as_array().unwrap();
    let first_kc = rows.iter().find_map(|r| r["k_dot_c"].as_str()).unwrap();
    assert_eq!(first_kc, "3/10");
    assert_eq!(v["input_sha256"].as_str().unwrap().len(), 64);
}
