use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hlw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hlw"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn zdensity_passes() {
    let out = hlw(&["zdensity", "--nmax", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["result"]["band_checks"].as_array().unwrap().len(), 26);
    assert_eq!(v["config"]["n_max"], 4);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn hset_on_constant_coloring() {
    let dir = tempfile::tempdir().unwrap();
    let coloring = write(dir.path(), "constant0.txt", "coloring v1 depth=5\n");
    let mut tree = String::from("tree v1 depth=5\n");
    for len in 0..5 {
        for v in 0..1u32 << len {
            if len == 0 {
                tree.push_str("-\n");
            } else {
                tree.push_str(&format!("{v:0len$b}\n"));
            }
        }
    }
    let tree = write(dir.path(), "full5.txt", &tree);
    let out = hlw(&["hset", "--coloring", &coloring, "--tree", &tree]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["result"]["levels"], serde_json::json!([0, 1, 2, 3, 4]));
}

#[test]
fn search_agrees_with_oracle() {
    for cmd in ["search", "search-levels"] {
        let out = hlw(&[cmd, "--depth", "6", "--height", "1", "--seed", "7", "--oracle", "--workers", "2"]);
        assert_eq!(out.status.code(), Some(0));
        let v = json(&out);
        assert_eq!(v["result"]["m"], v["result"]["oracle"]["m"]);
        assert_eq!(v["result"]["verified"], true);
        assert_eq!(v["seed"], 7);
    }
}

#[test]
fn reruns_are_byte_identical() {
    for args in [
        &["search", "--depth", "6", "--height", "2", "--seed", "11"][..],
        &["game", "--seed", "5", "--player-one", "random:percent=20", "--player-two", "random"][..],
        &["katetov", "--builtin", "ed_to_finxfin_identity"][..],
    ] {
        let a = hlw(args);
        let b = hlw(args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn pairing_and_levels_pass() {
    let out = hlw(&["pairing", "--base", "1,2", "--depth", "6"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["check"]["pass"], true);
    let out = hlw(&["levels", "--max-len", "2", "--depth", "10"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["check"]["pass"], true);
}

#[test]
fn katetov_exit_codes() {
    let out = hlw(&["katetov", "--builtin", "fin_to_z_identity"]);
    assert_eq!(out.status.code(), Some(0));
    let out = hlw(&["katetov", "--mutation"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["result"]["violations"][0]["generator"], 32);
    let out = hlw(&["katetov", "--builtin", "no_such_witness"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn katetov_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let source = write(
        dir.path(),
        "fin.txt",
        "ideal v1 ground=interval:8 surrogate=cardinality params=max:1\ngen 0\ngen 5\n",
    );
    let target = write(
        dir.path(),
        "target.txt",
        "ideal v1 ground=interval:8 surrogate=cardinality params=max:1\n",
    );
    let good = write(dir.path(), "id.txt", "morphism v1\nformula=identity\n");
    let out = hlw(&["katetov", "--morphism", &good, "--source", &source, "--target", &target]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let collapse: String = (0..8).map(|y| format!("{y} -> 5\n")).collect();
    let bad = write(dir.path(), "collapse.txt", &format!("morphism v1\n{collapse}"));
    let out = hlw(&["katetov", "--morphism", &bad, "--source", &source, "--target", &target]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["result"]["violations"][0]["value"], "8");
}

#[test]
fn profile_natset_and_nodeset() {
    let dir = tempfile::tempdir().unwrap();
    let nat = write(dir.path(), "a.txt", "natset v1 bound=16\n0\n4\n8\n12\n");
    let out = hlw(&["profile", "--natset", &nat]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["dyadic_density"], serde_json::json!(["0/1", "0/1", "1/4", "1/4"]));
    let nodes = write(dir.path(), "n.txt", "nodeset v1 depth=3\n0\n1\n00\n");
    let out = hlw(&["profile", "--nodeset", &nodes]);
    assert_eq!(json(&out)["result"]["phi"], "1/1");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["frobnicate"][..],
        &["zdensity", "--nmax", "9"][..],
        &["search", "--depth", "0"][..],
        &["profile"][..],
        &["game", "--player-one", "nobody"][..],
    ] {
        let out = hlw(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn malformed_file_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let coloring = write(dir.path(), "c.txt", "coloring v1 depth=3\n0 1\n01 7\n");
    let tree = write(dir.path(), "t.txt", "tree v1 depth=3\n-\n0\n00\n");
    let out = hlw(&["hset", "--coloring", &coloring, "--tree", &tree]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn verbose_tables_go_to_stderr() {
    let out = hlw(&["--verbose", "zdensity", "--nmax", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("expected"));
    json(&out);
}
