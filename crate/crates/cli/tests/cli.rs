use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn vhom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vhom"))
        .args(args)
        .env_remove("VH_CATALOG")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn cover_act_identity_and_swap() {
    let o = vhom(&["cover-act", "--quotient", "Z2^2", "--map", "a->a, b->b"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["action"], "trivial action");
    let m = v["matrix"].as_array().unwrap();
    assert_eq!(m.len(), 5);
    for (i, row) in m.iter().enumerate() {
        for (j, x) in row.as_array().unwrap().iter().enumerate() {
            assert_eq!(x.as_i64().unwrap(), i64::from(i == j));
        }
    }

    let o = vhom(&["cover-act", "--quotient", "Z2^2", "--map", "a->b, b->a"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["action"], "nontrivial");
}

#[test]
fn cover_act_errors() {
    let o = vhom(&["cover-act", "--quotient", "Z2^2", "--map", "a->a(b, b->b"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("position"), "{}", stderr(&o));
    assert!(o.stdout.is_empty());

    let o = vhom(&["cover-act", "--quotient", "nope", "--map", "a->a, b->b"]);
    assert_eq!(code(&o), 2);

    // ab' lies in the kernel of Z2-F2, its image ab'a' does not
    let o = vhom(&["cover-act", "--quotient", "Z2-F2", "--map", "a->a, b->ab"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn witness_separate() {
    let o = vhom(&["witness", "separate", "ab", "ba"]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_eq!(v["witness"]["kind"], "none");
    assert!(v["witness"]["note"].as_str().unwrap().contains("catalog exhausted"));

    let o = vhom(&["witness", "separate", "ab", "ab'"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["witness"]["kind"], "conjugacy_separation");
    assert_eq!(v["witness"]["quotient"], "Z3^2");
    assert_eq!(v["replay_verified"], true);
}

#[test]
fn witness_faithful_and_noninner() {
    let o = vhom(&["witness", "faithful", "--map", "a->b, b->a"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["witness"]["kind"], "faithfulness");

    let o = vhom(&["witness", "noninner", "--map", "a->a, b->aba'"]);
    assert_eq!(code(&o), 1);

    let o = vhom(&["witness", "noninner", "--map", "a->b, b->a"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["witness"]["kind"], "non_inner");

    let o = vhom(&["witness", "faithful", "--map", "a->aa, b->b"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn witness_classify() {
    let o = vhom(&["witness", "classify", "--map", "a->ab, b->b", "--candidates", "a", "--power-bound", "3"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let powers = v["candidates"][0]["powers"].as_array().unwrap();
    assert_eq!(powers.len(), 3);
    assert!(powers.iter().all(|p| p["outcome"] == "reduction obstruction found"));

    let o = vhom(&["witness", "classify", "--map", "a->ab, b->b", "--candidates", "b", "--power-bound", "3"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn burau_reduced_supremum() {
    let o = vhom(&["burau", "1 2 -3", "--reduced", "--mesh", "2048"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let sup = v["supremum"]["sup"].as_f64().unwrap();
    assert!((sup - 2.17401).abs() < 1e-5, "{sup}");
    assert_eq!(v["supremum"]["mesh"], 2048);
    assert_eq!(v["supremum"]["matrix_dim"], 3);
}

#[test]
fn burau_lk_supremum() {
    let o = vhom(&["burau", "1 2 -3", "--lk", "--mesh", "256", "--jobs", "4"]);
    assert_eq!(code(&o), 0);
    let sup = json(&o)["supremum"]["sup"].as_f64().unwrap();
    assert!((sup - 2.17433).abs() < 1e-5, "{sup}");
}

#[test]
fn burau_dilatation_gap() {
    let o = vhom(&["burau", "1 2 -3", "--dilatation-poly", "1 -1 -2 -2 -1 1"]);
    assert_eq!(code(&o), 0);
    let d = &json(&o)["dilatation"];
    assert!((d["root"].as_f64().unwrap() - 2.29663).abs() < 1e-5);
    assert!(d["gap"].as_f64().unwrap() > 0.1);

    // t − 2 has root 2, below the supremum
    let o = vhom(&["burau", "1 2 -3", "--dilatation-poly", "-2 1"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("exceeds"));
}

#[test]
fn burau_samples_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.tsv");
    let o = vhom(&["burau", "1 -2", "--mesh", "32", "--samples", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().count(), 32);
    assert!(text.lines().all(|l| l.split('\t').count() == 2));

    let o = vhom(&["burau", "1 x"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn chevalley_shipped_catalog() {
    let o = vhom(&["chevalley"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["all_pass"], true);
    assert!(v["quotients"].as_array().unwrap().len() >= 10);
}

#[test]
fn chevalley_catalog_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"quotients":[{"name":"s3","kind":"free","rank":2,"images":[[1,2,0],[1,0,2]]}]}"#,
    );
    let o = vhom(&["chevalley", "--catalog", &bad]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("s3"));

    let garbage = write(dir.path(), "garbage.json", "{not json");
    assert_eq!(code(&vhom(&["chevalley", "--catalog", &garbage])), 2);
    assert_eq!(code(&vhom(&["chevalley", "--catalog", "/nonexistent/catalog.json"])), 2);

    let empty = write(dir.path(), "empty.json", r#"{"quotients":[]}"#);
    let o = vhom(&["chevalley", "--catalog", &empty]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("warning"));
    assert_eq!(json(&o)["all_pass"], true);
}

#[test]
fn catalog_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "empty.json", r#"{"quotients":[]}"#);
    let o = Command::new(env!("CARGO_BIN_EXE_vhom"))
        .args(["witness", "separate", "ab", "ab'"])
        .env("VH_CATALOG", &empty)
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
}

#[test]
fn expand_tower() {
    let o = vhom(&["expand", "aba'b'", "--tower", "Z2^2,Z2^2/2"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["abelianization"], serde_json::json!([0, 0]));
    let levels = v["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 2);
    assert_eq!(levels[1]["entry"].as_array().unwrap().len(), 129);

    let o = vhom(&["expand", "ab", "--tower", "Z2^2,Z3^2"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["burau", "1 2 -3", "--reduced", "--mesh", "512"][..],
        &["witness", "classify", "--map", "a->ab, b->b", "--candidates", "a,b", "--power-bound", "4"][..],
        &["chevalley"][..],
    ] {
        let a = vhom(args);
        let mut threaded: Vec<&str> = args.to_vec();
        threaded.extend(["--jobs", "3"]);
        let b = vhom(&threaded);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(code(&a), code(&b));
    }
}

#[test]
fn cache_matches_cold_run() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let cache = cache.to_str().unwrap();
    let args = ["witness", "separate", "ab", "ba", "--cache-dir", cache];
    let cold = vhom(&args);
    assert_eq!(std::fs::read_dir(cache).unwrap().count(), 1);
    let warm = vhom(&args);
    assert_eq!(cold.stdout, warm.stdout);
    assert_eq!(code(&cold), 1);
    assert_eq!(code(&warm), 1);
    assert_eq!(vhom(&args[..4]).stdout, cold.stdout);

    // a different catalog must miss the cache
    let empty = write(dir.path(), "empty.json", r#"{"quotients":[]}"#);
    let mut with_catalog = args.to_vec();
    with_catalog.extend(["--catalog", &empty]);
    let o = vhom(&with_catalog);
    assert_ne!(o.stdout, cold.stdout);
    assert_eq!(std::fs::read_dir(cache).unwrap().count(), 2);
}

#[test]
fn text_and_tsv_formats() {
    let o = vhom(&["chevalley", "--format", "tsv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("quotient\torder"));
    let o = vhom(&["burau", "1 -2", "--reduced", "--format", "text"]);
    assert!(String::from_utf8(o.stdout).unwrap().contains("2.61803398875"));
}
