use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qzeta_core::cli::{CacheEntry, ENGINE_VERSION};
use qzeta_core::{Index, Kind};

fn qzeta(args: &[&str]) -> Output {
    qzeta_env(args, None)
}

fn qzeta_env(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qzeta"));
    cmd.args(args).env_remove("QZETA_CACHE");
    if let Some(dir) = cache {
        cmd.env("QZETA_CACHE", dir);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn expand_table_rows() {
    let o = qzeta(&["expand", "--index", "(2)", "--order", "6"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1 3 4 7 6 12\n");

    let o = qzeta(&["expand", "--index", "(5,1)", "--order", "13"]);
    assert_eq!(stdout(&o), "0 0 0 0 0 0 0 1 1 6 6 23 22\n");

    // default order is 13
    let o = qzeta(&["expand", "--index", "(5,1)"]);
    assert_eq!(stdout(&o), "0 0 0 0 0 0 0 1 1 6 6 23 22\n");
}

#[test]
fn expand_formats() {
    let o = qzeta(&["expand", "--index", "(3,1)", "--order", "5", "--raw", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["index"], serde_json::json!([3, 1]));
    assert_eq!(v["kind"], "raw");
    assert_eq!(v["coeffs"], serde_json::json!(["0", "0", "0", "1", "-3"]));

    let o = qzeta(&["expand", "--index", "(3,1)", "--order", "5", "--format", "table"]);
    assert_eq!(stdout(&o), "index\t1\t2\t3\t4\t5\n(3,1)\t0\t0\t0\t1\t1\n");
}

#[test]
fn usage_errors_exit_two() {
    let o = qzeta(&["expand", "--index", "(1,2)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("index not admissible"));
    assert!(stdout(&o).is_empty());

    let o = qzeta(&["expand", "--index", "(3,x)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad part"));

    let o = qzeta(&["verify", "cyclic", "--index", "(1,1)"]);
    assert_eq!(o.status.code(), Some(2));

    let o = qzeta(&["table", "rank", "--max-weight", "9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--extended"));

    let o = qzeta(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_examples() {
    let cases: [(&[&str], &str); 9] = [
        (&["verify", "ohno", "--index", "(3)", "--l", "1", "--order", "60"], "PASS ohno (3) l=1 through q^60\n"),
        (&["verify", "cyclic", "--index", "(2,1)", "--order", "40"], "PASS cyclic (2,1) through q^40\n"),
        (&["verify", "cyclic", "--index", "(2,1)"], "PASS cyclic (2,1) through q^40\n"),
        (&["verify", "lemma", "--index", "(1,2,1)", "--order", "20"], "PASS lemma (1,2,1) through q^20\n"),
        (&["verify", "duality", "--index", "(3,1,2)", "--order", "30"], "PASS duality (3,1,2) through q^30\n"),
        (
            &["verify", "ohno-zagier", "--weight", "4", "--order", "25"],
            "PASS ohno-zagier K=4 raw through q^25\nPASS ohno-zagier K=4 modified through q^25\n",
        ),
        (&["verify", "qdiff", "--index", "(2,1)", "--order", "12"], "PASS qdiff (2,1) t^8 through q^12\n"),
        (&["verify", "qhyp", "--weight", "4", "--order", "12"], "PASS qhyp K=4 t^7 through q^12\n"),
        (&["verify", "log-product", "--degree", "3", "--order", "15"], "PASS log-product s^3 through q^15\n"),
    ];
    for (args, expected) in cases {
        let o = qzeta(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
        assert_eq!(stdout(&o), expected, "{args:?}");
    }
}

#[test]
fn rank_table() {
    let o = qzeta(&["table", "rank", "--max-weight", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let expected = "\
weight\t2\t3\t4\t5\t6\t7\t8
d_k\t1\t1\t1\t2\t2\t3\t4
rank A_k\t1\t1\t2\t3\t6\t9\t18
By cyclic and Ohno\t1\t1\t2\t3\t6\t9\t18
sum_{j<=k} d_j\t1\t2\t3\t5\t7\t10\t14
rank A_{<=k}\t1\t2\t4\t7\t11\t18\t27
sum_{j<=k} rank A_j\t1\t2\t4\t7\t13\t22\t40
";
    assert_eq!(stdout(&o), expected);
}

#[test]
fn mine_small_weights() {
    let o = qzeta(&["mine", "--weight", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("kernel dimension: 0\n"));

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("certs.jsonl");
    let o = qzeta(&["mine", "--weight", "5", "--verify-order", "60", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    // 8 columns, rank 3
    assert!(stdout(&o).contains("rank: 3\nkernel dimension: 5\n"));
    let jsonl = fs::read_to_string(&out).unwrap();
    let txt = fs::read_to_string(dir.path().join("certs.txt")).unwrap();
    assert_eq!(jsonl.lines().count(), 5);
    assert_eq!(txt.lines().count(), 5);
    for (j, t) in jsonl.lines().zip(txt.lines()) {
        let v: serde_json::Value = serde_json::from_str(j).unwrap();
        assert_eq!(v["verified_to"], 60);
        assert!(!v["terms"].as_array().unwrap().is_empty());
        assert!(v["terms"][0]["index"].is_array() && v["terms"][0]["coeff"].is_i64());
        assert!(t.starts_with("5 | [((") && t.ends_with("| verified_to=60"), "{t}");
    }
}

#[test]
fn cold_and_warm_cache_agree() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["expand", "--index", "(3,1,2)", "--order", "25"];
    let cold = qzeta_env(&args, Some(dir.path()));
    let file = dir.path().join("weight-6.jsonl");
    let stored = fs::read_to_string(&file).unwrap();
    let warm = qzeta_env(&args, Some(dir.path()));
    assert_eq!(cold.status.code(), Some(0));
    assert_eq!(stdout(&cold), stdout(&warm));
    assert_eq!(fs::read_to_string(&file).unwrap(), stored);

    let entry: CacheEntry = serde_json::from_str(stored.lines().next().unwrap()).unwrap();
    assert_eq!(entry.index, Index::new(vec![3, 1, 2]).unwrap());
    assert_eq!(entry.kind, Kind::Modified);
    assert_eq!(entry.trunc, 25);
    assert_eq!(entry.engine_version, ENGINE_VERSION);

    // a lower order is sliced from the stored series
    let low = qzeta_env(&["expand", "--index", "(3,1,2)", "--order", "10"], Some(dir.path()));
    assert!(stdout(&cold).starts_with(stdout(&low).trim_end()));

    // --cache-dir works like the environment variable
    let other = tempfile::tempdir().unwrap();
    let flag = qzeta(&["--cache-dir", other.path().to_str().unwrap(), "expand", "--index", "(2)"]);
    assert_eq!(stdout(&flag), "1 3 4 7 6 12 8 15 13 18 12 28 14\n");
    assert!(other.path().join("weight-2.jsonl").exists());
}

fn write_entry(dir: &Path, parts: &[u32], coeffs: Vec<String>, version: &str) {
    let e = CacheEntry {
        index: Index::new(parts.to_vec()).unwrap(),
        kind: Kind::Modified,
        trunc: coeffs.len() - 1,
        coeffs,
        engine_version: version.into(),
    };
    let w: u32 = parts.iter().sum();
    let line = serde_json::to_string(&e).unwrap() + "\n";
    fs::write(dir.join(format!("weight-{w}.jsonl")), line).unwrap();
}

/// `a_0..a_n` of an expansion, from the binary itself.
fn true_coeffs(parts: &str, n: usize) -> Vec<String> {
    let o = qzeta(&["expand", "--index", parts, "--order", &n.to_string()]);
    let mut v = vec!["0".to_string()];
    v.extend(stdout(&o).split_whitespace().map(String::from));
    v
}

#[test]
fn corrupted_cache_is_detected() {
    let dir = tempfile::tempdir().unwrap();
    let mut coeffs = true_coeffs("(3,1)", 60);
    coeffs[9] = format!("{}", coeffs[9].parse::<i64>().unwrap() + 1);
    write_entry(dir.path(), &[3, 1], coeffs, ENGINE_VERSION);

    // the residual picks up the bad coefficient
    let o = qzeta_env(&["verify", "cyclic", "--index", "(2,1)"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("FAIL cyclic (2,1): residual first nonzero at q^"));

    // Mining builds its matrix from the cache. A consistently scaled entry
    // turns a true relation into a false one that fits every row; the fresh
    // re-verification must reject it.
    let doubled: Vec<String> = true_coeffs("(3,1)", 60)
        .iter()
        .map(|c| (2 * c.parse::<i64>().unwrap()).to_string())
        .collect();
    write_entry(dir.path(), &[3, 1], doubled, ENGINE_VERSION);
    let o = qzeta_env(&["mine", "--weight", "4", "--verify-order", "60"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    assert!(stderr(&o).contains("failed re-verification"));
}

#[test]
fn stale_and_unreadable_cache_entries_are_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let mut coeffs = true_coeffs("(3,1)", 40);
    coeffs[9] = "12345".into();
    write_entry(dir.path(), &[3, 1], coeffs, "qzeta-core/0.0.0/old");
    let o = qzeta_env(&["verify", "cyclic", "--index", "(2,1)"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(0));

    fs::write(dir.path().join("weight-4.jsonl"), "{\"index\":[3,1],\"kind\"\n").unwrap();
    let o = qzeta_env(&["verify", "cyclic", "--index", "(2,1)"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning: skipping cache line"));
    // the rewritten file is readable again
    let o = qzeta_env(&["verify", "cyclic", "--index", "(2,1)"], Some(dir.path()));
    assert!(stderr(&o).is_empty(), "{}", stderr(&o));
}

#[test]
fn io_errors_exit_four() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("not-a-dir");
    fs::write(&file, "x").unwrap();
    let o = qzeta_env(&["expand", "--index", "(2)"], Some(&file));
    assert_eq!(o.status.code(), Some(4));

    let bad_out = file.join("certs.jsonl");
    let o = qzeta(&["mine", "--weight", "3", "--out", bad_out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
}
