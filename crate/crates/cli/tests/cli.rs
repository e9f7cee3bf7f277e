use std::path::Path;
use std::process::{Command, Output};

use nsl_core::census::CensusRecord;
use serde_json::Value;

fn nsl(args: &[&str]) -> Output {
    nsl_env(args, &[])
}

fn nsl_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nsl"));
    cmd.args(args).arg("--compact");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn result(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).expect("json report");
    assert_eq!(v["schema"], "nsl-report/1");
    assert!(v["manifest"]["engine_version"].is_string());
    v["result"].clone()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn picard_examples() {
    let r = result(&nsl(&["fermat", "picard", "--m", "5", "--d", "2"]));
    assert_eq!(r["rank"], 37);
    assert_eq!(r["agree"], true);

    let r = result(&nsl(&["fermat", "picard", "--m", "6", "--d", "2", "--method", "chars"]));
    assert_eq!(r["rank"], 86);
    assert!(r["note"].as_str().unwrap().contains("does not give"));

    let r = result(&nsl(&["fermat", "picard", "--m", "1", "--d", "4"]));
    assert_eq!(r["rank"], 1);

    assert_eq!(code(&nsl(&["fermat", "picard", "--m", "5", "--d", "4", "--method", "formula"])), 1);
    assert_eq!(code(&nsl(&["fermat", "picard", "--m", "5", "--d", "3"])), 1);
    assert_eq!(code(&nsl(&["--budget", "10", "fermat", "picard", "--m", "5", "--d", "2"])), 3);
}

#[test]
fn fermat_torsion_examples() {
    let r = result(&nsl(&["fermat", "torsion", "--m", "4", "--d", "4", "--partitions", "all"]));
    assert_eq!(r["trivial"], true);
    assert_eq!(r["torsion"]["certified"], true);
    assert_eq!(r["subspaces"], "960");
    assert_eq!(r["span_rank"], 141);

    let r = result(&nsl(&["fermat", "torsion", "--m", "3", "--d", "2", "--partitions", "all"]));
    assert_eq!(r["trivial"], true);
    assert_eq!(r["torsion"]["certified"], true);
    assert_eq!(r["subspaces"], "27");

    let r = result(&nsl(&["fermat", "torsion", "--m", "3", "--d", "4", "--variant", "M-bar", "--partitions", "0,4"]));
    assert_eq!(r["trivial"], true);
    assert_eq!(r["partitions"].as_array().unwrap().len(), 2);
}

#[test]
fn evidence_mode_and_budget() {
    let certified = nsl(&["fermat", "torsion", "--m", "8", "--d", "4"]);
    assert_eq!(code(&certified), 3);
    assert!(String::from_utf8_lossy(&certified.stderr).contains("budget"));

    let r = result(&nsl(&["fermat", "torsion", "--m", "8", "--d", "4", "--mode", "evidence"]));
    assert_eq!(r["trivial"], true);
    assert_eq!(r["torsion"]["certified"], false);
    assert!(r["note"].as_str().unwrap().contains("evidence"));

    let r = result(&nsl(&["--budget", "40000", "fermat", "torsion", "--m", "8", "--d", "4"]));
    assert_eq!(r["torsion"]["certified"], true);
}

#[test]
fn delsarte_examples() {
    let r = result(&nsl(&["delsarte", "analyze", "--kernel", "3,0,0;0,3,0;0,0,3"]));
    assert_eq!(r["invariants"]["order"], 27);
    assert_eq!(r["invariants"]["rank_k"], 24);
    assert_eq!(r["invariants"]["pi1"]["invariant_factors"].as_array().unwrap().len(), 0);

    let r = result(&nsl(&["delsarte", "torsion", "--kernel", "2,0,0;0,3,0;0,0,5"]));
    assert_eq!(r["invariants"]["group"]["invariant_factors"], serde_json::json!([30]));
    assert_eq!(r["torsion"]["invariant_factors"].as_array().unwrap().len(), 0);
    assert_eq!(r["bounds"]["passed"], true);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fermat4.json");
    std::fs::write(&path, "[[4,0,0,0],[0,4,0,0],[0,0,4,0],[0,0,0,4]]").unwrap();
    let from_matrix = result(&nsl(&["delsarte", "analyze", "--matrix", path.to_str().unwrap()]));
    let from_kernel = result(&nsl(&["delsarte", "analyze", "--kernel", "4,0,0;0,4,0;0,0,4"]));
    assert_eq!(from_matrix["invariants"], from_kernel["invariants"]);
    assert_eq!(from_matrix["exponent_matrix"]["order_identity"], true);
    let inline = result(&nsl(&["delsarte", "analyze", "--matrix", "4,0,0,0;0,4,0,0;0,0,4,0;0,0,0,4"]));
    assert_eq!(inline["invariants"], from_kernel["invariants"]);
}

#[test]
fn delsarte_input_errors() {
    let bad = nsl(&["delsarte", "analyze", "--matrix", "1,1,0,0;0,1,1,0;0,0,1,1;1,0,0,0"]);
    assert_eq!(code(&bad), 1);
    assert!(String::from_utf8_lossy(&bad.stderr).contains("rejected"));
    assert_eq!(code(&nsl(&["delsarte", "analyze", "--kernel", "1,2;3,4"])), 1);
    assert_eq!(code(&nsl(&["delsarte", "analyze", "--kernel", "1,0,0;0,1,0;0,0,0"])), 1);
    assert_eq!(code(&nsl(&["delsarte", "analyze", "--matrix", "/nonexistent/a.json"])), 1);
    assert_eq!(code(&nsl(&["--budget", "10", "delsarte", "torsion", "--kernel", "2,0,0;0,3,0;0,0,5"])), 3);
    // (exp G)^3 / |G| = 1 proves T = 0 without building anything
    assert_eq!(code(&nsl(&["--budget", "10", "delsarte", "torsion", "--kernel", "7,0,0;0,7,0;0,0,7"])), 0);
}

#[test]
fn brieskorn_examples() {
    let r = result(&nsl(&["brieskorn", "--exponents", "7,7,7"]));
    assert_eq!(r["h"], 1);
    assert_eq!(r["torsion"]["invariant_factors"].as_array().unwrap().len(), 0);

    let r = result(&nsl(&["brieskorn", "--exponents", "6,10,15"]));
    assert_eq!(r["h"], 30);
    assert_eq!(r["order_divides_h"], true);
    assert_eq!(r["passed"], true);

    let r = result(&nsl(&["brieskorn", "--exponents", "1,1,1"]));
    assert_eq!(r["h"], 1);
    assert_eq!(r["passed"], true);

    assert_eq!(code(&nsl(&["brieskorn", "--exponents", "0,1,2"])), 1);
    assert_eq!(code(&nsl(&["brieskorn", "--exponents", "3,4"])), 1);
}

fn census(dir: &Path, name: &str, extra: &[&str], threads: &str) -> (Value, Vec<u8>) {
    let out = dir.join(name);
    let mut args = vec!["census", "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let r = result(&nsl_env(&args, &[("NSL_THREADS", threads)]));
    (r, std::fs::read(out).unwrap())
}

#[test]
fn census_examples() {
    let dir = tempfile::tempdir().unwrap();
    let (r, bytes) = census(dir.path(), "empty.jsonl", &["--count", "0"], "1");
    assert!(bytes.is_empty());
    assert_eq!(r["count"], 0);
    assert_eq!(r["violations"], 0);

    let args = ["--count", "100", "--bound", "5", "--max-order", "400", "--seed", "7"];
    let (r, first) = census(dir.path(), "a.jsonl", &args, "1");
    assert_eq!(r["count"], 100);
    assert_eq!(r["violations"], 0);
    let text = String::from_utf8(first.clone()).unwrap();
    assert_eq!(text.lines().count(), 100);
    for line in text.lines() {
        let rec: CensusRecord = serde_json::from_str(line).unwrap();
        assert_eq!(serde_json::to_string(&rec).unwrap(), line);
    }
    let (_, second) = census(dir.path(), "b.jsonl", &args, "3");
    assert_eq!(first, second);
}

#[test]
fn census_families() {
    let dir = tempfile::tempdir().unwrap();
    for family in ["cyclic", "unramified"] {
        let (r, _) = census(dir.path(), "f.jsonl", &["--count", "10", "--family", family, "--method", "rank-comparison"], "1");
        assert_eq!(r["nontrivial"], 0, "{family}");
    }
    let (r, bytes) = census(dir.path(), "b.jsonl", &["--count", "15", "--family", "brieskorn", "--seed", "3"], "1");
    assert_eq!(r["failures"], 0);
    assert_eq!(String::from_utf8(bytes).unwrap().lines().count(), 15);
}

#[test]
fn cache_hits_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let args = ["fermat", "torsion", "--m", "3", "--d", "4", "--cache", cache.to_str().unwrap()];
    let manifest = |o: &Output| serde_json::from_slice::<Value>(&o.stdout).unwrap()["manifest"]["cache"].clone();
    let a = nsl(&args);
    let b = nsl(&args);
    assert_eq!(manifest(&a), "miss");
    assert_eq!(manifest(&b), "hit");
    assert_eq!(result(&a), result(&b));

    // a corrupted entry fails verification and is recomputed
    for entry in std::fs::read_dir(&cache).unwrap() {
        std::fs::write(entry.unwrap().path(), "{\"garbage\": true}").unwrap();
    }
    let c = nsl(&args);
    assert_eq!(manifest(&c), "miss");
    assert_eq!(result(&c), result(&a));
}

#[test]
fn stabilization_command() {
    let r = result(&nsl(&["fermat", "stabilization", "--m", "3", "--s", "2", "--d", "4"]));
    assert_eq!(r["passed"], true);
    assert_eq!(r["copies"], 2);
}

#[test]
fn bad_thread_setting_is_an_input_error() {
    assert_eq!(code(&nsl_env(&["fermat", "picard", "--m", "3", "--d", "2"], &[("NSL_THREADS", "zero")])), 1);
}
