use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use sidon_core::decompose::{decompose3_zn, Decomposition, SearchMode};
use sidon_core::numbertheory::primitive_root;
use sidon_core::sidon::{ruzsa_set, ModSet};

fn sidon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sidon")).args(args).output().expect("binary runs")
}

fn json_of(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is json")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sidon-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn construct_matches_library() {
    let o = sidon(&["construct", "ruzsa", "-p", "13"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_of(&o);
    assert_eq!(v["status"], "ok");
    let set: ModSet = serde_json::from_value(v["payload"].clone()).unwrap();
    assert_eq!(set.modulus(), 156);
    assert_eq!(set.len(), 12);
    assert_eq!(set, ruzsa_set(13, primitive_root(13).unwrap()).unwrap());
    assert_eq!(v["payload"], serde_json::to_value(&set).unwrap());
}

#[test]
fn verify_reads_envelope_files() {
    let path = scratch("ruzsa13.json");
    let o = sidon(&["construct", "ruzsa", "-p", "13", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v = json_of(&sidon(&["verify", "sidon", "--in", path.to_str().unwrap(), "--mode", "cyclic"]));
    assert_eq!(v["payload"]["sidon"], true);
    assert!(v["payload"]["witness"].is_null());
    std::fs::write(&path, "mod 10\n0\n1\n2\n3\n").unwrap();
    let v = json_of(&sidon(&["verify", "sidon", "--in", path.to_str().unwrap()]));
    assert_eq!(v["payload"]["sidon"], false);
    assert!(v["payload"]["witness"].is_array());
}

#[test]
fn decompose_zn_payload_or_error() {
    for n in ["123", "0", "5"] {
        let o = sidon(&["decompose", "zn", "-N", "700", "-n", n, "--search", "exhaustive"]);
        let v = json_of(&o);
        let lib = decompose3_zn(n.parse().unwrap(), 700, SearchMode::Exhaustive);
        match lib {
            Ok(d) => {
                assert_eq!(o.status.code(), Some(0));
                let got: Decomposition = serde_json::from_value(v["payload"].clone()).unwrap();
                got.replay().unwrap();
                assert_eq!(got, d);
            }
            Err(e) => {
                assert_eq!(o.status.code(), Some(1));
                assert_eq!(v["status"], "error");
                assert_eq!(v["payload"]["kind"], e.kind());
            }
        }
    }
}

#[test]
fn exit_codes() {
    let o = sidon(&["decompose", "zn", "-N", "100", "-n", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json_of(&o)["payload"]["kind"], "PrimeNotFound");
    assert!(String::from_utf8_lossy(&o.stderr).contains("PrimeNotFound"));

    let o = sidon(&["construct", "ruzsa"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("-p"));

    let o = sidon(&["analyze", "sigma", "--alpha", "seven", "--beta", "1/2", "-n", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--alpha"));

    let o = sidon(&["analyze", "tau", "--alpha", "1/2", "--beta", "1/2", "-n", "10"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json_of(&o)["payload"]["kind"], "NonConvergent");
}

#[test]
fn csv_matches_json() {
    let base = ["sample", "--ruzsa", "13", "--horizon", "20000", "--seed", "4"];
    let v = json_of(&sidon(&base));
    let mut with_csv = base.to_vec();
    with_csv.extend(["--format", "csv"]);
    let csv = String::from_utf8(sidon(&with_csv).stdout).unwrap();
    let from_csv: Vec<u64> = csv.lines().map(|l| l.parse().unwrap()).collect();
    let from_json: Vec<u64> = serde_json::from_value(v["payload"]["elements"].clone()).unwrap();
    assert!(!from_json.is_empty());
    assert_eq!(from_csv, from_json);

    let csv = String::from_utf8(sidon(&["construct", "ruzsa", "-p", "7", "--format", "csv"]).stdout).unwrap();
    assert!(csv.starts_with("key,value\n"));
    assert!(csv.contains("modulus,42"));
}

#[test]
fn seeds_and_threads() {
    let run = |seed: &str, threads: &str| {
        sidon(&["sample", "--ruzsa", "13", "--horizon", "50000", "--seed", seed, "--threads", threads]).stdout
    };
    let a = run("9", "1");
    assert_eq!(a, run("9", "3"));
    assert_ne!(a, run("10", "1"));
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["payload"]["config"]["seed"], 9);
}

#[test]
fn sunflower_find_and_check() {
    let path = scratch("tuples.json");
    std::fs::write(&path, "[[1,2],[1,3],[4,5]]").unwrap();
    let v = json_of(&sidon(&["sunflower", "find", "--in", path.to_str().unwrap(), "-k", "2"]));
    assert_eq!(v["payload"]["found"], true);
    let v = json_of(&sidon(&["sunflower", "check", "--in", path.to_str().unwrap(), "--type", "1"]));
    assert_eq!(v["payload"]["sunflower"], false);
    std::fs::write(&path, "[[1,2],[1,3]]").unwrap();
    let v = json_of(&sidon(&["sunflower", "check", "--in", path.to_str().unwrap(), "--type", "1"]));
    assert_eq!(v["payload"]["sunflower"], true);
}

#[test]
fn lift_and_audit_from_file() {
    let path = scratch("seq.txt");
    std::fs::write(&path, "1\n2\n3\n5\n8\n13\n21\n").unwrap();
    let p = path.to_str().unwrap();
    let v = json_of(&sidon(&["lift", "sidon", "--in", p, "--horizon", "30"]));
    assert_eq!(v["payload"]["verified"], true);
    let v = json_of(&sidon(&["audit", "destruction", "--in", p, "--horizon", "30", "--targets", "10,16,24"]));
    assert_eq!(v["payload"]["all_hold"], true);
    assert_eq!(v["payload"]["rows"].as_array().unwrap().len(), 3);
}
