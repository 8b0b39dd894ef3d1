use std::process::{Command, Output};

use cwb_core::constructions::{bound, consistency_report, ReportOptions};
use cwb_core::corpus;
use cwb_core::identity::catalog::{self, params};
use cwb_core::identity::spectrum::spectrum;
use cwb_core::identity::{pw_check, SpectrumOptions};
use cwb_core::free::FreeOptions;
use cwb_core::terms::search_gumm;
use serde_json::Value;

fn cwb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cwb"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let o = cwb(&all);
    let v = serde_json::from_str(&stdout(&o)).unwrap_or_else(|e| panic!("{e}: {}", stdout(&o)));
    (v, o.status.code().unwrap())
}

#[test]
fn z2_day_spectrum_is_two() {
    let (v, code) = json(&["spectrum", "z2.alg", "--family", "DAY", "--m-from", "3", "--m-to", "7"]);
    assert_eq!(code, 0);
    let values: Vec<u64> = v["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["value"].as_u64().unwrap())
        .collect();
    assert_eq!(values, vec![2; 5]);
}

#[test]
fn lattice_is_not_two_modular() {
    let o = cwb(&["check", "lattice2.alg", "--identity", "DAY", "--k", "2", "--mode", "pw"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("refuted"));
    let o = cwb(&["check", "lattice2", "--identity", "DAY", "--k", "3"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn comb_bound_arithmetic() {
    let o = cwb(&["bounds", "--name", "COMB", "--r", "2", "--n", "1", "--p", "1", "--q", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("z=3 w=4"), "{}", stdout(&o));
}

#[test]
fn exit_codes() {
    assert_eq!(cwb(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(cwb(&["alg", "info", "no-such-algebra"]).status.code(), Some(2));
    assert_eq!(cwb(&["bounds", "--name", "THM", "--r", "2"]).status.code(), Some(2));
    let o = cwb(&["free", "chain3", "-g", "4", "--free-cap", "1000"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap"));
    let o = cwb(&["spectrum", "semilattice2", "--family", "DAY", "--m-from", "3", "--m-to", "3", "--cap", "4"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn loads_files_and_idl() {
    let dir = std::env::temp_dir().join(format!("cwb-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let alg = dir.join("z2copy.alg");
    std::fs::write(&alg, corpus::Z2).unwrap();
    let idl = dir.join("perm.idl");
    std::fs::write(&idl, "cong b g; b o g <= g o b").unwrap();
    let (info, code) = json(&["alg", "info", alg.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(info["size"], 2);
    assert_eq!(info["congruences"], 2);
    let o = cwb(&["check", alg.to_str().unwrap(), "--idl", idl.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = cwb(&["check", "chain3", "--idl", idl.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn json_matches_library_calls() {
    let free = FreeOptions::default();

    let (v, _) = json(&["check", "lattice2", "--identity", "DAY", "--k", "2"]);
    let id = catalog::instantiate("DAY", &params(&[])).unwrap();
    let lib = pw_check(&corpus::lattice2(), &id, Some(2), free).unwrap();
    assert_eq!(v["verdict"], serde_json::to_value(&lib).unwrap());

    let (v, _) = json(&["terms", "chain3", "--scheme", "gumm"]);
    let lib = search_gumm(&corpus::chain3(), 16, free).unwrap();
    assert_eq!(v["found"], serde_json::to_value(lib.found().unwrap()).unwrap());

    let (v, _) = json(&["spectrum", "lattice2", "--family", "DAY_REV", "--m-from", "3", "--m-to", "3"]);
    let lib = spectrum(&corpus::lattice2(), "DAY_REV", &params(&[("m", 3)]), 64, &SpectrumOptions::default()).unwrap();
    assert_eq!(v["results"][0], serde_json::to_value(&lib).unwrap());

    let (v, _) = json(&["bounds", "--name", "QKMOD_II", "--n", "1", "--q", "2"]);
    let lib = bound("QKMOD_II", &params(&[("n", 1), ("q", 2)])).unwrap();
    assert_eq!(v["claim"], serde_json::to_value(lib).unwrap());

    let (v, code) = json(&["verify", "z2"]);
    assert_eq!(code, 0);
    let lib = consistency_report(&corpus::z2(), &ReportOptions::default()).unwrap();
    assert_eq!(v, serde_json::to_value(&lib).unwrap());
}

#[test]
fn json_is_deterministic_across_thread_counts() {
    let args = ["verify", "z2", "lattice2", "--max-m", "5", "--format", "json"];
    let one = cwb(&[&args[..], &["--jobs", "1"]].concat());
    let four = cwb(&[&args[..], &["--jobs", "4"]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    let again = cwb(&[&args[..], &["--jobs", "4"]].concat());
    assert_eq!(four.stdout, again.stdout);
}
