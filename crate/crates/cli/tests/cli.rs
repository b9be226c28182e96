use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_intgraph")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn gamma_of_d8() {
    let out = run(&["gamma", "D8", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["group"], "D8");
    assert_eq!(v["command"], "gamma");
    assert_eq!(v["result"]["gamma"], 2);
    assert_eq!(v["result"]["optimal"], true);
    assert_eq!(v["result"]["witness"].as_array().unwrap().len(), 2);
    assert!(v.get("timing_ms").is_none());
}

#[test]
fn gamma_of_prime_cyclic_is_aleph0() {
    let v = json(&run(&["gamma", "C5"]));
    assert_eq!(v["result"]["gamma"], "aleph0");
    let v = json(&run(&["sum", "C5"]));
    assert_eq!(v["result"]["sum_number"], "aleph0");
}

#[test]
fn output_is_byte_identical() {
    for args in [
        &["gamma", "S4"][..],
        &["subgroups", "D12"],
        &["burnside", "A4"],
        &["complex", "C2xC2xC2"],
        &["verify", "--order-max", "12"],
    ] {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["gamma", "X9"]).status.code(), Some(2));
    assert_eq!(run(&["gamma"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate", "D8"]).status.code(), Some(2));
    assert_eq!(run(&["gamma", "D8", "--cap", "many"]).status.code(), Some(2));
}

#[test]
fn budget_abort_exits_three() {
    assert_eq!(run(&["subgroups", "S6", "--budget-ms", "0"]).status.code(), Some(3));
    assert_eq!(run(&["gamma", "S5", "--cap", "10"]).status.code(), Some(3));
}

#[test]
fn dot_output() {
    let out = run(&["graph", "D8", "--dot", "-"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("graph \"D8\" {"));
    assert_eq!(text.matches(" -- ").count(), json(&run(&["graph", "D8"]))["result"]["edge_count"].as_u64().unwrap() as usize);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q8.dot");
    let out = run(&["graph", "Q8", "--dot", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(std::fs::read_to_string(&path).unwrap().contains("--"));
    assert_eq!(json(&out)["result"]["vertices"].as_array().unwrap().len(), 4);
}

#[test]
fn restricted_graph_by_prime() {
    let v = json(&run(&["graph", "S4", "--prime", "2"]));
    assert_eq!(v["result"]["mode"], "restricted");
    assert_eq!(v["result"]["vertices"].as_array().unwrap().len(), 19);
}

#[test]
fn subgroup_listing() {
    let v = json(&run(&["subgroups", "S4"]));
    assert_eq!(v["result"]["count"], 30);
    assert_eq!(v["result"]["classes"], 11);
    assert_eq!(v["result"]["subgroups"].as_array().unwrap().len(), 30);
}

#[test]
fn complex_of_q8() {
    let v = json(&run(&["complex", "Q8"]));
    assert_eq!(v["result"]["intersection_facets"], 1);
    assert_eq!(v["result"]["collapse"], "contractibility-confirmed");
}

#[test]
fn corpus_listing_and_timing() {
    let v = json(&run(&["corpus", "--order-max", "8"]));
    let entries = v["result"]["entries"].as_array().unwrap();
    assert!(entries.iter().all(|e| e["order"].as_u64().unwrap() <= 8));
    assert!(entries.iter().any(|e| e["spec"] == "Q8"));
    let v = json(&run(&["gamma", "C4", "--timing"]));
    assert!(v["timing_ms"].is_u64());
}

#[test]
fn verify_reports_every_group() {
    let out = run(&["verify", "--order-max", "16", "--jobs", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["violations"], 0);
    assert!(v["result"]["groups"].as_array().unwrap().len() > 20);
}
