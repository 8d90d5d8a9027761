use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn aqpack(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aqpack")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn schema(name: &str) -> jsonschema::Validator {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schemas").join(name);
    let value: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&value).unwrap()
}

fn assert_valid(schema_name: &str, text: &str) -> Value {
    let value: Value = serde_json::from_str(text).unwrap_or_else(|e| panic!("not JSON ({e}): {text}"));
    let validator = schema(schema_name);
    let errors: Vec<String> = validator.iter_errors(&value).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{schema_name}: {errors:?}\n{text}");
    value
}

#[test]
fn construct_exit_codes() {
    let ok = aqpack(&["construct", "-n", "3", "-S", "000,001,011"]);
    assert_eq!(code(&ok), 0);
    let doc = assert_valid("certificate.schema.json", &stdout(&ok));
    assert_eq!(doc["trees"].as_array().unwrap().len(), 3);

    let dup = aqpack(&["construct", "-n", "3", "-S", "000,000,001"]);
    assert_eq!(code(&dup), 2);
    assert!(String::from_utf8_lossy(&dup.stderr).contains("duplicate"));

    assert_eq!(code(&aqpack(&["construct", "-n", "3", "-S", "000,001"])), 2);
    assert_eq!(code(&aqpack(&["construct", "-n", "3", "-S", "000,001,0111"])), 2);
    assert_eq!(code(&aqpack(&["construct", "-n", "3", "-S", "000,001,0a1"])), 2);
    assert_eq!(code(&aqpack(&["construct", "-n", "2", "-S", "00,01,11"])), 2);
    assert_eq!(code(&aqpack(&["construct", "-n", "3"])), 2);
    assert_eq!(code(&aqpack(&["frobnicate"])), 2);
}

#[test]
fn construct_reports_the_image_case() {
    let out = aqpack(&["construct", "-n", "4", "-S", "0000,0011,1100"]);
    assert_eq!(code(&out), 0);
    let doc = assert_valid("certificate.schema.json", &stdout(&out));
    assert_eq!(doc["trees"].as_array().unwrap().len(), 5);
    assert!(doc["case"].as_str().unwrap().starts_with("Case2_1_"), "{}", doc["case"]);
    assert_eq!(doc["fallback_used"], false);
}

#[test]
fn verify_round_trip_and_rejections() {
    let dir = tempfile::tempdir().unwrap();
    let cert = stdout(&aqpack(&["construct", "-n", "5", "-S", "00000,00110,10000"]));
    let good = dir.path().join("good.json");
    std::fs::write(&good, &cert).unwrap();
    let out = aqpack(&["verify", good.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let report = assert_valid("report.schema.json", &stdout(&out));
    assert_eq!(report["accepted"], true);

    // Delete an edge between two non-terminals.
    let mut doc: Value = serde_json::from_str(&cert).unwrap();
    let terminals: Vec<String> = doc["s"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
    let trees = doc["trees"].as_array_mut().unwrap();
    let (ti, ei) = trees
        .iter()
        .enumerate()
        .find_map(|(ti, t)| {
            t["edges"].as_array().unwrap().iter().position(|e| {
                e.as_array().unwrap().iter().all(|v| !terminals.contains(&v.as_str().unwrap().to_string()))
            })
            .map(|ei| (ti, ei))
        })
        .expect("some tree has an inner edge");
    trees[ti]["edges"].as_array_mut().unwrap().remove(ei);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&doc).unwrap()).unwrap();
    let out = aqpack(&["verify", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let report = assert_valid("report.schema.json", &stdout(&out));
    let kinds: Vec<&str> = report["violations"].as_array().unwrap().iter().map(|v| v["kind"].as_str().unwrap()).collect();
    assert!(kinds.contains(&"Disconnected"), "{kinds:?}");

    let truncated = dir.path().join("truncated.json");
    std::fs::write(&truncated, &cert[..cert.len() / 2]).unwrap();
    assert_eq!(code(&aqpack(&["verify", truncated.to_str().unwrap()])), 2);

    let extra = dir.path().join("extra.json");
    std::fs::write(&extra, cert.replacen('{', "{\"comment\": \"x\",", 1)).unwrap();
    assert_eq!(code(&aqpack(&["verify", extra.to_str().unwrap()])), 2);

    assert_eq!(code(&aqpack(&["verify", dir.path().join("missing.json").to_str().unwrap()])), 2);
}

#[test]
fn sweep_contract() {
    let out = aqpack(&["sweep", "-n", "3", "--exhaustive", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let summary = assert_valid("sweep.schema.json", &stdout(&out));
    assert_eq!((summary["triples"].as_u64(), summary["min_size"].as_u64()), (Some(56), Some(3)));

    assert_eq!(code(&aqpack(&["sweep", "-n", "6", "--exhaustive"])), 2);
    assert_eq!(code(&aqpack(&["sweep", "-n", "4"])), 2);
    assert_eq!(code(&aqpack(&["sweep", "-n", "4", "--samples", "0"])), 2);
}

#[test]
fn sweeps_are_deterministic_across_job_counts() {
    let one = aqpack(&["sweep", "-n", "4", "--exhaustive", "--jobs", "1", "--format", "json"]);
    let many = aqpack(&["sweep", "-n", "4", "--exhaustive", "--jobs", "4", "--format", "json"]);
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, many.stdout);

    let a = aqpack(&["sweep", "-n", "6", "--samples", "40", "--seed", "7", "--jobs", "3"]);
    let b = aqpack(&["sweep", "-n", "6", "--samples", "40", "--seed", "7", "--jobs", "1"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let c = aqpack(&["sweep", "-n", "6", "--samples", "40", "--seed", "8", "--format", "json"]);
    let d = aqpack(&["sweep", "-n", "6", "--samples", "40", "--seed", "7", "--format", "json"]);
    let (c, d) = (assert_valid("sweep.schema.json", &stdout(&c)), assert_valid("sweep.schema.json", &stdout(&d)));
    assert_eq!(c["min_size"], 9);
    assert_eq!(d["min_size"], 9);
    assert_ne!(c["mode"], d["mode"]);

    let x = aqpack(&["construct", "-n", "6", "-S", "000001,010110,111000"]);
    let y = aqpack(&["construct", "-n", "6", "-S", "111000,000001,010110"]);
    assert_eq!(code(&x), 0);
    assert_eq!(x.stdout, y.stdout);
}

#[test]
fn oracle_contract() {
    let out = aqpack(&["oracle", "-n", "3", "-S", "001,010,100", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let doc = assert_valid("oracle.schema.json", &stdout(&out));
    assert_eq!((doc["value"].as_u64(), doc["exact"].as_bool()), (Some(4), Some(true)));

    let out = aqpack(&["oracle", "-n", "1", "-S", "0,1"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("tau = 1 (exact"));

    assert_eq!(code(&aqpack(&["oracle", "-n", "5", "-S", "00000,00001,00010"])), 2);
    assert_eq!(code(&aqpack(&["oracle", "-n", "3", "-S", "001,010,100", "--budget", "0"])), 2);

    let out = aqpack(&["oracle", "-n", "4", "-S", "0000,0101,1010", "--budget", "5", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let doc = assert_valid("oracle.schema.json", &stdout(&out));
    assert_eq!(doc["exact"], false);
    assert!(doc["lower"].as_u64() <= doc["upper"].as_u64());
}

#[test]
fn paths_contract() {
    let out = aqpack(&["paths", "-n", "4", "-u", "0000", "-v", "1111", "-k", "7"]);
    assert_eq!(code(&out), 0);
    let doc = assert_valid("paths.schema.json", &stdout(&out));
    assert_eq!(doc["paths"].as_array().unwrap().len(), 7);

    let out = aqpack(&["paths", "-n", "4", "-u", "0000", "-v", "1111", "-k", "8"]);
    assert_eq!(code(&out), 1);
    let doc = assert_valid("paths.schema.json", &stdout(&out));
    assert!(doc["size"].as_u64().unwrap() <= 7);

    let out = aqpack(&["paths", "-n", "2", "-u", "00", "-v", "11", "-k", "1"]);
    assert_eq!(code(&out), 0);
    let doc = assert_valid("paths.schema.json", &stdout(&out));
    assert_eq!(doc["paths"][0]["vertices"], serde_json::json!(["00", "11"]));

    assert_eq!(code(&aqpack(&["paths", "-n", "3", "-u", "000", "-v", "000", "-k", "1"])), 2);
    assert_eq!(code(&aqpack(&["paths", "-n", "3", "-u", "000", "-v", "001", "-k", "0"])), 2);
}

#[test]
fn info_contract() {
    for (n, degree, conn, bound) in [(1, 1, 1, 0), (3, 5, 4, 3), (4, 7, 7, 5)] {
        let out = aqpack(&["info", "-n", &n.to_string(), "--format", "json"]);
        assert_eq!(code(&out), 0);
        let doc = assert_valid("info.schema.json", &stdout(&out));
        assert_eq!(doc["degree"], degree);
        assert_eq!(doc["connectivity"], conn);
        assert_eq!(doc["hager_bound_k3"], bound);
    }
    assert_eq!(code(&aqpack(&["info", "-n", "0"])), 2);
    assert_eq!(code(&aqpack(&["info", "-n", "11"])), 2);
}

fn unquote(id: &str) -> String {
    id.trim_matches('"').to_string()
}

#[test]
fn dot_output_parses() {
    let out = aqpack(&["construct", "-n", "4", "-S", "0000,0011,0101", "--format", "dot"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let graphs = dot_parser::ast::Graphs::try_from(text.as_str()).expect("valid DOT");
    assert_eq!(graphs.graphs.len(), 5);
    for graph in graphs.graphs {
        let canonical = dot_parser::canonical::Graph::from(graph);
        assert!(!canonical.is_digraph);
        let terminals: Vec<String> = canonical
            .nodes
            .set
            .values()
            .filter(|node| node.attr.elems.iter().any(|(k, v)| k.to_string() == "peripheries" && v.to_string() == "2"))
            .map(|node| unquote(&node.id))
            .collect();
        let mut terminals = terminals;
        terminals.sort();
        assert_eq!(terminals, ["0000", "0011", "0101"]);
        // A tree: one edge fewer than nodes.
        assert_eq!(canonical.edges.set.len() + 1, canonical.nodes.set.len());
    }

    let out = aqpack(&["paths", "-n", "3", "-u", "000", "-v", "011", "-k", "3", "--format", "dot"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let graphs = dot_parser::ast::Graphs::try_from(text.as_str()).expect("valid DOT");
    assert_eq!(graphs.graphs.len(), 1);
}
