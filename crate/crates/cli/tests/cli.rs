use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn permod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_permod")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

struct Files(TempDir);

impl Files {
    fn new() -> Self {
        Files(tempfile::tempdir().unwrap())
    }

    fn vector(&self, name: &str, ring: &str, terms: &[(&str, &[&str])]) -> PathBuf {
        let arity = terms.first().map_or(1, |t| t.1.len());
        let terms: Vec<Value> = terms
            .iter()
            .map(|(c, t)| serde_json::json!({"coeff": c, "tuple": t}))
            .collect();
        self.write(name, &serde_json::json!({"arity": arity, "ring": ring, "terms": terms}).to_string())
    }

    fn write(&self, name: &str, body: &str) -> PathBuf {
        let p = self.0.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn decide_telescoping_and_characteristic_two() {
    let f = Files::new();
    let x = f.vector("x.json", "Q", &[("1", &["0"]), ("-1", &["2"])]);
    let g = f.vector("g.json", "Q", &[("1", &["0"]), ("-1", &["1"])]);
    let out = json(&permod(&["decide", "--structure", "dlo", "--ring", "Q", "--target", s(&x), "--gens", s(&g)]));
    assert_eq!(out["member"], true);
    assert_eq!(out["repCount"], 13);
    assert_eq!(out["paramSet"], serde_json::json!(["0", "2"]));
    assert_eq!(out["certificate"]["type"], "span-witness");

    let sum = f.vector("sum.json", "Q", &[("1", &["0"]), ("1", &["1"])]);
    let q = json(&permod(&["decide", "--target", s(&sum), "--gens", s(&g)]));
    assert_eq!(q["member"], false);
    let gf2 = json(&permod(&["decide", "--ring", "GF(2)", "--target", s(&sum), "--gens", s(&g)]));
    assert_eq!(gf2["member"], true);
    assert_eq!(gf2["ring"], "GF(2)");
}

#[test]
fn malformed_rational_is_an_input_error() {
    let f = Files::new();
    let bad = f.vector("bad.json", "Q", &[("1", &["1/0"])]);
    let g = f.vector("g.json", "Q", &[("1", &["0"])]);
    let out = permod(&["decide", "--target", s(&bad), "--gens", s(&g)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.json") && err.contains("terms[0]") && err.contains("1/0"), "{err}");
}

#[test]
fn emitted_decisions_verify_and_tampering_is_caught() {
    let f = Files::new();
    let x = f.vector("x.json", "Q", &[("1", &["0"])]);
    let g = f.vector("g.json", "Q", &[("1", &["0"]), ("-1", &["1"])]);
    let decision = f.0.path().join("d.json");
    let cert = f.0.path().join("c.json");
    let out = permod(&[
        "decide", "--target", s(&x), "--gens", s(&g), "--out", s(&decision), "--emit-certificate", s(&cert),
    ]);
    assert!(out.status.success());
    let c: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(c["type"], "dual-functional");
    let ok = json(&permod(&["verify", "--target", s(&x), "--gens", s(&g), "--decision", s(&decision)]));
    assert_eq!(ok["verified"], true);

    let mut d: Value = serde_json::from_str(&std::fs::read_to_string(&decision).unwrap()).unwrap();
    d["certificate"]["functional"] = serde_json::json!({});
    let tampered = f.write("t.json", &d.to_string());
    let out = permod(&["verify", "--target", s(&x), "--gens", s(&g), "--decision", s(&tampered)]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn integer_character_on_the_command_line() {
    let f = Files::new();
    let x = f.vector("x.json", "Z", &[("1", &["0"]), ("1", &["1"])]);
    let g = f.vector("g.json", "Z", &[("2", &["0"])]);
    let out = json(&permod(&["decide", "--target", s(&x), "--gens", s(&g)]));
    assert_eq!(out["member"], false);
    assert_eq!(out["certificate"]["type"], "character");
    assert_eq!(out["certificate"]["character"]["p0=x0<p1"], "1/2");
}

#[test]
fn omega_over_given_parameters() {
    let f = Files::new();
    let x = f.vector("x.json", "Q", &[("1", &["0"]), ("-1", &["2"])]);
    let out = json(&permod(&["omega", "--params", "0,2", "--target", s(&x)]));
    assert_eq!(out, serde_json::json!({"p0=x0<p1": "1", "p0<p1=x0": "-1"}));
}

#[test]
fn min_support_finds_a_difference() {
    let f = Files::new();
    let g = f.vector("g.json", "Q", &[("1", &["0"]), ("-1", &["1"])]);
    let out = json(&permod(&["min-support", "--k", "2", "--gens", s(&g)]));
    let terms = out["vector"]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 2);
    assert_eq!(terms[0]["coeff"], "1");
    assert_eq!(terms[1]["coeff"], "-1");
    let none = json(&permod(&["min-support", "--k", "1", "--gens", s(&g)]));
    assert_eq!(none["vector"], Value::Null);
}

#[test]
fn chain_reports_proper_inclusion() {
    let f = Files::new();
    let c1 = f.vector("c1.json", "Q", &[("1", &["0"]), ("-1", &["1"])]);
    let c2 = f.write(
        "c2.json",
        r#"[{"arity":1,"ring":"Q","terms":[{"coeff":"1","tuple":["0"]},{"coeff":"-1","tuple":["1"]}]},
            {"arity":1,"ring":"Q","terms":[{"coeff":"1","tuple":["0"]}]}]"#,
    );
    let out = json(&permod(&["chain", s(&c1), s(&c2)]));
    let step = &out["steps"][0];
    assert_eq!(step["status"], "proper");
    assert_eq!(step["generator"], 1);
    assert_eq!(step["decision"]["member"], false);
    assert_eq!(step["decision"]["certificate"]["type"], "dual-functional");
    let back = json(&permod(&["chain", s(&c2), s(&c1)]));
    assert_eq!(back["steps"][0]["status"], "not-included");
}

#[test]
fn generates_all_and_cyclic() {
    let f = Files::new();
    let point = f.vector("p.json", "Q", &[("1", &["0"])]);
    assert_eq!(json(&permod(&["generates-all", "--gens", s(&point)]))["generates"], true);
    let diff = f.vector("d.json", "Q", &[("1", &["0"]), ("-1", &["1"])]);
    assert_eq!(json(&permod(&["generates-all", "--gens", s(&diff)]))["generates"], false);
    assert_eq!(json(&permod(&["generates-all", "--ring", "Q", "--arity", "2"]))["generates"], false);

    let second = f.vector("v2.json", "Q", &[("1", &["0"]), ("-2", &["1"]), ("1", &["2"])]);
    let out = json(&permod(&["cyclic", "--gens", s(&diff), s(&second)]));
    let tuples: Vec<&str> = out["generator"]["terms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["tuple"][0].as_str().unwrap())
        .collect();
    assert_eq!(tuples, ["9/4", "5/2", "17/4", "9/2", "19/4"]);
    assert_eq!(out["backward"]["member"], true);

    let sum = f.vector("s.json", "Q", &[("1", &["0"]), ("1", &["1"])]);
    assert_eq!(permod(&["cyclic", "--gens", s(&sum)]).status.code(), Some(2));
}

#[test]
fn pure_set_structure_and_oracle() {
    let f = Files::new();
    let g = f.vector("g.json", "Q", &[("1", &["0", "1"]), ("-1", &["1", "0"])]);
    let yes = f.vector("y.json", "Q", &[("1", &["3", "5"]), ("-1", &["5", "3"])]);
    let no = f.vector("n.json", "Q", &[("1", &["3", "5"]), ("1", &["5", "3"])]);
    let run = |t: &Path| json(&permod(&["decide", "--structure", "pure-set", "--target", s(t), "--gens", s(&g)]));
    assert_eq!(run(&yes)["member"], true);
    assert_eq!(run(&no)["member"], false);

    let x = f.vector("x.json", "Q", &[("1", &["0"]), ("-1", &["2"])]);
    let d = f.vector("d.json", "Q", &[("1", &["0"]), ("-1", &["1"])]);
    let found = json(&permod(&["oracle-check", "--max-grid", "4", "--target", s(&x), "--gens", s(&d)]));
    assert_eq!(found["verdict"], "member");
    let p = f.vector("p.json", "Q", &[("1", &["0"])]);
    let none = json(&permod(&["oracle-check", "--max-grid", "8", "--target", s(&p), "--gens", s(&d)]));
    assert_eq!(none["verdict"], "inconclusive");
}

#[test]
fn random_instances_are_reproducible() {
    let a = permod(&["random-instance", "--seed", "5", "--arity", "2", "--ring", "GF(3)"]);
    let b = permod(&["random-instance", "--seed", "5", "--arity", "2", "--ring", "GF(3)"]);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["seed"], 5);
    assert_eq!(v["target"]["ring"], "GF(3)");
}
