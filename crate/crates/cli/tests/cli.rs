use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).display().to_string()
}

fn cjde(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cjde")).args(args).output().expect("spawn cjde")
}

fn lines(o: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&o.stdout).lines().map(|l| serde_json::from_str(l).expect("json line")).collect()
}

fn line<'a>(ls: &'a [Value], check: &str) -> &'a Value {
    ls.iter().find(|l| l["check"] == check).unwrap_or_else(|| panic!("no {check} line"))
}

#[test]
fn check_exit_codes() {
    let o = cjde(&["check", &fixture("heis2.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(lines(&o).iter().all(|l| l["status"] == "pass"));

    let o = cjde(&["check", &fixture("heis2-broken.json")]);
    assert_eq!(o.status.code(), Some(1));
    let ls = lines(&o);
    let flat = line(&ls, "flatness");
    assert_eq!(flat["status"], "fail");
    assert!(flat["witness"].as_str().is_some_and(|w| !w.ends_with(": 0")));
    assert_eq!(line(&ls, "mc_iff_axioms")["status"], "pass");

    let dir = std::env::temp_dir().join(format!("cjde-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for (name, text) in [
        ("bad.json", "{"),
        ("unknown.json", r#"{"schema_version":1,"m":0,"n":1,"colour":"red"}"#),
        ("shape.json", r#"{"schema_version":1,"m":0,"n":2,"lambda":["1"]}"#),
        ("skew.json", r#"{"schema_version":1,"m":0,"n":2,"deformations":{"e":[["0","1"],["1","0"]]}}"#),
    ] {
        let p = dir.join(name);
        std::fs::write(&p, text).unwrap();
        let o = cjde(&["check", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{name}");
        assert!(o.stdout.is_empty());
    }
    assert_eq!(cjde(&["check", "/nonexistent/x.json"]).status.code(), Some(2));
    assert_eq!(cjde(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn deform_reports() {
    let o = cjde(&["deform", &fixture("heis2.json"), "--eta", "e12"]);
    assert_eq!(o.status.code(), Some(0));
    let ls = lines(&o);
    assert_eq!(line(&ls, "maurer_cartan")["status"], "pass");
    assert_eq!(line(&ls, "graph_dirac_jacobi")["status"], "pass");

    let o = cjde(&["deform", &fixture("obst1.json"), "--eta", "eta1", "--order", "4"]);
    assert_eq!(o.status.code(), Some(1));
    let ls = lines(&o);
    assert_eq!(line(&ls, "kuranishi")["status"], "fail");
    assert_eq!(line(&ls, "extension")["obstructed_at"], 2);
    assert_eq!(line(&ls, "mc_iff_dirac_jacobi")["status"], "pass");

    let o = cjde(&["deform", &fixture("dgla1.json"), "--eta", "eta1", "--order", "4"]);
    assert_eq!(o.status.code(), Some(1));
    let ls = lines(&o);
    assert_eq!(line(&ls, "kuranishi")["status"], "pass");
    assert_eq!(line(&ls, "extension")["status"], "pass");

    let a = cjde(&["deform", &fixture("def1.json"), "--random", "42"]);
    let b = cjde(&["deform", &fixture("def1.json"), "--random", "42"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(line(&lines(&a), "mc_iff_dirac_jacobi")["status"], "pass");

    assert_eq!(cjde(&["deform", &fixture("heis2.json"), "--eta", "nope"]).status.code(), Some(2));
    assert_eq!(cjde(&["deform", &fixture("heis2.json")]).status.code(), Some(2));
    let o = cjde(&["deform", &fixture("omni1.json"), "--eta", "x_e12"]);
    assert_eq!(line(&lines(&o), "kuranishi")["status"], "unsupported");
}

#[test]
fn complement_reports() {
    let o = cjde(&["complement", &fixture("def1.json"), "--epsilon", "eps1"]);
    assert_eq!(o.status.code(), Some(0));
    let ls = lines(&o);
    assert_eq!(line(&ls, "morphism")["failures"], 0);
    assert_eq!(line(&ls, "m2_closed_form")["status"], "pass");

    let o = cjde(&["complement", &fixture("heis2.json"), "--epsilon", "zero"]);
    assert_eq!(o.status.code(), Some(0));
    let ls = lines(&o);
    assert_eq!(line(&ls, "transported_theta")["theta0"], line(&ls, "transported_theta")["theta1"]);

    let o = cjde(&["complement", &fixture("heis2.json"), "--epsilon", "eps1", "--corrupt-m2"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(line(&lines(&o), "morphism")["status"], "fail");

    assert_eq!(cjde(&["complement", &fixture("heis2.json"), "--epsilon", "nope"]).status.code(), Some(2));
}

#[test]
fn cohomology_and_selftest() {
    let o = cjde(&["cohomology", &fixture("dgla1.json"), "--degree", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(line(&lines(&o), "H^3")["dim"], 0);
    let o = cjde(&["cohomology", &fixture("heis2.json")]);
    let ls = lines(&o);
    for k in 0..=2 {
        assert_eq!(line(&ls, &format!("H^{k}"))["dim"], 0);
    }
    assert_eq!(cjde(&["cohomology", &fixture("omni1.json")]).status.code(), Some(2));
    assert_eq!(cjde(&["cohomology", &fixture("heis2.json"), "--degree", "5"]).status.code(), Some(2));

    let a = cjde(&["selftest", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, cjde(&["selftest", "--seed", "7"]).stdout);
}

#[test]
fn out_and_text_format() {
    let p = std::env::temp_dir().join(format!("cjde-out-{}.jsonl", std::process::id()));
    let o = cjde(&["check", &fixture("omni1.json"), "--out", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read(&p).unwrap(), cjde(&["check", &fixture("omni1.json")]).stdout);
    let t = cjde(&["check", &fixture("heis2-broken.json"), "--format", "text"]);
    let text = String::from_utf8(t.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("FAIL") && l.contains("flatness") && l.contains("witness=")));
}
