use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_flatcount"));
    c.env_remove("FLATCOUNT_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn repo_file(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn validator(schema: &str) -> jsonschema::Validator {
    let text = std::fs::read_to_string(repo_file(&format!("docs/schema/{schema}"))).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn assert_valid(schema: &str, json_lines: &str) {
    let v = validator(schema);
    let mut n = 0;
    for line in json_lines.lines().filter(|l| !l.trim().is_empty()) {
        let doc: Value = serde_json::from_str(line).unwrap();
        let errors: Vec<String> = v.iter_errors(&doc).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{schema}: {errors:?}\n{line}");
        n += 1;
    }
    assert!(n > 0, "no records to validate against {schema}");
}

fn tmpdir(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("flatcount-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn stratum_of_lab_template() {
    let o = run(&["stratum", "--template", "lab", "--a", "1/2", "--b", "1/2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next(), Some("H(2), genus 2, area 3/4"));
}

#[test]
fn stratum_of_pillowcase_file() {
    let f = repo_file("docs/examples/pillowcase.json");
    let o = run(&["stratum", "--file", f.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("Q(-1^4), genus 0"), "{}", stdout(&o));
    // four cones of angle π: the angle defects add up to 4π
    let json = stdout(&run(&["stratum", "--file", f.to_str().unwrap(), "--format", "json"]));
    let v: Value = serde_json::from_str(&json).unwrap();
    let defect: i64 = v["cones"].as_array().unwrap().iter().map(|c| 2 - c["angle_pi"].as_i64().unwrap()).sum();
    assert_eq!(defect, 4);
}

#[test]
fn malformed_json_exits_with_two() {
    let d = tmpdir("bad");
    let f = d.join("bad.json");
    std::fs::write(&f, "{\"version\": 1, \"cells\": [").unwrap();
    let o = run(&["stratum", "--file", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("parse error"));
}

#[test]
fn invalid_surface_exits_with_two() {
    let d = tmpdir("mismatch");
    let f = d.join("s.json");
    // a unit square whose vertical sides are glued to horizontal ones
    std::fs::write(
        &f,
        r#"{"version":1,"kind":"abelian","field":"rational","cells":[[["0","0"],["2","0"],["2","1"],["0","1"]]],"gluings":[[0,0,0,1],[0,2,0,3]]}"#,
    )
    .unwrap();
    let o = run(&["stratum", "--file", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["stratum"][..],
        &["stratum", "--template", "octagon"],
        &["stratum", "--template", "lab", "--a", "1/2"],
        &["count", "--template", "torus"],
        &["count", "--template", "torus", "--length", "-3"],
        &["count", "--template", "torus", "--length", "3", "--filter", "pair:w1,w2"],
        &["frobnicate"],
        &["stratum", "--template", "lab", "--a", "3/2", "--b", "1/2"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn failing_verification_exits_with_one() {
    let o = run(&["verify", "windtree", "--max-length", "4", "--torus-tol", "0.001", "--windtree-tol", "0.001"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL windtree/"));
}

#[test]
fn verify_constants_passes() {
    let o = run(&["verify", "constants"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("suite constants: 3/3 passed"));
}

#[test]
fn torus_count_csv_approaches_three_over_pi_squared() {
    let o = run(&["count", "--template", "torus", "--length", "100", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("L,N,N/(piL^2)"));
    let last: Vec<&str> = lines.last().unwrap().split(',').collect();
    assert_eq!(last[0], "100");
    let est: f64 = last[2].parse().unwrap();
    let target = 3.0 / (std::f64::consts::PI * std::f64::consts::PI);
    assert!((est - target).abs() / target < 0.02, "{est}");
}

#[test]
fn count_writes_both_reports() {
    let d = tmpdir("count");
    let out = d.join("run");
    let o = run(&[
        "count", "--template", "lab", "--a", "1/2", "--b", "1/2", "--length", "6", "--filter", "weierstrass-pair", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let cyl = std::fs::read_to_string(out.join("cylinders.jsonl")).unwrap();
    let csv = std::fs::read_to_string(out.join("convergence.csv")).unwrap();
    let spec = std::fs::read_to_string(out.join("spec.txt")).unwrap();
    assert_eq!(csv.lines().count(), 11);
    for line in cyl.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        let marks: Vec<&str> = v["core_markings"].as_array().unwrap().iter().map(|m| m.as_str().unwrap()).collect();
        assert!(marks.contains(&"w1") && marks.contains(&"w2"), "{line}");
    }
    let expected = format!("template=lab a=1/2 b=1/2 length=6 filter=weierstrass-pair steps=10 out={}\n", out.display());
    assert_eq!(spec, expected);
}

#[test]
fn outputs_match_published_schemas() {
    let pill = repo_file("docs/examples/pillowcase.json");
    let surface = stdout(&run(&["export", "--template", "lab", "--a", "1/3", "--b", "3/2-1/2√5"]));
    assert_valid("surface.schema.json", &serde_json::to_string(&serde_json::from_str::<Value>(&surface).unwrap()).unwrap());
    let file = std::fs::read_to_string(&pill).unwrap();
    assert_valid("surface.schema.json", &serde_json::to_string(&serde_json::from_str::<Value>(&file).unwrap()).unwrap());
    for t in [&["--template", "q", "--d", "2"][..], &["--template", "lab", "--a", "1/2", "--b", "1/3"], &["--template", "torus"]] {
        let mut args = vec!["count", "--length", "5"];
        args.extend_from_slice(t);
        assert_valid("cylinder.schema.json", &stdout(&run(&args)));
        let mut args = vec!["stratum", "--format", "json"];
        args.extend_from_slice(t);
        assert_valid("stratum.schema.json", &stdout(&run(&args)));
    }
    assert_valid("constant.schema.json", &stdout(&run(&["constants", "--d", "3", "--format", "json"])));
    assert_valid("check.schema.json", &stdout(&run(&["verify", "constants", "--format", "json"])));
}

#[test]
fn thread_flag_and_environment_agree() {
    let args = ["count", "--template", "q", "--d", "2", "--length", "7"];
    let a = run(&[&args[..], &["--threads", "1"]].concat());
    let b = bin().args(args).env("FLATCOUNT_THREADS", "3").output().unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    let bad = bin().args(args).env("FLATCOUNT_THREADS", "many").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn exported_templates_round_trip_through_files() {
    let d = tmpdir("export");
    for (name, t) in [("torus", &["--template", "torus"][..]), ("q1", &["--template", "q"]), ("golden", &["--template", "lab", "--a", "3/2-1/2√5", "--b", "3/2-1/2√5"])] {
        let f = d.join(format!("{name}.json"));
        let o = run(&[&["export", "--out", f.to_str().unwrap()][..], t].concat());
        assert!(o.status.success());
        let direct = stdout(&run(&[&["count", "--length", "4"][..], t].concat()));
        let via_file = stdout(&run(&["count", "--length", "4", "--file", f.to_str().unwrap()]));
        assert_eq!(direct, via_file, "{name}");
    }
}
