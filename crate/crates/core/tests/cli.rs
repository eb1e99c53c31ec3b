use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .display()
        .to_string()
}

fn shv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shv"))
        .args(args)
        .env_remove("SHV_FIELD")
        .output()
        .expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stderr)))
}

#[test]
fn classify_reports_three_flags() {
    let o = shv(&[
        "complex",
        "classify",
        &fixture("path.json"),
        "--set",
        &fixture("path_half_open.json"),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["format"], "shv/1");
    // {b, ab} is the open star of b
    assert_eq!(v["open"], true);
    assert_eq!(v["closed"], false);
    assert_eq!(v["locally_closed"], true);
    let o = shv(&[
        "complex",
        "classify",
        &fixture("triangle.json"),
        "--cells",
        "a,abc",
    ]);
    assert_eq!(stdout_json(&o)["locally_closed"], false);
}

#[test]
fn subdivided_triangle_has_six_top_cells() {
    let o = shv(&["complex", "subdivide", &fixture("triangle.json")]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["top_cells"], 6);
    assert_eq!(v["carrier"].as_object().unwrap().len(), 1 + 6 + 12 + 6);
}

#[test]
fn broken_diamond_names_the_pair() {
    let o = shv(&["complex", "validate", &fixture("broken_diamond.json")]);
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr_json(&o)["error"].as_str().unwrap().to_string();
    assert!(msg.contains("between a and f"), "{msg}");
}

#[test]
fn schema_errors_have_positions() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{\"format\": \"shv/1\",\n \"cells\": 7}").unwrap();
    let o = shv(&["complex", "validate", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr_json(&o)["error"]
        .as_str()
        .unwrap()
        .contains("line 2"));
}

#[test]
fn product_and_star() {
    let o = shv(&[
        "complex",
        "product",
        &fixture("path.json"),
        &fixture("path.json"),
    ]);
    assert_eq!(stdout_json(&o)["cells"].as_array().unwrap().len(), 9);
    let o = shv(&["complex", "star", &fixture("circle.json"), "--cell", "a"]);
    assert_eq!(stdout_json(&o)["cells"], json!(["a", "ab", "ac"]));
}

#[test]
fn circle_cohomology() {
    let o = shv(&[
        "sheaf",
        "coh",
        "--complex",
        &fixture("circle.json"),
        "--sheaf",
        &fixture("circle_constant.json"),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["cohomology"], json!({"H0": 1, "H1": 1}));
}

#[test]
fn sections_on_half_open_edge() {
    let o = shv(&[
        "sheaf",
        "sections",
        "--complex",
        &fixture("path.json"),
        "--sheaf",
        &fixture("path_constant.json"),
        "--cells",
        "b,ab",
    ]);
    assert_eq!(stdout_json(&o)["cohomology"], json!({"H0": 1}));
}

#[test]
fn compare_and_dual() {
    let (k, f) = (fixture("line.json"), fixture("line_closed_ray.json"));
    let o = shv(&[
        "sheaf",
        "compare",
        "--complex",
        &k,
        "--sheaf",
        &f,
        "--other",
        &f,
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["pass"], true);

    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("dual.json");
    let dd = dir.path().join("dual2.json");
    let o = shv(&[
        "sheaf",
        "dual",
        "--complex",
        &k,
        "--sheaf",
        &f,
        "-o",
        d.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = shv(&[
        "sheaf",
        "dual",
        "--complex",
        &k,
        "--sheaf",
        d.to_str().unwrap(),
        "-o",
        dd.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = shv(&[
        "sheaf",
        "compare",
        "--complex",
        &k,
        "--sheaf",
        &f,
        "--other",
        dd.to_str().unwrap(),
    ]);
    assert_eq!(stdout_json(&o)["pass"], true);
    let o = shv(&[
        "sheaf",
        "compare",
        "--complex",
        &k,
        "--sheaf",
        &f,
        "--other",
        d.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout_json(&o)["pass"], false);
}

#[test]
fn extend_certificates() {
    let (k, f) = (fixture("path.json"), fixture("path_constant.json"));
    let o = shv(&["extend", "--complex", &k, "--sheaf", &f, "--cells", "b,ab"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["valid"], true);
    assert_eq!(v["u_open"], true);
    let o = shv(&["extend", "--complex", &k, "--sheaf", &f, "--cells", "a,b"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["sections_z"], json!({"H0": 2}));

    let tri = fixture("triangle.json");
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("k.json");
    std::fs::write(
        &s,
        r#"{"format":"shv/1","constant_on":["a","b","c","ab","bc","ac","abc"]}"#,
    )
    .unwrap();
    let o = shv(&[
        "extend",
        "--complex",
        &tri,
        "--sheaf",
        s.to_str().unwrap(),
        "--cells",
        "a,abc",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr_json(&o)["error"].as_str().unwrap().to_string();
    assert!(msg.contains("a ≤ ab ≤ abc"), "{msg}");
}

fn stalk_table(v: &Value) -> Vec<(String, Value)> {
    v["stalks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["cell"].as_str().unwrap().to_string(), r["dims"].clone()))
        .collect()
}

#[test]
fn sheafify_catalog() {
    let v = stdout_json(&shv(&["sheafify", "--model", "exp-pos"]));
    assert_eq!(
        stalk_table(&v),
        vec![
            ("x<0".to_string(), json!({})),
            ("x=0".to_string(), json!({})),
            ("x>0".to_string(), json!({"H0": 1}))
        ]
    );
    let v = stdout_json(&shv(&["sheafify", "--model", "exp-band"]));
    assert!(stalk_table(&v).iter().all(|(_, d)| *d == json!({})));
    let v = stdout_json(&shv(&["sheafify", "--model", "blowup-pole", "--d", "3"]));
    assert_eq!(stalk_table(&v)[0], ("O".to_string(), json!({"H1": 3})));
}

#[test]
fn sheafify_checks_and_model_files() {
    for check in ["identity", "duality", "etens"] {
        let o = shv(&[
            "sheafify",
            "--model",
            "half-open-interval",
            "--check",
            check,
        ]);
        assert_eq!(o.status.code(), Some(0), "{check}");
        assert_eq!(stdout_json(&o)["check"]["pass"], true);
    }
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("model.json");
    let a = stdout_json(&shv(&[
        "sheafify",
        "--model",
        "exp-neg",
        "--translate",
        "-1/2",
        "--emit-model",
        p.to_str().unwrap(),
    ]));
    let b = stdout_json(&shv(&["sheafify", "--model", p.to_str().unwrap()]));
    assert_eq!(a["stalks"], b["stalks"]);
    let o = shv(&["sheafify", "--model", "no-such-model"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn field_flag_beats_environment() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_shv"));
        c.env_remove("SHV_FIELD");
        if let Some(e) = env {
            c.env("SHV_FIELD", e);
        }
        if let Some(f) = flag {
            c.args(["--field", f]);
        }
        let o = c.args(["sheafify", "--model", "const"]).output().unwrap();
        stdout_json(&o)["field"].as_str().unwrap().to_string()
    };
    assert_eq!(run(None, None), "Q");
    assert_eq!(run(Some("F3"), None), "F3");
    assert_eq!(run(Some("F3"), Some("Q")), "Q");
    let o = shv(&["--field", "F4", "sheafify", "--model", "const"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn germ_towers() {
    let o = shv(&[
        "germ",
        "--example",
        "exp-neg",
        "--point",
        "0",
        "--stages",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["stabilized"], true);
    assert_eq!(v["limit"], json!({}));
    assert_eq!(v["consistent"], true);
    let v = stdout_json(&shv(&["germ", "--example", "const", "--point", "0"]));
    assert_eq!(v["limit"], json!({"H0": 1}));
    let o = shv(&["germ", "--example", "const", "--stages", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn suite_is_deterministic_and_catches_the_fixture() {
    let a = shv(&["suite", "--seed", "5", "--count", "20"]);
    let b = shv(&["suite", "--seed", "5", "--count", "20"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let o = shv(&["suite", "--count", "5", "--inject-broken"]);
    assert_eq!(o.status.code(), Some(4));
    let v = stdout_json(&o);
    let functoriality = v["suites"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["name"] == "sheaf-functoriality")
        .unwrap();
    let msg = functoriality["first_failure"]["message"].as_str().unwrap();
    assert!(msg.contains("a < {ab, ac} < abc"), "{msg}");
}
