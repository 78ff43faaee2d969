use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lpmirror_cli::store::Store;
use lpmirror_core::format::write_polytope;
use lpmirror_core::polytope::enumerate::reflexive_polygons;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpmirror"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn period_of_p2_mirror() {
    let out = stdout(&["period", path(&data("p2.poly")), "--terms", "10"]);
    let values: Vec<&str> = out.lines().map(|l| l.split(" : ").nth(1).unwrap()).collect();
    assert_eq!(values, ["1", "0", "0", "6", "0", "0", "90", "0", "0", "1680"]);
}

#[test]
fn period_of_threefold() {
    let out = stdout(&["period", path(&data("threefold.poly")), "--terms", "10", "--format", "structured"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let expected = ["1", "0", "8", "0", "120", "0", "2240", "0", "47320", "0"];
    assert_eq!(v["period"], serde_json::json!(expected));
}

#[test]
fn fit_and_ramify_quadrilateral() {
    let out = stdout(&["fit", path(&data("quadrilateral.poly"))]);
    assert!(out.starts_with("order 2\n"));
    let out = stdout(&["ramify", path(&data("quadrilateral.poly")), "--format", "structured"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["report"]["defect"], 1);
}

#[test]
fn p519664_second_polynomial_is_extremal_of_manifold_type() {
    let out = stdout(&["ramify", path(&data("p519664_f2.poly"))]);
    assert!(out.contains("defect 0"), "{out}");
    let out = stdout(&["type", path(&data("p519664_f2.poly"))]);
    assert!(out.contains("type: manifold"), "{out}");
}

#[test]
fn operator_files_round_trip_through_fit() {
    let dir = tempfile::tempdir().unwrap();
    let op = dir.path().join("l.op");
    stdout(&["fit", path(&data("p2.poly")), "--terms", "30", "-o", path(&op)]);
    let out = stdout(&["ramify", path(&op)]);
    assert!(out.starts_with("D^2 - 27t^3(D+1)(D+2)\n"), "{out}");
    assert!(out.contains("defect 0"));
}

#[test]
fn parse_failures_exit_with_2_and_a_line_number() {
    let out = run(&["period", path(&data("garbage.txt"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    let out = run(&["period", path(&data("empty.poly"))]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["period", "/nonexistent/file"]);
    assert_eq!(out.status.code(), Some(2));
    // A polynomial where a polytope is expected.
    let out = run(&["mink", path(&data("threefold.poly"))]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn computation_failures_exit_with_1() {
    // Too small a degree bound for the quadrilateral.
    let out = run(&["fit", path(&data("quadrilateral.poly")), "--max-degree", "2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_flags_exit_with_2() {
    let out = run(&["period", path(&data("p2.poly")), "--terms", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["quantum"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mink_outputs_and_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(&["mink", path(&data("p519664.txt")), "--out-dir", path(dir.path())]);
    assert!(out.contains("3*x^-1") && out.contains("2*x^-1"));
    assert!(dir.path().join("mp-0.poly").exists() && dir.path().join("mp-1.poly").exists());
    let prov: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("provenance.json")).unwrap()).unwrap();
    assert_eq!(prov["input"], "519664");
    assert_eq!(prov["polynomials"].as_array().unwrap().len(), 2);

    let out = stdout(&["mink", path(&data("p2_triangle.txt"))]);
    assert!(out.contains("# mp 0: x + y + x^-1*y^-1"));

    let out = stdout(&["mink", path(&data("newt_threefold.txt")), "--format", "structured"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["polynomials"].as_array().unwrap().is_empty());
    let blocked = v["facets"].as_array().unwrap().iter().filter(|f| f["admissible"] == 0).count();
    assert_eq!(blocked, 1);
}

#[test]
fn reflexive_check() {
    let out = stdout(&["reflexive-check", path(&data("p2_triangle.txt"))]);
    assert!(out.contains("reflexive: true") && out.contains("normalized volume: 3"));
}

#[test]
fn quantum_and_match() {
    let out = stdout(&["quantum", "--matrix", path(&data("p2.matrix")), "--terms", "7"]);
    assert_eq!(out.lines().last(), Some("6 : 1/8"));
    let out = stdout(&["quantum", "--toric", path(&data("p2.toric")), "--terms", "7", "--regularized"]);
    assert_eq!(out.lines().last(), Some("6 : 90"));

    let out = stdout(&["match", path(&data("p2.poly")), "--toric", path(&data("p2.toric"))]);
    assert!(out.starts_with("match to depth"));
    let out = stdout(&["match", path(&data("p2.poly")), "--matrix", path(&data("p2.matrix"))]);
    assert!(out.starts_with("match to depth"));
    let out = stdout(&[
        "match",
        path(&data("cubic_surface_mirror.poly")),
        "--toric",
        path(&data("cubic_surface.toric")),
        "--terms",
        "30",
    ]);
    assert!(out.starts_with("match to depth 30"), "{out}");
    let out = stdout(&["match", path(&data("quadrilateral.poly")), "--toric", path(&data("p2.toric"))]);
    assert!(out.starts_with("mismatch at index 2"), "{out}");
}

#[test]
fn regularize_a_period_file() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.period");
    fs::write(&g, "1\n0\n1/2\n").unwrap();
    let out = stdout(&["regularize", path(&g)]);
    assert_eq!(out, "0 : 1\n1 : 0\n2 : 1\n");
}

fn write_polygons(dir: &Path) {
    for (i, p) in reflexive_polygons(3).iter().enumerate() {
        fs::write(dir.join(format!("polygon-{i:02}.txt")), write_polytope(p)).unwrap();
    }
}

#[test]
fn survey_of_reflexive_polygons_is_idempotent() {
    let inputs = tempfile::tempdir().unwrap();
    write_polygons(inputs.path());
    let store = tempfile::tempdir().unwrap();
    let args = ["survey", path(inputs.path()), "--store", path(store.path()), "--format", "structured"];
    let v: serde_json::Value = serde_json::from_str(&stdout(&args)).unwrap();
    assert_eq!(v["inputs"], 16);
    assert_eq!(v["records"], 16);
    assert_eq!(v["new_records"], 16);
    assert_eq!(v["distinct_heads"], 8);
    assert_eq!(v["operator_defects"]["1"], 2);

    let again: serde_json::Value = serde_json::from_str(&stdout(&args)).unwrap();
    assert_eq!(again["new_records"], 0);

    let s = Store::open(store.path()).unwrap();
    assert!(s.verify().unwrap().is_empty());
    assert_eq!(s.records().unwrap().len(), 16);
    let index = fs::read_to_string(store.path().join("index.json")).unwrap();
    assert_eq!(serde_json::from_str::<serde_json::Value>(&index).unwrap().as_array().unwrap().len(), 16);
}

#[test]
fn survey_records_failures_without_aborting() {
    let inputs = tempfile::tempdir().unwrap();
    fs::copy(data("p2_triangle.txt"), inputs.path().join("a.txt")).unwrap();
    fs::copy(data("garbage.txt"), inputs.path().join("b.txt")).unwrap();
    fs::copy(data("newt_threefold.txt"), inputs.path().join("c.txt")).unwrap();
    let store = tempfile::tempdir().unwrap();
    let out = stdout(&["survey", path(inputs.path()), "--store", path(store.path())]);
    assert!(out.contains("inputs: 3 (2 failed)"), "{out}");
    assert!(out.contains("records: 3"), "{out}");

    let out = run(&["survey", path(inputs.path())]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn outputs_are_deterministic() {
    let a = stdout(&["mink", path(&data("p519664.txt")), "--format", "structured"]);
    let b = stdout(&["mink", path(&data("p519664.txt")), "--format", "structured"]);
    assert_eq!(a, b);
    let a = stdout(&["ramify", path(&data("threefold.poly"))]);
    let b = stdout(&["ramify", path(&data("threefold.poly"))]);
    assert_eq!(a, b);
}
