//! Golden tests for the command-line contracts: byte-exact stdout,
//! deterministic re-runs, and exit statuses.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_galkinlab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(out: &Output) -> &str {
    std::str::from_utf8(&out.stdout).expect("utf-8 stdout")
}

fn assert_golden(args: &[&str], expected: &str) {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(stdout_of(&out), expected, "stdout mismatch for {args:?}");
}

const R3_TABLE: &str = "3\n0 2 1\n2 1 0\n1 0 2\n";

fn write_r3(dir: &Path) -> String {
    let path = dir.join("r3.tbl");
    std::fs::write(&path, R3_TABLE).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn count_golden() {
    assert_golden(&["count", "--n", "3", "--method", "both"], "10 10\n");
    assert_golden(&["count", "--n", "0"], "1\n");
    assert_golden(&["count", "--n", "4", "--method", "both"], "20 20\n");
    assert_golden(&["count", "--n", "7", "--method", "convolution"], "110\n");
}

#[test]
fn count_rejects_bad_n() {
    let out = run(&["count", "--n", "-1"]);
    assert!(!out.status.success());
}

#[test]
fn count_json() {
    let out = run(&["count", "--n", "3", "--method", "both", "--json"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(stdout_of(&out)).unwrap();
    assert_eq!(value["eq31"], 10);
    assert_eq!(value["convolution"], 10);
    assert_eq!(value["match"], true);
}

#[test]
fn enumerate_golden() {
    assert_golden(
        &["enumerate", "--q", "2", "--n", "1"],
        "q=2;1 ()\nq=2;1 (1,0)\n",
    );
    assert_golden(&["enumerate", "--q", "3", "--n", "0"], "q=3; ()\n");
    assert_golden(
        &["enumerate", "--q", "2", "--n", "2"],
        "q=2;2 ()\nq=2;2 (1,0)\nq=2;2 (1,1)\nq=2;1^2 ()\nq=2;1^2 (1,0)\n",
    );
}

#[test]
fn enumerate_rejects_composite_prime() {
    let out = run(&["enumerate", "--q", "4", "--n", "1"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("not prime"));
}

#[test]
fn enumerate_is_deterministic() {
    let a = run(&["enumerate", "--q", "3", "--n", "4"]);
    let b = run(&["enumerate", "--q", "3", "--n", "4"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout_of(&a).lines().count(), 20); // N(4)
}

#[test]
fn canon_golden() {
    assert_golden(
        &["canon", "--shape", "q=2;1,2", "--point", "1;1"],
        "(2,0)\n",
    );
    assert_golden(
        &["canon", "--shape", "q=2;1,3", "--point", "1;2"],
        "(1,0)(2,1)\n",
    );
    assert_golden(&["canon", "--shape", "q=5;2", "--point", "0"], "()\n");
}

#[test]
fn galkin_trivial_group_writes_r3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.tbl");
    let out = run(&[
        "galkin",
        "--shape",
        "",
        "--point",
        "",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(stdout_of(&out), "");
    assert_eq!(std::fs::read_to_string(&path).unwrap(), R3_TABLE);
}

#[test]
fn galkin_accepts_shape_form_and_prints_to_stdout() {
    let out = run(&["galkin", "--shape", "q=2;1", "--point", "1"]);
    assert!(out.status.success());
    let first = stdout_of(&out).lines().next().unwrap();
    assert_eq!(first, "6");
}

#[test]
fn galkin_json_carries_labels() {
    let out = run(&["galkin", "--shape", "6,2", "--point", "5,1", "--json"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(stdout_of(&out)).unwrap();
    assert_eq!(value["size"], 36);
    assert_eq!(value["labels"]["orders"], serde_json::json!([6, 2]));
    assert_eq!(value["labels"]["point"], serde_json::json!([5, 1]));
}

#[test]
fn check_pass_and_fail() {
    let dir = tempfile::tempdir().unwrap();
    let r3 = write_r3(dir.path());
    assert_golden(&["check", "--table", &r3], "pass\n");

    let bad = dir.path().join("bad.tbl");
    std::fs::write(&bad, "2\n0 1\n1 0\n").unwrap();
    let out = run(&["check", "--table", bad.to_str().unwrap()]);
    assert!(!out.status.success());
    assert_eq!(stdout_of(&out), "fail axiom i x=1\n");
}

#[test]
fn iso_self_and_none() {
    let dir = tempfile::tempdir().unwrap();
    let r3 = write_r3(dir.path());
    assert_golden(&["iso", "--table1", &r3, "--table2", &r3], "0 1 2\n");

    // G(Z3, 0) vs G(Z3, 1): same size, no isomorphism.
    let a = dir.path().join("a.tbl");
    let b = dir.path().join("b.tbl");
    for (path, point) in [(&a, "0"), (&b, "1")] {
        let out = run(&[
            "galkin",
            "--shape",
            "3",
            "--point",
            point,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let out = run(&[
        "iso",
        "--table1",
        a.to_str().unwrap(),
        "--table2",
        b.to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    assert_eq!(stdout_of(&out), "none\n");
}

#[test]
fn color_golden() {
    let dir = tempfile::tempdir().unwrap();
    let r3 = write_r3(dir.path());
    assert_golden(&["color", "--knot", "trefoil", "--table", &r3], "9\n");
    assert_golden(&["color", "--knot", "unknot", "--table", &r3], "3\n");
    assert_golden(&["color", "--knot", "figure_eight", "--table", &r3], "3\n");

    let diagram = dir.path().join("trefoil.knot");
    std::fs::write(&diagram, "arcs 3\n+ 2 0 1\n+ 0 1 2\n+ 1 2 0\n").unwrap();
    assert_golden(
        &["color", "--diagram", diagram.to_str().unwrap(), "--table", &r3],
        "9\n",
    );

    let out = run(&["color", "--knot", "granny", "--table", &r3]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown builtin"));
}

#[test]
fn color_rejects_bad_diagram() {
    let dir = tempfile::tempdir().unwrap();
    let r3 = write_r3(dir.path());
    let diagram = dir.path().join("bad.knot");
    std::fs::write(&diagram, "arcs 2\n+ 0 0 5\n").unwrap();
    let out = run(&[
        "color",
        "--diagram",
        diagram.to_str().unwrap(),
        "--table",
        &r3,
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("arc 5 out of range"));
}

#[test]
fn bijection_golden() {
    assert_golden(&["bijection", "--n", "8"], "OK 185\n");
    assert_golden(&["bijection", "--n", "0"], "OK 1\n");
}

#[test]
fn bijection_demo_golden() {
    let expected = "\
n = 20
x = (1,3,5)
y = (1,2,4)
λ = (1,1,2)
μ = (1,1,2,2,5,9)
(e1,e2,e3,e4) = (1,2,5,9)
(n1,n2,n3,n4) = (2,2,1,1)
(i1,i2,i3) = (2,3,4)
f = (0,2,4)  [f_s = x_s - 1]
f = (1,3,5)  [unshifted alternative f_s = x_s]
note: index sequences here use f_s = x_s - 1, keeping every f_s within 0 <= f_s <= e_(i_s) - 1
";
    assert_golden(
        &["bijection", "--x", "1,3,5", "--y", "1,2,4", "--lambda", "2,1,1"],
        expected,
    );
}

#[test]
fn bijection_demo_rejects_partial_data() {
    let out = run(&["bijection", "--x", "1", "--y", "0"]);
    assert!(!out.status.success());
}
