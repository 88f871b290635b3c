//! End-to-end tests of the `hbnet` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hbnet::constructions::build_x2_hat;
use hbnet::net::{from_document, Network, NetworkKind, ReluNet};
use hbnet::pwl::{extract_pwl, sup_error_vs_quadratic};
use tempfile::TempDir;

fn hbnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hbnet")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn build(args: &[&str]) -> Network {
    let mut full = vec!["build"];
    full.extend_from_slice(args);
    let out = hbnet(&full);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    from_document(&stdout(&out)).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn build_targets_have_expected_shapes() {
    let x2 = build(&["x2", "--levels", "4"]);
    assert_eq!((x2.kind(), x2.depth(), x2.widths().iter().max().copied()), (NetworkKind::Skip, 4, Some(3)));
    let hat = build(&["hat2d"]);
    assert_eq!((hat.kind(), hat.depth(), hat.widths()), (NetworkKind::Mlp, 2, vec![15, 15]));
    let mono = build(&["monomial", "--exponents", "2,1", "--levels", "3"]);
    assert_eq!(mono.kind(), NetworkKind::Skip);
    assert!(mono.widths().iter().all(|&w| w == 4));
    assert_eq!(mono.depth(), 3 * 2 * 3);
    let g = build(&["g-ell", "--levels", "2"]);
    assert_eq!(g.eval(&[0.25]).unwrap(), 1.0);
    for target in [&["g"][..], &["relu1"], &["psi", "--levels", "2"], &["xy", "--levels", "3", "--bound", "2"]] {
        build(target);
    }
}

#[test]
fn build_from_files() {
    let dir = TempDir::new().unwrap();
    let poly = write(&dir, "p.json", r#"{"dim": 2, "terms": [{"exponents": [2, 1], "coeff": 1.0}, {"exponents": [1, 1], "coeff": 3.0}]}"#);
    let net = build(&["polynomial", "--coeffs", &poly, "--levels", "5"]);
    let (x, y) = (0.3, -0.7);
    assert!((net.eval(&[x, y]).unwrap() - (x * x * y + 3.0 * x * y)).abs() <= 2.0 * 4.0 * (-8.0f64).exp2());

    let values: Vec<String> = (0..9).map(|i| format!("{}", i as f64 / 8.0)).collect();
    let fem = write(&dir, "f.json", &format!(r#"{{"level": 0, "domain": [0, 1, 0, 1], "values": [{}]}}"#, values.join(",")));
    let net = build(&["fem", "--values", &fem]);
    assert_eq!(net.depth(), 2);
    // node (1, 1) of the 2x2 grid carries 4/8
    assert!((net.eval(&[0.5, 0.5]).unwrap() - 0.5).abs() < 1e-12);
    let random = build(&["fem", "--mesh-level", "2", "--seed", "3"]);
    assert_eq!(random.widths(), vec![4 * 25, 15 * 25]);
}

#[test]
fn bad_build_parameters_exit_2() {
    for args in [
        &["build", "x2"][..],
        &["build", "x2", "--levels", "0"],
        &["build", "xy", "--levels", "1"],
        &["build", "monomial", "--levels", "3"],
        &["build", "polynomial", "--levels", "3", "--coeffs", "/nonexistent.json"],
        &["build", "nonsense"],
        &["verify", "nonsense"],
        &["frobnicate"],
    ] {
        let out = hbnet(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!stderr(&out).is_empty());
    }
}

#[test]
fn eval_point_files() {
    let dir = TempDir::new().unwrap();
    let net = write(&dir, "hat.json", &stdout(&hbnet(&["build", "hat2d"])));
    let pts = write(&dir, "p.csv", "0.5,0.5\n# comment\n\n1.5,1.5\n");
    let out = hbnet(&["eval", &net, &pts]);
    assert_eq!(out.status.code(), Some(0));
    let csv = stdout(&out);
    assert_eq!(csv.lines().next(), Some("x0,x1,value"));
    let vals: Vec<f64> = rows(&csv).iter().map(|r| r[2].parse().unwrap()).collect();
    assert_eq!(vals, vec![1.0, 0.0]);

    let empty = write(&dir, "e.csv", "");
    assert_eq!(stdout(&hbnet(&["eval", &net, &empty])), "x0,x1,value\n");

    let bad = write(&dir, "b.csv", "0.1,0.2\n0.3,abc\n");
    let out = hbnet(&["eval", &net, &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    let short = write(&dir, "s.csv", "0.1\n");
    let out = hbnet(&["eval", &net, &short]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 1"));
}

#[test]
fn verify_x2_rows() {
    let out = hbnet(&["verify", "x2", "--max-level", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = stdout(&out);
    assert_eq!(csv.lines().next(), Some("claim_id,paper_anchor,theoretical,measured,witness,tolerance,pass,runtime_ms"));
    let rows = rows(&csv);
    assert_eq!(rows.len(), 8);
    for (l, r) in rows.iter().enumerate() {
        let measured: f64 = r[3].parse().unwrap();
        assert_eq!(measured, (-2.0 * (l as f64 + 1.0)).exp2());
        assert_eq!(r[6], "true");
    }
}

#[test]
fn verify_identity_and_convert_pass() {
    let out = hbnet(&["verify", "identity", "--max-level", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    for r in rows(&stdout(&out)) {
        assert!(r[3].parse::<f64>().unwrap() < 1e-12);
    }
    let out = hbnet(&["verify", "convert", "--seed", "1", "--trials", "20"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).lines().filter(|l| l.starts_with("convert.random")).count() == 60);
}

#[test]
fn failing_rows_give_exit_1() {
    let out = hbnet(&["verify", "hat2d"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("hat2d.unguarded"));
}

#[test]
fn verify_output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = hbnet(&["verify", "algebra", "--seed", "9", "--no-runtime", "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let seq = hbnet(&["--sequential", "verify", "algebra", "--seed", "9", "--no-runtime"]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(fs::read(&a).unwrap(), seq.stdout);
    assert!(!fs::read_to_string(&a).unwrap().contains('\r'));
}

#[test]
fn convert_adds_two_channels_per_input() {
    let dir = TempDir::new().unwrap();
    let x2 = write(&dir, "x2.json", &stdout(&hbnet(&["build", "x2", "--levels", "5"])));
    let out = hbnet(&["convert", &x2]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("+4"));
    let plain = from_document(&stdout(&out)).unwrap();
    assert_eq!(plain.kind(), NetworkKind::Mlp);
    assert_eq!(plain.widths().iter().max(), Some(&7));

    // re-verify the converted network: identical exact errors
    let f = extract_pwl(&plain, -1.0, 1.0).unwrap();
    let g = extract_pwl(&build_x2_hat(5).unwrap(), -1.0, 1.0).unwrap();
    let (a, b) = (sup_error_vs_quadratic(&f, -1.0, 1.0).unwrap(), sup_error_vs_quadratic(&g, -1.0, 1.0).unwrap());
    assert_eq!(a.value, b.value);
    assert_eq!(a.value, (-10.0f64).exp2());

    let xy = write(&dir, "xy.json", &stdout(&hbnet(&["build", "xy", "--levels", "3"])));
    let plain = from_document(&stdout(&hbnet(&["convert", &xy]))).unwrap();
    assert_eq!(plain.widths().iter().max(), Some(&9));

    let hat = write(&dir, "hat.json", &stdout(&hbnet(&["build", "hat2d"])));
    assert_eq!(hbnet(&["convert", &hat]).status.code(), Some(2));
}

#[test]
fn report_writes_tables() {
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().join("report");
    let out = hbnet(&["report", "--out", out_dir.to_str().unwrap(), "--samples", "1000"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let read = |f: &str| fs::read_to_string(Path::new(&out_dir).join(f)).unwrap();
    for f in ["x2_curve.csv", "xy_curve.csv", "monomial_curve.csv", "g_ell.csv", "psi.csv", "psi_norm.csv", "README.md"] {
        assert!(!read(f).is_empty(), "{f}");
    }
    let x2 = read("x2_curve.csv");
    let row: Vec<&str> = x2.lines().find(|l| l.starts_with("6,")).unwrap().split(',').collect();
    assert_eq!(row[1].parse::<f64>().unwrap(), (-12.0f64).exp2());
    let g = read("g_ell.csv");
    let row: Vec<f64> = g.lines().find(|l| l.starts_with("2.5000000000000000e-1,")).unwrap().split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(row[2], 1.0);

    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = hbnet(&["report", "--out", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
