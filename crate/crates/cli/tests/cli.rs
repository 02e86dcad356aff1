use std::path::Path;
use std::process::{Command, Output};

use ptm_core::channel::{ChannelRep, KrausPair};
use ptm_core::instance::{gen_superop, InstanceKind};
use ptm_core::io::{
    read_bundle, read_bundle_file, read_timings, write_bundle_file, BundleKind, RepBundle,
};
use ptm_core::matrix::{DenseMatrix, ONE};
use ptm_core::oracle::ptm_direct;
use ptm_core::pauli_matrix;

fn ptm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptm"))
        .args(args)
        .output()
        .expect("failed to launch ptm")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn convert(from: &str, rep: &ChannelRep, dir: &Path) -> DenseMatrix {
    let input = dir.join(format!("{from}.json"));
    let output = dir.join("out.json");
    write_bundle_file(&input, &RepBundle::from_rep(rep)).unwrap();
    let out = ptm(&[
        "convert",
        "--from",
        from,
        "--to",
        "ptm",
        "--input",
        input.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let bundle = read_bundle_file(&output).unwrap();
    assert_eq!(bundle.kind, BundleKind::Ptm);
    bundle.to_rep().unwrap().matrix().unwrap().clone()
}

#[test]
fn convert_unit_chi_gives_identity() {
    let dir = tempfile::tempdir().unwrap();
    let mut chi = DenseMatrix::zeros(16, 16);
    chi[(0, 0)] = ONE;
    let got = convert("chi", &ChannelRep::chi(chi).unwrap(), dir.path());
    assert_eq!(got, DenseMatrix::identity(16));
}

#[test]
fn convert_x_conjugation() {
    let dir = tempfile::tempdir().unwrap();
    let x = pauli_matrix(1).unwrap();
    let rep = ChannelRep::kraus(vec![KrausPair::new(x.clone(), x)]).unwrap();
    let got = convert("kraus", &rep, dir.path());
    assert_eq!(got, DenseMatrix::diagonal(&[ONE, ONE, -ONE, -ONE]));
}

#[test]
fn convert_random_can_matches_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let rep = ChannelRep::can(gen_superop(InstanceKind::Dense, 2, 12)).unwrap();
    let got = convert("can", &rep, dir.path());
    assert!(got.max_abs_diff(&ptm_direct(&rep).unwrap()) < 1e-10);
}

#[test]
fn convert_rejects_mismatched_kind() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("can.json");
    let rep = ChannelRep::can(gen_superop(InstanceKind::Dense, 1, 1)).unwrap();
    write_bundle_file(&input, &RepBundle::from_rep(&rep)).unwrap();
    let out = ptm(&[
        "convert",
        "--from",
        "choi",
        "--input",
        input.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("`can`"), "{}", stderr(&out));
}

#[test]
fn convert_reports_parse_errors() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.json");
    std::fs::write(&input, "{\"kind\":\"chi\",\"qubits\":1,\"data\":[]}").unwrap();
    let out = ptm(&[
        "convert",
        "--from",
        "chi",
        "--input",
        input.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("error"));
}

#[test]
fn bench_writes_one_record_per_size() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let out = ptm(&[
        "bench",
        "--algorithms",
        "l-ptm",
        "--qubits",
        "1..4",
        "--kind",
        "dense",
        "--reps",
        "5",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let from_stdout = read_timings(&stdout(&out)).unwrap();
    let from_file = read_timings(&std::fs::read_to_string(&csv).unwrap()).unwrap();
    assert_eq!(from_stdout, from_file);
    assert_eq!(from_file.len(), 4);
    for (i, r) in from_file.iter().enumerate() {
        assert_eq!(
            (r.algorithm.as_str(), r.n, r.repetitions),
            ("l-ptm", i + 1, 5)
        );
        assert!(r.mean_seconds > 0.0);
    }
}

#[test]
fn bench_refuses_sizes_over_budget() {
    let out = ptm(&[
        "bench",
        "--algorithms",
        "l-ptm",
        "--qubits",
        "7",
        "--memory-budget-mib",
        "64",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("budget"), "{}", stderr(&out));
}

#[test]
fn bench_rejects_unknown_algorithm() {
    let out = ptm(&["bench", "--algorithms", "x-ptm"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tables_print_bundles() {
    for (which, count) in [
        ("left", 4),
        ("right", 4),
        ("comm", 4),
        ("acomm", 4),
        ("sandwich", 16),
    ] {
        let out = ptm(&["tables", "--which", which]);
        assert!(out.status.success());
        let bundles: Vec<RepBundle> = stdout(&out)
            .lines()
            .map(|l| read_bundle(l).unwrap())
            .collect();
        assert_eq!(bundles.len(), count, "{which}");
        assert!(bundles
            .iter()
            .all(|b| b.kind == BundleKind::Ptm && b.qubits == 1));
    }
    let left = ptm(&["tables", "--which", "left"]);
    let first = read_bundle(stdout(&left).lines().next().unwrap()).unwrap();
    assert_eq!(
        first.to_rep().unwrap().matrix().unwrap(),
        &DenseMatrix::identity(4)
    );
}

#[test]
fn tables_bad_selector_is_a_usage_error() {
    let out = ptm(&["tables", "--which", "upward"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("possible values"));
}

#[test]
fn verify_passes_by_default() {
    let out = ptm(&["verify"]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert_eq!(stdout(&out).lines().count(), 18);
}

#[test]
fn verify_names_the_failing_check() {
    let out = ptm(&["verify", "--qubits", "1", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("l-ptm n=1 max_abs_dev"));
    assert!(
        stderr(&out).contains("failing checks: l-ptm n=1"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn verify_is_deterministic() {
    let args = ["verify", "--qubits", "3", "--seed", "9", "--count", "2"];
    let (a, b) = (ptm(&args), ptm(&args));
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn verify_refuses_large_sizes() {
    let out = ptm(&["verify", "--qubits", "1..4"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn gen_diagonal_instance() {
    let out = ptm(&["gen", "--kind", "diagonal", "--qubits", "2", "--seed", "5"]);
    assert!(out.status.success());
    let b = read_bundle(&stdout(&out)).unwrap();
    assert_eq!(b.kind, BundleKind::Matrix);
    let m = b.as_matrix().unwrap();
    assert!(ptm_core::instance::is_diagonal(m));
    assert_eq!(
        m,
        &ptm_core::instance::gen_instance(InstanceKind::Diagonal, 2, 5)
    );
    assert_eq!(
        stdout(&out),
        stdout(&ptm(&[
            "gen", "--kind", "diagonal", "--qubits", "2", "--seed", "5"
        ]))
    );
}

#[test]
fn gen_feeds_convert() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k.json");
    let out = ptm(&[
        "gen",
        "--qubits",
        "2",
        "--rep",
        "kraus",
        "--kraus-count",
        "3",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let rep = read_bundle_file(&path).unwrap().to_rep().unwrap();
    let out = ptm(&[
        "convert",
        "--from",
        "kraus",
        "--input",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let got = read_bundle(&stdout(&out)).unwrap();
    assert!(
        got.to_rep()
            .unwrap()
            .matrix()
            .unwrap()
            .max_abs_diff(&ptm_direct(&rep).unwrap())
            < 1e-10
    );
}
