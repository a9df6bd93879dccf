use std::fs;
use std::process::{Command, Output};

fn conjugate(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_conjugate"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("CONJUGATE_THREADS", t),
        None => cmd.env_remove("CONJUGATE_THREADS"),
    };
    cmd.output().expect("spawn conjugate")
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        [
            "experiment",
            "k",
            "n",
            "N",
            "L",
            "l",
            "seed",
            "trials",
            "observed",
            "analytic",
            "abs_err",
            "wall_ms"
        ]
    );
    rdr.records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect()
}

#[test]
fn distance_rows_match_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.csv");
    let o = conjugate(
        &[
            "distance",
            "--k",
            "1..6",
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
        ],
        None,
    );
    assert!(o.status.success());
    let rows = csv_rows(&fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 6);
    for r in rows {
        assert_eq!(r[6], "7");
        assert!(r[10].parse::<f64>().unwrap() < 1e-9);
    }
}

#[test]
fn nosignal_marginal_distance_vanishes() {
    let o = conjugate(
        &["nosignal", "--trials", "100000", "--seed", "7", "--csv"],
        None,
    );
    assert!(o.status.success());
    let rows = csv_rows(&String::from_utf8(o.stdout).unwrap());
    let marginal = rows
        .iter()
        .find(|r| r[0] == "nosignal-marginal-distance")
        .unwrap();
    assert!(marginal[8].parse::<f64>().unwrap() < 1e-12);
}

#[test]
fn unicity_is_independent_of_thread_count() {
    let args = [
        "unicity", "--k", "2,4,6", "--N", "64", "--L", "8", "--runs", "100", "--seed", "7", "--csv",
    ];
    let one = conjugate(&args, Some("1"));
    let many = conjugate(&args, Some("4"));
    assert!(one.status.success() && many.status.success());
    assert_eq!(one.stdout, many.stdout);
    let rows = csv_rows(&String::from_utf8(one.stdout).unwrap());
    assert_eq!(rows.len(), 15);
    for r in &rows {
        if r[0].ends_with("-qubits") || r[0] == "unicity-ratio" {
            assert_eq!(r[10], "0.0", "{r:?}");
        }
        if r[0].ends_with("-success") {
            assert!(r[8].parse::<f64>().unwrap() >= 0.99);
        }
    }
}

#[test]
fn json_and_csv_together() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = conjugate(
        &[
            "sigma-distance",
            "--k",
            "1..3",
            "--csv",
            "--json",
            "--out",
            out.to_str().unwrap(),
        ],
        None,
    );
    assert!(o.status.success());
    assert_eq!(csv_rows(&fs::read_to_string(&out).unwrap()).len(), 3);
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.with_extension("json")).unwrap()).unwrap();
    assert_eq!(v["records"].as_array().unwrap().len(), 3);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = [
        "breidbart",
        "--k",
        "1..3",
        "--trials",
        "20000",
        "--seed",
        "3",
        "--json",
    ];
    assert_eq!(
        conjugate(&args, None).stdout,
        conjugate(&args, Some("2")).stdout
    );
}

#[test]
fn bad_input_exits_nonzero_with_diagnostic() {
    for args in [
        &["distance", "--bogus"][..],
        &["distance", "--k", "3..1"],
        &["distance", "--k", "9"],
        &["unicity", "--N", "10", "--L", "8"],
        &["distance", "--out", "/nonexistent-dir/x.csv"],
    ] {
        let o = conjugate(args, None);
        assert!(!o.status.success(), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    let o = conjugate(&["complexity"], Some("0"));
    assert!(!o.status.success());
}
