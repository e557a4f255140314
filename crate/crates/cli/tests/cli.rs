use std::path::Path;
use std::process::Command;

use grover_db::trace::TraceOp;
use grover_db::{FunctionTable, TwoRegisterState};
use grover_db_cli::{exit, run, trace_example_with, Format, TraceArgs};

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("grover-db").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn write_table(dir: &Path, name: &str, table: &FunctionTable) -> String {
    let path = dir.join(name);
    table.save(&path).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn search_paper_example() {
    let (code, out, _) = invoke(&["search", "--builtin", "paper-example", "--f0", "2"]);
    assert_eq!(code, exit::SUCCESS);
    assert_eq!(out.lines().next(), Some("I=1 F=2 verified"));
    assert!(out.contains("iterations=1"));
}

#[test]
fn search_formats() {
    let (code, out, _) = invoke(&["search", "--builtin", "paper-example", "--f0", "2", "--format", "csv"]);
    assert_eq!(code, 0);
    let rows = csv_rows(&out);
    assert_eq!(&rows[0][..4], ["1", "2", "true", "1"]);

    let (_, out, _) = invoke(&[
        "search", "--builtin", "paper-example", "--f0", "2", "--format", "json", "--samples", "50",
    ]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["measured_i"], 1);
    assert_eq!(v["success_probability"], 1.0);
    assert_eq!(v["samples"][0]["count"], 50);
}

#[test]
fn search_random_permutation_file() {
    let dir = tempfile::tempdir().unwrap();
    let lc = 6;
    let table = FunctionTable::random_permutation(lc, 31).unwrap();
    let path = write_table(dir.path(), "perm.txt", &table);
    let runs = 200;
    let mut verified = 0;
    for seed in 0..runs {
        let seed = seed.to_string();
        let (code, out, _) = invoke(&["search", "--table", &path, "--f0", "13", "--seed", &seed]);
        if code == exit::SUCCESS {
            assert!(out.starts_with(&format!("I={} F=13 verified", table.multiplicity(13).preimages[0])));
            verified += 1;
        } else {
            assert_eq!(code, exit::UNVERIFIED);
        }
    }
    assert!(verified as f64 / runs as f64 >= 1.0 - 0.5f64.powi(lc as i32));
}

#[test]
fn search_no_solution() {
    let dir = tempfile::tempdir().unwrap();
    let table = FunctionTable::from_values(2, 3, vec![0, 1, 2, 3]).unwrap();
    let path = write_table(dir.path(), "gap.txt", &table);
    let (code, out, err) = invoke(&["search", "--table", &path, "--f0", "7"]);
    assert_eq!(code, exit::NO_SOLUTION);
    assert!(out.is_empty());
    assert!(err.contains("g=0"), "{err}");

    let (code, out, _) = invoke(&["search", "--table", &path, "--f0", "7", "--oblivious"]);
    assert_eq!(code, exit::UNVERIFIED);
    assert!(out.contains("NOT verified"));
}

#[test]
fn validation_and_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "2 2\n0 3\n1 2\n3 0\n").unwrap();
    let (code, _, err) = invoke(&["search", "--table", bad.to_str().unwrap(), "--f0", "1"]);
    assert_eq!(code, exit::USAGE);
    assert!(err.contains("line 5") && err.contains("I=2"), "{err}");

    let (code, _, err) = invoke(&["search", "--builtin", "paper-example", "--f0", "4"]);
    assert_eq!(code, exit::USAGE);
    assert!(err.contains("--f0 4"));

    let (code, _, _) = invoke(&["search", "--f0", "1"]);
    assert_eq!(code, exit::USAGE);
    let (code, _, _) = invoke(&["search", "--builtin", "paper-example", "--control-bits", "3", "--f0", "1"]);
    assert_eq!(code, exit::USAGE);

    let (code, _, err) = invoke(&["search", "--table", "/nonexistent/table.txt", "--f0", "1"]);
    assert_eq!(code, exit::IO);
    assert!(!err.is_empty());
}

#[test]
fn trace_example_plain() {
    let (code, out, _) = invoke(&["trace-example"]);
    assert_eq!(code, exit::SUCCESS);
    assert_eq!(out.lines().last(), Some("final state Psi7 = -1|1>|2>"));
    for n in 0..8 {
        assert!(out.contains(&format!("Psi{n} = ")));
    }
    assert!(!out.contains("MISMATCH"));
}

#[test]
fn trace_example_json() {
    let (code, out, _) = invoke(&["trace-example", "--format", "json"]);
    assert_eq!(code, 0);
    let records: Vec<serde_json::Value> = serde_json::from_str(&out).unwrap();
    assert_eq!(records.len(), 8);
    for r in &records {
        assert_eq!(r["amplitudes"].as_array().unwrap().len(), 16);
        assert_eq!(r["matches"], true);
    }
    assert_eq!(records[7]["amplitudes"][6][0], -1.0);
}

#[test]
fn trace_example_reports_first_bad_step() {
    let table = FunctionTable::paper_example();
    let args = TraceArgs { format: Format::Plain, dump: None };
    let mut out = Vec::new();
    let code = trace_example_with(&args, &mut out, |op, state| {
        if op == TraceOp::PhaseTarget(2) {
            // Broken oracle: marks the wrong target value.
            return state.apply_phase_target(1);
        }
        op.apply(state, &table)
    })
    .unwrap();
    let out = String::from_utf8(out).unwrap();
    assert_eq!(code, exit::TRACE_MISMATCH);
    assert!(
        out.lines().last().unwrap().starts_with("MISMATCH: first divergence at Psi2 (S(t)_2)"),
        "{out}"
    );
}

#[test]
fn trace_example_dumps_states() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = invoke(&[
        "trace-example", "--format", "json", "--dump", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let records: Vec<serde_json::Value> = serde_json::from_str(&out).unwrap();
    for (n, r) in records.iter().enumerate() {
        let file = std::fs::File::open(dir.path().join(format!("psi{n}.txt"))).unwrap();
        let state = TwoRegisterState::read_dump(2, 2, std::io::BufReader::new(file)).unwrap();
        for (a, want) in state.amplitudes().iter().zip(r["amplitudes"].as_array().unwrap()) {
            assert_eq!(a.re, want[0].as_f64().unwrap());
            assert_eq!(a.im, want[1].as_f64().unwrap());
        }
    }
    let text = std::fs::read_to_string(dir.path().join("psi7.txt")).unwrap();
    assert_eq!(text.lines().nth(6), Some("6 -1.0 0.0"));
}

#[test]
fn sweep_two_qubit_revival() {
    let (code, out, _) = invoke(&["sweep", "--builtin", "paper-example", "--f0", "2", "--k-max", "3"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("iter,p_full_sim,p_analytic,abs_diff"));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 4);
    // beta = pi/6: sin^2((2k+1)pi/6) cycles 1/4, 1, 1/4, 1/4, 1, ...
    let expected = [0.25, 1.0, 0.25, 0.25];
    for (row, want) in rows.iter().zip(expected) {
        let p: f64 = row[1].parse().unwrap();
        let diff: f64 = row[3].parse().unwrap();
        assert!((p - want).abs() <= 1e-12, "{row:?}");
        assert!(diff <= 1e-10);
    }
}

#[test]
fn sweep_initial_row_is_multiplicity_fraction() {
    let dir = tempfile::tempdir().unwrap();
    let table = FunctionTable::with_multiplicity(5, 4, 3, 4, 1).unwrap();
    let path = write_table(dir.path(), "deg.txt", &table);
    let (code, out, _) = invoke(&["sweep", "--table", &path, "--f0", "3"]);
    assert_eq!(code, 0);
    let rows = csv_rows(&out);
    let p0: f64 = rows[0][1].parse().unwrap();
    assert!((p0 - 4.0 / 32.0).abs() <= 1e-15);
    // Default range is 0..=2N with N = 2 for g/2^lc = 1/8.
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r[3].parse::<f64>().unwrap() <= 1e-10));

    let values = (0..32).map(|i| if i % 8 == 0 { 3 } else { i % 3 }).collect();
    let table = FunctionTable::from_values(5, 4, values).unwrap();
    let path = write_table(dir.path(), "nosol.txt", &table);
    let (code, _, err) = invoke(&["sweep", "--table", &path, "--f0", "15"]);
    assert_eq!(code, exit::NO_SOLUTION);
    assert!(err.contains("g=0"));
}

#[test]
fn oracle_check_small_tables() {
    let (code, out, _) = invoke(&["oracle-check", "--builtin", "paper-example"]);
    assert_eq!(code, exit::SUCCESS);
    assert!(out.lines().last().unwrap().ends_with("ok"));

    for seed in 0..50 {
        let seed = seed.to_string();
        let (code, _, _) = invoke(&[
            "oracle-check", "--builtin", "random-function", "--control-bits", "3",
            "--target-bits", "3", "--seed", &seed, "--samples", "20",
        ]);
        assert_eq!(code, exit::SUCCESS);
    }
}

#[test]
fn oracle_check_size_cap() {
    let (code, _, err) = invoke(&[
        "oracle-check", "--builtin", "random-function", "--control-bits", "6", "--target-bits", "6",
    ]);
    assert_eq!(code, exit::RESOURCE);
    assert!(err.contains("cap"), "{err}");
}

#[test]
fn nmr_frequency_table() {
    let (code, out, _) = invoke(&["nmr-freqs", "--mu-b", "10", "--lambdas", "1,2"]);
    assert_eq!(code, 0);
    assert_eq!(out, "F,omega_res,min_gap\n0,7,2\n1,9,2\n2,11,2\n3,13,2\n");

    let (_, out, _) = invoke(&["nmr-freqs", "--mu-b", "10", "--lambdas", "1,1"]);
    let rows = csv_rows(&out);
    assert_eq!(rows[1], ["1", "10", "0"]);
    assert_eq!(rows[2], ["2", "10", "0"]);

    let (_, out, _) = invoke(&["nmr-freqs", "--mu-b", "0", "--lambdas", "3"]);
    assert_eq!(out, "F,omega_res,min_gap\n0,-3,6\n1,3,6\n");

    let (code, _, _) = invoke(&["nmr-freqs", "--target-bits", "3", "--lambdas", "1,2"]);
    assert_eq!(code, exit::USAGE);

    let (code, out, _) = invoke(&["nmr-freqs", "--target-bits", "10", "--format", "json"]);
    assert_eq!(code, 0);
    let entries: Vec<serde_json::Value> = serde_json::from_str(&out).unwrap();
    assert_eq!(entries.len(), 1024);
}

#[test]
fn identical_config_gives_identical_output() {
    let args = [
        "search", "--builtin", "random-permutation", "--control-bits", "7", "--f0", "9",
        "--seed", "5", "--samples", "300",
    ];
    assert_eq!(invoke(&args), invoke(&args));
    let sweep = ["sweep", "--builtin", "random-function", "--control-bits", "5", "--target-bits", "2", "--f0", "1", "--seed", "3"];
    assert_eq!(invoke(&sweep), invoke(&sweep));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_grover-db");
    let status = Command::new(bin)
        .args(["search", "--builtin", "paper-example", "--f0", "2"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&status.stdout).lines().next(), Some("I=1 F=2 verified"));

    let status = Command::new(bin).args(["trace-example"]).output().unwrap();
    assert_eq!(status.status.code(), Some(exit::SUCCESS));

    let status = Command::new(bin)
        .args(["oracle-check", "--builtin", "identity", "--control-bits", "6", "--target-bits", "6"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(exit::RESOURCE));
}
