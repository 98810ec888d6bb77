use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meanking"))
        .args(args)
        .env_remove("MEANKING_TOL")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

#[test]
fn field_info_prints_mod_two_tables() {
    let o = run(&["field", "info", "--p", "2", "--m", "1"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "a,b,sum,product,neg_a,inv_a");
    assert_eq!(
        &rows[1..],
        ["0,0,0,0,0,", "0,1,1,0,0,", "1,0,1,0,1,1", "1,1,0,1,1,1"]
    );
}

#[test]
fn field_info_json_carries_version_and_polynomial() {
    let v = json(&run(&["field", "info", "--p", "3", "--m", "2", "--json"]));
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["irreducible"], serde_json::json!([1, 0, 1]));
    // (1 + x)² = 2x
    assert_eq!(v["mul"][4][4], 6);
}

#[test]
fn king_exhaustive_qubit_succeeds() {
    let o = run(&["king", "run", "--dim", "2", "--exhaustive", "--json"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["success_rate"], 1.0);
    assert_eq!(v["report"]["mode"], "exhaustive");
    assert_eq!(v["report"]["trials"], 12);
}

#[test]
fn king_monte_carlo_is_byte_identical() {
    let args = [
        "king", "run", "--dim", "4", "--trials", "2000", "--seed", "42", "--json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["report"]["successes"], 2000);
}

#[test]
fn inadmissible_dimension_is_usage_error() {
    for args in [
        &["king", "run", "--dim", "6"][..],
        &["mub", "--dim", "32"],
        &["verify", "--dim", "23", "--mode", "modular"],
        &["mub", "--dim", "10", "--mode", "modular"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn bell_map_rejects_computational_basis() {
    assert_eq!(
        run(&["bell", "map", "--dim", "3", "--k", "0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn bell_map_qubit_x() {
    let v = json(&run(&["bell", "map", "--dim", "2", "--k", "1", "--json"]));
    let last = &v["map"][3];
    assert_eq!(
        (last["m_prime"].as_u64(), last["n_prime"].as_u64()),
        (Some(1), Some(1))
    );
    assert_eq!(last["phase"], serde_json::json!([-1.0, 0.0]));
}

#[test]
fn verify_all_passes_for_four() {
    let o = run(&["verify", "--suite", "all", "--dim", "4"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("all checks passed"));
}

#[test]
fn verify_names_first_failing_property() {
    let o = run(&["verify", "pauli", "--dim", "3", "--tol", "1e-300"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("invariant failed: pauli"), "{err}");
}

#[test]
fn tolerance_from_environment_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_meanking"))
        .args(["mub", "--dim", "3"])
        .env("MEANKING_TOL", "-1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn mub_csv_lists_all_pairs() {
    let o = run(&["mub", "--dim", "3", "--csv"]);
    assert!(o.status.success());
    let rows = stdout(&o).lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, 1 + 6);
}

#[test]
fn modular_fifteen_mub_is_a_report() {
    let o = run(&["mub", "--dim", "15", "--mode", "modular", "--json"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["total_pairs"], 120);
    assert_eq!(v["conjecture_bound"], 4);
}

#[test]
fn pauli_dump_single_class() {
    let v = json(&run(&[
        "pauli", "dump", "--dim", "2", "--class", "2", "--json",
    ]));
    let class = &v["classes"][0];
    assert_eq!(class["class"], 2);
    assert_eq!(class["phases"][1], serde_json::json!([0.0, 1.0]));
}

#[test]
fn wigner_grid_of_ground_state() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("rho.json");
    std::fs::write(&state, "[[[1,0],[0,0]],[[0,0],[0,0]]]").unwrap();
    let out = dir.path().join("w.json");
    let o = run(&[
        "wigner",
        "--dim",
        "2",
        "--state",
        state.to_str().unwrap(),
        "--weyl",
        "--json",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    let w = |a: usize, b: usize| v["wigner"][a][b].as_f64().unwrap();
    // line sums are N⟨e|ρ|e⟩
    assert!((w(0, 0) + w(0, 1) - 2.0).abs() < 1e-12);
    assert!((w(1, 0) + w(1, 1)).abs() < 1e-12);
    assert_eq!(v["weyl"][0][0], serde_json::json!([1.0, 0.0]));
    assert!(v["marginals"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == true));
}

#[test]
fn wigner_rejects_non_hermitian_state() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("bad.json");
    std::fs::write(&state, "[[[1,0],[1,0]],[[0,0],[0,0]]]").unwrap();
    let o = run(&["wigner", "--dim", "2", "--state", state.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
