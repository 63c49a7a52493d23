use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn nlg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlg"))
        .args(args)
        .env_remove("NLG_TABLE_BUDGET")
        .output()
        .unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn classical_value_of_chsh() {
    let o = nlg(&[
        "value",
        "classical",
        "--game",
        &data("chsh.json"),
        "--plain",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8(o.stdout).unwrap().trim(), "0.75");
    let o = nlg(&["value", "classical", "--game", &data("chsh.json")]);
    let v = json(&o);
    assert_eq!(v["result"]["value"], 0.75);
    assert_eq!(v["seed"], 0);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn reports_are_byte_identical() {
    let args = [
        "simulate",
        "threshold",
        "--game",
        &data("chsh.json"),
        "--strategy",
        &data("chsh_strategy.json"),
        "--n",
        "40",
        "--threshold",
        "0.8",
        "--trials",
        "2000",
        "--seed",
        "3",
    ];
    let a = nlg(&args);
    let b = nlg(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["seed"], 3);
    assert_eq!(v["inputs"]["noise"], 0.0);
    let p = v["result"]["p_round"].as_f64().unwrap();
    assert!((p - (2.0 + 2f64.sqrt()) / 4.0).abs() < 1e-12);
}

#[test]
fn certify_gate_failure_exit_code() {
    let o = nlg(&[
        "certify",
        "--delta",
        "0.103553",
        "--nu",
        "0",
        "--answer-pairs",
        "4",
        "--n",
        "1",
        "--kappa",
        "0.9",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let v = json(&o);
    let failures = v["result"]["failures"].as_array().unwrap();
    assert_eq!(failures[0]["code"], "n_below_inverse_c1");
    assert!(failures[0]["message"]
        .as_str()
        .unwrap()
        .starts_with("n below 1/c1"));
    assert!(v["result"]["ef_lower_bound_bits"].is_null());

    let o = nlg(&[
        "certify",
        "--delta",
        "0.103553",
        "--nu",
        "0",
        "--answer-pairs",
        "4",
        "--n",
        "1e8",
        "--kappa",
        "0.9",
    ]);
    assert_eq!(o.status.code(), Some(2), "n must be an integer");
    let o = nlg(&[
        "certify",
        "--delta",
        "0.103553",
        "--nu",
        "0",
        "--answer-pairs",
        "4",
        "--n",
        "100000000",
        "--kappa",
        "0.9",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(json(&o)["result"]["ef_lower_bound_bits"].as_f64().unwrap() > 0.0);
    let o = nlg(&[
        "certify",
        "--delta",
        "0.1",
        "--nu",
        "0.2",
        "--answer-pairs",
        "4",
        "--n",
        "100",
        "--kappa",
        "0.9",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn validation_and_budget_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(
        nlg(&["value", "classical", "--game", bad.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        nlg(&["value", "classical", "--game", "/nonexistent.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        nlg(&["value", "classical", "--bogus"]).status.code(),
        Some(2)
    );
    let o = Command::new(env!("CARGO_BIN_EXE_nlg"))
        .args(["value", "classical", "--game", &data("chsh.json")])
        .env("NLG_TABLE_BUDGET", "8")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));
    let o = Command::new(env!("CARGO_BIN_EXE_nlg"))
        .args(["value", "classical", "--game", &data("chsh.json")])
        .env("NLG_TABLE_BUDGET", "lots")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = nlg(&[
        "ledger",
        "prop32",
        "--epsilon",
        "0.25",
        "--gamma",
        "0.1",
        "--n",
        "1000000",
        "--kappa",
        "0.5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["command"], "ledger prop32");
    assert_eq!(
        std::fs::read_dir(dir.path()).unwrap().count(),
        1,
        "no temp files left behind"
    );
}

#[test]
fn sweep_csv_columns() {
    let o = nlg(&[
        "simulate",
        "sweep",
        "--game",
        &data("chsh.json"),
        "--strategy",
        &data("chsh_strategy.json"),
        "--n-min",
        "20",
        "--n-max",
        "100",
        "--n-step",
        "40",
        "--threshold",
        "0.8",
        "--trials",
        "500",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(
        header,
        nlg_cli::sweep::CSV_HEADER.split(',').collect::<Vec<_>>()
    );
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    for r in &rows {
        let exact: f64 = r[col("exact_tail")].parse().unwrap();
        let hoeff: f64 = r[col("hoeffding_bound")].parse().unwrap();
        assert!(hoeff <= exact + 1e-12);
    }
    let empty = nlg(&[
        "simulate",
        "sweep",
        "--game",
        &data("chsh.json"),
        "--strategy",
        &data("chsh_strategy.json"),
        "--n-min",
        "9",
        "--n-max",
        "3",
        "--threshold",
        "0.8",
        "--trials",
        "5",
    ]);
    assert_eq!(empty.status.code(), Some(2));
}

#[test]
fn correlated_sampling_report() {
    let o = nlg(&[
        "sample",
        "correlated",
        "--p",
        &data("p.json"),
        "--q",
        &data("q.json"),
        "--trials",
        "20000",
        "--seed",
        "7",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["result"]["within_bound"], true);
    assert!((v["result"]["stats"]["tv"].as_f64().unwrap() - 0.1).abs() < 1e-12);
}

#[test]
fn seesaw_strategy_round_trip_and_iid_audit() {
    let dir = tempfile::tempdir().unwrap();
    let strat = dir.path().join("s.json");
    let o = nlg(&[
        "value",
        "quantum-seesaw",
        "--game",
        &data("chsh.json"),
        "--restarts",
        "3",
        "--seed",
        "1",
        "--save-strategy",
        strat.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let seesaw = json(&o)["result"]["value"].as_f64().unwrap();
    let o = nlg(&[
        "simulate",
        "threshold",
        "--game",
        &data("chsh.json"),
        "--strategy",
        strat.to_str().unwrap(),
        "--n",
        "5",
        "--threshold",
        "0.6",
        "--exact",
    ]);
    let p = json(&o)["result"]["p_round"].as_f64().unwrap();
    assert!((p - seesaw).abs() < 1e-9);

    let o = nlg(&[
        "audit",
        "lemmas",
        "--game",
        &data("chsh.json"),
        "--strategy",
        &data("chsh_strategy.json"),
        "--n",
        "2",
        "--s",
        "1",
        "--tau",
        "0.5",
        "--beta",
        "0.5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["inputs"]["strategy_mode"], "iid");
    assert!((v["inputs"]["entanglement_bits"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert_eq!(v["result"]["all_satisfied"], true);
}

#[test]
fn protocol_audit_on_joint_strategy() {
    let o = nlg(&[
        "audit",
        "protocol",
        "--game",
        &data("chsh.json"),
        "--strategy",
        &data("epr3_strategy.json"),
        "--n",
        "3",
        "--s",
        "2",
        "--tau",
        "0.17",
        "--beta",
        "0.0001",
        "--trials",
        "200",
        "--seed",
        "4",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v = json(&o);
    assert_eq!(v["inputs"]["strategy_mode"], "joint");
    assert_eq!(v["result"]["exact"]["tv_within_accrued"], true);
    assert_eq!(v["result"]["sampled"]["trials"], 200);
    let o = nlg(&[
        "audit",
        "protocol",
        "--game",
        &data("chsh.json"),
        "--strategy",
        &data("epr3_strategy.json"),
        "--n",
        "2",
        "--s",
        "1",
        "--tau",
        "0.17",
        "--beta",
        "0.0001",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn audit_reports_are_byte_identical() {
    let args = [
        "audit",
        "lemmas",
        "--game",
        &data("chsh.json"),
        "--strategy",
        &data("epr3_strategy.json"),
        "--n",
        "3",
        "--s",
        "2",
        "--tau",
        "0.17",
        "--beta",
        "0.5",
    ];
    let a = nlg(&args);
    assert_eq!(a.status.code(), Some(0));
    for _ in 0..3 {
        assert_eq!(nlg(&args).stdout, a.stdout);
    }
}
