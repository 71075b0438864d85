use std::process::{Command, Output};

fn vacca(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vacca"))
        .args(args)
        .env_remove("VACCA_PRECISION_BITS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn seq_delta_minus() {
    let o = vacca(&["seq", "--kind", "delta-minus", "--count", "8"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "1 0 2 -1 1 1 3 -2");
}

#[test]
fn seq_other_kinds() {
    let run = |kind: &str| stdout(&vacca(&["seq", "--kind", kind, "--count", "8"])).trim().to_string();
    assert_eq!(run("delta-plus"), "1 2 2 3 3 3 3 4");
    assert_eq!(run("floor-log2"), "0 1 1 2 2 2 2 3");
    assert_eq!(run("vacca-numerators"), "0 1 -1 2 -2 2 -2 3");
    let json = stdout(&vacca(&["seq", "--kind", "delta-minus", "--count", "4", "--format", "json"]));
    let values: Vec<i64> = serde_json::from_str(&json).unwrap();
    assert_eq!(values, vec![1, 0, 2, -1]);
}

#[test]
fn compute_exact_partial_sum() {
    let o = vacca(&["compute", "--constant", "gamma", "--method", "paired6", "--terms", "3", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("partial: 11/35"), "{text}");
    assert!(text.contains("partial decimal: 0.3142857142"), "{text}");
}

#[test]
fn compute_target_json() {
    let o = vacca(&[
        "compute", "--constant", "gamma", "--method", "theorem2", "--q", "10", "--target-error", "1e-8", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["value_prefix"].as_str().unwrap().starts_with("0.577215"));
    assert_eq!(v["series"], "theorem2");
    assert_eq!(v["q"], 10);
    let err: f64 = v["certified_error"].as_str().unwrap().parse().unwrap();
    assert!(err <= 1e-8);
}

#[test]
fn compute_ln4pi() {
    let o = vacca(&["compute", "--constant", "ln4pi", "--method", "paired6", "--target-error", "1e-3", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("ln4pi,paired6,minus,2,"));
    assert!(lines[1].contains(",0.24"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["compute", "--constant", "ln4pi", "--method", "addison"][..],
        &["compute", "--method", "paired6", "--q", "3"],
        &["compute", "--method", "paired6", "--terms", "3", "--target-error", "1e-3"],
        &["compute", "--method", "vacca", "--terms", "3"],
        &["compute", "--precision-bits", "8"],
        &["compute", "--frobnicate"],
        &["seq", "--kind", "delta-minus"],
        &["verify", "--suite", "lemma9"],
    ] {
        assert_eq!(vacca(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn unreachable_targets_exit_3() {
    let budget = vacca(&["compute", "--method", "addison", "--target-error", "1e-12", "--max-terms", "1000"]);
    assert_eq!(budget.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&budget.stderr).contains("budget-exhausted"));
    let precision = vacca(&["compute", "--method", "theorem2", "--target-error", "1e-25"]);
    assert_eq!(precision.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&precision.stderr).contains("precision-unreachable"));
}

#[test]
fn precision_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_vacca"))
        .args(["compute", "--method", "addison", "--terms", "10", "--format", "json"])
        .env("VACCA_PRECISION_BITS", "128")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["precision_bits"], 128);
}

#[test]
fn verify_quick_passes_and_fault_fails() {
    let ok = vacca(&["verify", "--suite", "all", "--quick"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("13/13 suites passed"));
    let bad = vacca(&["verify", "--suite", "averaged-identity", "--quick", "--fault", "4:0:1", "--format", "json"]);
    assert_eq!(bad.status.code(), Some(1));
    let reports: serde_json::Value = serde_json::from_str(&stdout(&bad)).unwrap();
    assert_eq!(reports[0]["passed"], false);
    assert_eq!(reports[0]["witnesses"][0]["case"]["q"], 4);
}

#[test]
fn bench_csv_and_json() {
    let csv = vacca(&["bench", "--method", "addison", "--checkpoints", "10,100", "--format", "csv"]);
    assert_eq!(csv.status.code(), Some(0));
    let text = stdout(&csv);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "series,sign,q,n_terms,value_prefix,certified_error,elapsed_ns");
    assert_eq!(lines.len(), 3);
    let json = vacca(&["bench", "--method", "theorem2", "--q", "3", "--checkpoints", "50", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert_eq!(v[0]["q"], 3);
}

#[test]
fn bench_writes_file() {
    let path = std::env::temp_dir().join(format!("vacca-bench-{}.csv", std::process::id()));
    let o = vacca(&["bench", "--method", "vacca", "--checkpoints", "9", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    // Nine terms are moved up to the pair-aligned cut at ten.
    assert!(text.lines().nth(1).unwrap().starts_with("vacca,plus,2,10,"));
}
