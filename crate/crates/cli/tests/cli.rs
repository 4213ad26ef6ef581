use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twocenter"))
        .args(args)
        .env("TWOCENTER_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const POINT: [&str; 8] = ["--m-plus", "1", "--m-minus", "0.5", "--delta", "1", "--f", "0.75"];

#[test]
fn classify_reports_dl() {
    let mut args = vec!["classify"];
    args.extend(POINT);
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["region"], "DL");
    assert_eq!(v["f_sing_minus"], 0.5);
    assert_eq!(v["f_sing_plus"], 1.0);
}

#[test]
fn physical_input_matches_normalized() {
    let o = run(&["classify", "--m-plus", "1", "--m-minus", "0.5", "--j0", "-0.25", "--f0-physical", "1.5"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["region"], "DL");
    assert_eq!(v["f0_hat"], 0.75);
}

#[test]
fn mixed_input_is_usage_error() {
    let mut args = vec!["classify", "--j0", "-1"];
    args.extend(POINT);
    assert_eq!(run(&args).status.code(), Some(2));
    assert_eq!(run(&["classify", "--m-plus", "1"]).status.code(), Some(2));
    assert_eq!(run(&["classify", "--m-plus", "1", "--m-minus", "0.5", "--delta", "1"]).status.code(), Some(2));
}

#[test]
fn domain_error_exit_code() {
    let o = run(&["rotation", "--m-plus", "1", "--m-minus", "0.5", "--delta", "1", "--f", "3"]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["classify", "--m-plus", "0.5", "--m-minus", "1", "--delta", "1", "--f", "0.3"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn scan_csv_contract() {
    let args = [
        "scan", "--m-plus", "1", "--m-minus", "0.5", "--delta", "1", "--f-min", "-0.4", "--f-max", "1.2", "--n", "200",
    ];
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0));
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("F0_hat,T_plus,T_minus,W,region,dW_sign"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 200);
    let first: Vec<&str> = rows[1].split(',').collect();
    assert_eq!(first.len(), 6);
    let mantissa = first[0].split('e').next().unwrap().trim_start_matches('-');
    assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
    assert!(!text.contains('\r'));
    for r in &rows {
        let cols: Vec<&str> = r.split(',').collect();
        match (cols[4], cols[5]) {
            ("DS", s) | ("DP", s) => assert!(s.is_empty() || s == "+", "{r}"),
            ("DL", s) => assert!(s.is_empty() || s == "-", "{r}"),
            _ => {}
        }
    }
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn lemma_suite_passes() {
    let o = run(&["verify", "lemma", "--samples", "10000", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o);
    assert!(line.starts_with("max_residual="));
    let v: f64 = line.split_whitespace().next().unwrap()["max_residual=".len()..].parse().unwrap();
    assert!(v < 1e-8);
    let again = run(&["verify", "lemma", "--samples", "10000", "--seed", "7"]);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn failing_verification_exits_one() {
    let o = run(&["verify", "lemma", "--samples", "50", "--seed", "1", "--tol", "1e-30"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("status=fail"));
}

#[test]
fn kepler_and_monotonicity_suites() {
    assert_eq!(run(&["verify", "kepler", "--n", "6"]).status.code(), Some(0));
    let o = run(&[
        "verify", "monotonicity", "--m-plus", "1", "--m-minus", "0.5", "--delta", "2", "--f-min", "-1.5", "--f-max", "3",
        "--n", "60",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn oracle_json() {
    let mut args = vec!["oracle", "--oscillations", "4", "--format", "json"];
    args.extend(POINT);
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["t_plus_rel_err"].as_f64().unwrap() < 1e-5);
    assert!(v["t_minus_rel_err"].as_f64().unwrap() < 1e-5);
}

#[test]
fn period_jacobi_agrees_with_default() {
    let mut a = vec!["period", "--which", "minus"];
    a.extend(POINT);
    let mut b = a.clone();
    b.extend(["--repr", "jacobi"]);
    let va: serde_json::Value = serde_json::from_str(&stdout(&run(&a))).unwrap();
    let vb: serde_json::Value = serde_json::from_str(&stdout(&run(&b))).unwrap();
    let (x, y) = (va["value"].as_f64().unwrap(), vb["value"].as_f64().unwrap());
    assert!(((x - y) / x).abs() < 1e-9);
}
