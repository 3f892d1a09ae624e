use std::process::{Command, Output};

fn qalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qalg"))
        .args(args)
        .env_remove("QALG_DIGITS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn temp_file(name: &str, body: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("qalg-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn eval_singular_modulus_at_one() {
    let o = qalg(&["eval", "k", "--r", "1", "--digits", "40"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("0.707106781186547524400844362105"), "{out}");
    assert!(out.contains("shown to 30 significant digits"));
}

#[test]
fn eval_rrcf_json() {
    let o = qalg(&["--json", "eval", "rrcf", "--r", "4", "--digits", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["subject"], "rrcf");
    assert_eq!(v["params"]["r"], "4");
    assert_eq!(v["digits"], 50);
    // √((5+√5)/2) − (1+√5)/2
    assert!(v["value"]
        .as_str()
        .unwrap()
        .starts_with("0.2840790438404122960282"));
}

#[test]
fn decimal_parameters_are_usage_errors() {
    let o = qalg(&["eval", "k", "--r", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn domain_errors_exit_2() {
    let o = qalg(&["eval", "k", "--r=-1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn recognize_constant() {
    let o = qalg(&["recognize", "--expr", "const", "--value", "1.4142135623730950488016887242096980785696718753769480731766797379907324784621070388503875"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("x^2 - 2"), "{out}");
}

#[test]
fn verify_series_exact_passes() {
    let o = qalg(&["verify", "--suite", "series-exact", "--digits", "60"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("eq45.etaquotient.g225"));
}

#[test]
fn verify_json_is_a_suite_report() {
    let o = qalg(&[
        "--json",
        "verify",
        "--suite",
        "series-exact",
        "--digits",
        "60",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["suite"], "series-exact");
    assert_eq!(v["summary"]["fail"], 0);
    assert!(v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["verdict"] == "pass"));
}

#[test]
fn unknown_suite_is_rejected() {
    let o = qalg(&["verify", "--suite", "everything"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn analyze_reports_period_and_product() {
    // X = {1, 1, 0} repeating
    let coeffs: Vec<String> = (1..=24u64)
        .map(|n| {
            let x = |d: u64| if d.is_multiple_of(3) { 0 } else { 1 };
            let s: u64 = (1..=n).filter(|d| n % d == 0).map(|d| d * x(d)).sum();
            format!("\"{s}/{n}\"")
        })
        .collect();
    let path = temp_file(
        "t3.json",
        &format!("{{\"coeffs\": [{}]}}", coeffs.join(",")),
    );
    let o = qalg(&[
        "--json",
        "analyze",
        path.to_str().unwrap(),
        "--max-period",
        "6",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["periodicity"]["period"], 3);
    assert_eq!(v["representation"]["product"][0]["spec"]["p"], "3");
    assert_eq!(v["periodicity"]["A"], "-1/12");
}

#[test]
fn analyze_not_periodic_exits_4() {
    let coeffs: Vec<String> = (1..=20u64).map(|n| format!("\"{}\"", n * n)).collect();
    let path = temp_file(
        "np.json",
        &format!("{{\"coeffs\": [{}]}}", coeffs.join(",")),
    );
    let o = qalg(&["analyze", path.to_str().unwrap(), "--max-period", "6"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn json_to_file_keeps_text_on_stdout() {
    let path = std::env::temp_dir().join(format!("qalg-cli-{}-out.json", std::process::id()));
    let o = qalg(&[
        "--json",
        path.to_str().unwrap(),
        "eval",
        "k",
        "--r",
        "2",
        "--digits",
        "40",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("k = 0.41421356237"));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v["value"].as_str().unwrap().starts_with("0.41421356237"));
}
