use std::path::Path;
use std::process::{Command, Output};

fn tsuka(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsuka")).args(args).env_remove("TSUKA_CONFIG").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn assess_midpoint_is_rejected() {
    let o = tsuka(&["assess", "--income", "10500000", "--loan", "102500000", "--collateral", "155000000"]);
    assert_eq!(o.status.code(), Some(3));
    let text = stdout(&o);
    assert!(text.starts_with("score 50.00 REJECTED\nthreshold 60.00\n"), "{text}");
    // header plus eight rules
    assert_eq!(text.lines().count(), 2 + 1 + 8);
}

#[test]
fn assess_strong_applicant_is_accepted() {
    let o = tsuka(&["assess", "--income", "20000000", "--loan", "5000000", "--collateral", "300000000"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("score 100.00 ACCEPTED"));
}

#[test]
fn assess_reports_clamping() {
    let o = tsuka(&["assess", "--income", "50000000", "--loan", "5000000", "--collateral", "300000000"]);
    assert!(stdout(&o).contains("clamped to universe: penghasilan"), "{}", stdout(&o));
}

#[test]
fn assess_json() {
    let o = tsuka(&["assess", "--income", "3000000", "--loan", "40000000", "--collateral", "90000000", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["applicant_id"], "cli");
    assert_eq!(v["trace"]["firings"].as_array().unwrap().len(), 8);
    assert!(v["score"].as_f64().unwrap() < 60.0);
}

#[test]
fn usage_and_validation_errors_exit_2() {
    let o = tsuka(&["assess", "--income", "1", "--collateral", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--loan"));
    let o = tsuka(&["assess", "--income", "-5", "--loan", "1", "--collateral", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("income"), "{}", stderr(&o));
    let o = tsuka(&["assess", "--income", "1", "--loan", "1", "--collateral", "1", "--config", "/nonexistent.toml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn batch_clean_and_with_failures() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.csv");
    let out = dir.path().join("out.csv");
    std::fs::write(
        &input,
        "id,name,income,loan_amount,collateral_value\n\
         a,Ani,10500000,102500000,155000000\n\
         b,Bayu,20000000,5000000,300000000\n\
         c,Citra,1000000,200000000,10000000\n",
    )
    .unwrap();
    let args = ["batch", "--in", input.to_str().unwrap(), "--out", out.to_str().unwrap()];
    let o = tsuka(&args);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "3 rows: 3 ok, 0 failed");
    assert_eq!(
        std::fs::read_to_string(&out).unwrap(),
        "id,score,decision\na,50.000000,rejected\nb,100.000000,accepted\nc,0.000000,rejected\n"
    );

    std::fs::write(
        &input,
        "id,name,income,loan_amount,collateral_value\na,Ani,10500000,102500000,155000000\nb,Bayu,lots,5000000,300000000\n",
    )
    .unwrap();
    let o = tsuka(&args);
    assert_eq!(o.status.code(), Some(4));
    let text = stdout(&o);
    assert!(text.starts_with("2 rows: 1 ok, 1 failed\nrow 2: "), "{text}");
    assert!(text.contains("income"));
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 2);
}

#[test]
fn batch_rejects_bad_header() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.csv");
    std::fs::write(&input, "id,name,income,loan,collateral_value\n").unwrap();
    let out = dir.path().join("out.csv");
    let o = tsuka(&["batch", "--in", input.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn rules_check() {
    let o = tsuka(&["rules", "check"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "OK, 8 rules");

    let dir = tempfile::tempdir().unwrap();
    let rules = dir.path().join("loan.rules");
    std::fs::write(
        &rules,
        "# two rules\nIF penghasilan IS tinggi THEN kelayakan IS tinggi\n\
         IF penghasilan IS rendah AND pinjaman IS tinggi OR jaminan IS rendah THEN kelayakan IS rendah\n",
    )
    .unwrap();
    let o = tsuka(&["rules", "check", "--rules", rules.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("loan.rules:3:49: MixedConnective"), "{err}");
    assert!(err.contains('^'));

    std::fs::write(&rules, "# nothing here\n\n").unwrap();
    let o = tsuka(&["rules", "check", "--rules", rules.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));

    std::fs::write(&rules, "IF penghasilan IS tinggi THEN kelayakan IS tinggi\n").unwrap();
    let o = tsuka(&["rules", "check", "--rules", rules.to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "OK, 1 rules");
}

#[test]
fn plot_loan_terms() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pinjaman.csv");
    let o = tsuka(&["plot", "--variable", "pinjaman", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,rendah,tinggi"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|f| f.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 201);
    assert_eq!(rows[0][0], 5e6);
    assert_eq!(rows[200][0], 200e6);
    for w in rows.windows(2) {
        assert!(w[1][1] <= w[0][1]);
        assert!(w[1][2] >= w[0][2]);
    }
    for r in &rows {
        assert!((r[1] + r[2] - 1.0).abs() <= 1e-12);
    }

    let o = tsuka(&["plot", "--variable", "umur", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_env_var_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("strict.toml");
    let default = stdout(&tsuka(&["config", "default"]));
    std::fs::write(&path, default.replace("threshold = 60.0", "threshold = 45.0")).unwrap();

    let args = ["assess", "--income", "10500000", "--loan", "102500000", "--collateral", "155000000"];
    let o = Command::new(env!("CARGO_BIN_EXE_tsuka")).args(args).env("TSUKA_CONFIG", &path).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("score 50.00 ACCEPTED\nthreshold 45.00"));
}

#[test]
fn broken_config_reports_rule_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    let default = stdout(&tsuka(&["config", "default"]));
    std::fs::write(&path, default.replacen("pinjaman IS rendah", "pinjaman IS besar", 1)).unwrap();
    let o = tsuka(&["rules", "check", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("UnknownTerm"), "{err}");
    assert!(err.contains("besar"));
}

#[test]
fn shipped_default_matches_printed_default() {
    let shipped = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../config/default.toml");
    assert_eq!(std::fs::read_to_string(shipped).unwrap(), stdout(&tsuka(&["config", "default"])));
}
