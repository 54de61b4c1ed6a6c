use std::f64::consts::PI;
use std::process::{Command, Output};

fn conc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Header and data rows of a CSV document, skipping `#` lines.
fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = rdr.headers().unwrap().iter().map(str::to_string).collect();
    let rows = rdr
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

fn first_value(args: &[&str]) -> f64 {
    let out = conc(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = csv_rows(&stdout(&out));
    rows[0][column(&header, "value")].parse().unwrap()
}

#[test]
fn cap_examples() {
    assert!((first_value(&["cap", "--n", "3", "--r", "1.0471975512"]) - 0.25).abs() < 1e-9);
    assert_eq!(first_value(&["cap", "--n", "5", "--r", "0"]), 0.0);
    assert!((first_value(&["cap", "--n", "2", "--a", "0.5"]) - (0.5 - 0.5 / PI)).abs() < 1e-14);
}

#[test]
fn cap_flags_the_failing_n2_bound() {
    let out = conc(&["cap", "--n", "2", "--a", "1.1"]);
    let (header, rows) = csv_rows(&stdout(&out));
    let (b, h) = (column(&header, "bound"), column(&header, "holds"));
    let half_exp = rows.iter().find(|r| r[b] == "half-exp").unwrap();
    assert_eq!(half_exp[h], "false");
}

#[test]
fn metadata_lines_lead_the_csv() {
    let text = stdout(&conc(&["mc", "--f", "coord", "--n", "2", "--samples", "10000"]));
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# tool: conc "));
    assert_eq!(lines[1], "# command: conc mc --f coord --n 2 --samples 10000");
    assert_eq!(lines[2], "# seed: 7");
    assert_eq!(lines[3], "t,p_hat,std_err,bound");
}

#[test]
fn json_wraps_metadata_and_payload() {
    let out = conc(&["--json", "cap", "--n", "3", "--a", "0.2"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["metadata"]["tool"], "conc");
    assert!(v["payload"]["rows"].as_array().is_some_and(|r| !r.is_empty()));
}

#[test]
fn verify_q2_reproduces_interval() {
    let out = conc(&["verify", "q2-fail"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("fail on [1.0585"));
}

#[test]
fn verify_mismatch_exits_1() {
    // with a loose tolerance the documented failure disappears
    let out = conc(&["--tol", "0.01", "verify", "q2-fail"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_product_threshold() {
    let out = conc(&["verify", "product", "--k", "2", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&out));
    let (name, value) = (column(&header, "name"), column(&header, "value"));
    let t: f64 = rows
        .iter()
        .find(|r| r[name].contains("admissible t"))
        .map(|r| r[value].parse().unwrap())
        .unwrap();
    assert!((t - 0.82437).abs() < 1e-3, "{t}");
}

#[test]
fn figure_headers() {
    for (which, header) in [
        ("1", "x,q2,q3,q4"),
        ("2", "a,F,G"),
        ("3", "u,log_lhs,log_rhs"),
        ("4", "a,tail,bound"),
    ] {
        let out = conc(&["fig", which]);
        assert_eq!(out.status.code(), Some(0));
        let text = stdout(&out);
        let (h, rows) = csv_rows(&text);
        assert_eq!(h.join(","), header);
        assert!(rows.len() > 100, "fig {which}");
    }
}

#[test]
fn fixed_seed_is_reproducible() {
    let args = ["mc", "--f", "coord", "--n", "10", "--samples", "100000", "--seed", "7"];
    let a = conc(&args);
    let b = conc(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = conc(&["mc", "--f", "coord", "--n", "10", "--samples", "100000", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn gaussian_coordinate_under_bound() {
    let out = conc(&["mc", "--gaussian", "--f", "coord", "--samples", "100000"]);
    let (header, rows) = csv_rows(&stdout(&out));
    for r in rows {
        let get = |c: &str| r[column(&header, c)].parse::<f64>().unwrap();
        assert!(get("p_hat") <= get("bound") + 3.0 * get("std_err"), "{r:?}");
    }
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["fig", "5"][..],
        &["verify", "nope"],
        &["cap", "--n", "1", "--a", "0.1"],
        &["cap", "--n", "3"],
        &["mc", "--f", "coord", "--samples", "10"],
        &["mc", "--f", "bogus"],
        &["frobnicate"],
    ] {
        assert_eq!(conc(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn unwritable_output_exits_1() {
    let out = conc(&["--out", "/nonexistent-dir/x.csv", "cap", "--n", "3", "--a", "0.1"]);
    assert_eq!(out.status.code(), Some(1));
}
