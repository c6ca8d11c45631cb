use std::process::{Command, Output};

fn convmax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_convmax")).args(args).output().expect("spawn convmax")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let o = convmax(&full);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn constant_reports_exact_values() {
    let v = json(&["constant", "--k", "4", "--d", "2"]);
    assert_eq!(v["schema"], "convmax.report/1");
    assert_eq!(v["data"]["value"]["exact"], "46656/390625");
    let o = convmax(&["constant", "--k", "3", "--sharpness"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("3/8"));
}

#[test]
fn solve_m1_recovers_closed_form() {
    let v = json(&["solve", "--k", "3", "--m", "1", "--mode", "intersection"]);
    assert_eq!(v["data"]["exact_value"]["exact"], "3/8");
    let v = json(&["solve", "--k", "2", "--m", "1", "--mode", "general", "--seed", "7", "--multistarts", "8"]);
    assert!((v["data"]["value"].as_f64().unwrap() - 4.0 / 9.0).abs() < 1e-9);
}

#[test]
fn grid_bracket_contains_solver_value() {
    let v = json(&["solve", "--k", "2", "--m", "2", "--mode", "diagonal", "--grid", "12"]);
    let upper = v["data"]["upper"]["decimal"].as_f64().unwrap();
    let lower = v["data"]["lower"]["decimal"].as_f64().unwrap();
    assert!(lower <= 0.2845 && 0.2844 <= upper, "[{lower}, {upper}]");
}

#[test]
fn continuous_csv_starts_with_exact_row() {
    let o = convmax(&["--format", "csv", "continuous", "--k", "2", "--m-max", "2", "--multistarts", "8"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("m,cbar,bound,converged\n1,4/9,16/9,true\n"));
}

#[test]
fn exit_codes() {
    assert_eq!(convmax(&["sidon", "verify", "--d", "2", "--k", "3"]).status.code(), Some(0));
    // the even-order bound has counterexamples in three dimensions
    assert_eq!(convmax(&["sidon", "verify", "--d", "3", "--k", "2"]).status.code(), Some(1));
    assert_eq!(convmax(&["solve", "--k", "0", "--m", "1"]).status.code(), Some(2));
    assert_eq!(convmax(&["pb", "--p", "1/3,2"]).status.code(), Some(2));
    assert_eq!(convmax(&["--format", "yaml", "constant", "--k", "3"]).status.code(), Some(2));
}

#[test]
fn pb_text_and_out_file() {
    let dir = std::env::temp_dir().join(format!("convmax-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("pb.json");
    let record = dir.join("run.json");
    let o = convmax(&[
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
        "--record",
        record.to_str().unwrap(),
        "pb",
        "--p",
        "1/3,1/3,1/3",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(v["kind"], "poisson_binomial");
    let r: serde_json::Value = serde_json::from_slice(&std::fs::read(&record).unwrap()).unwrap();
    assert_eq!(r["outputs"], v);
    std::fs::remove_dir_all(&dir).unwrap();
}
