use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn canonreg(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_canonreg")).args(args).current_dir(dir).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_centers(dir: &Path, d: usize) -> String {
    let names: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    let ones = vec!["1"; d];
    fs::write(dir.join("c.csv"), format!("{}\n{}\n", names.join(","), ones.join(","))).unwrap();
    "c.csv".into()
}

/// Writes `y = 2 + 3·a/b` sampled on a grid, with columns in the given order.
fn write_data(path: &Path, order: &[&str]) {
    let mut text = order.join(",") + "\n";
    for i in 0..5 {
        for j in 0..5 {
            let a = 0.8 + 0.1 * i as f64;
            let b = 0.9 + 0.05 * j as f64;
            let y = 2.0 + 3.0 * a / b;
            let row: Vec<String> = order
                .iter()
                .map(|c| match *c {
                    "a" => a.to_string(),
                    "b" => b.to_string(),
                    _ => y.to_string(),
                })
                .collect();
            text += &(row.join(",") + "\n");
        }
    }
    fs::write(path, text).unwrap();
}

const SMALL: &str = "population = 30\ngenerations = 8\nseed = 4\n";

#[test]
fn sample_factorial_sizes_and_ranges() {
    let dir = tempfile::tempdir().unwrap();
    let c = write_centers(dir.path(), 5);
    let o = canonreg(&["sample", "--centers", &c, "--dx", "0.1", "--out", "p.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("p.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 243);

    let spread = |dx: &str| {
        let o = canonreg(&["sample", "--centers", &c, "--dx", dx], dir.path());
        let vals: Vec<f64> = stdout(&o).lines().skip(1).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
        vals.iter().cloned().fold(f64::MIN, f64::max) - vals.iter().cloned().fold(f64::MAX, f64::min)
    };
    assert!(spread("0.03") < spread("0.1"));
}

#[test]
fn sample_over_budget_suggests_lhs() {
    let dir = tempfile::tempdir().unwrap();
    let c = write_centers(dir.path(), 13);
    let o = canonreg(&["sample", "--centers", &c, "--dx", "0.1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("lhs"));
    let o = canonreg(&["sample", "--centers", &c, "--dx", "0.1", "--mode", "lhs"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = canonreg(&["sample", "--centers", &c, "--dx", "0.1", "--mode", "lhs", "--n", "50"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 51);
}

#[test]
fn run_usage_and_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = canonreg(&["run", "--out", "o"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage"));

    write_data(&dir.path().join("t.csv"), &["a", "b", "y"]);
    fs::write(dir.path().join("bad.conf"), "populaton = 3\n").unwrap();
    let o = canonreg(&["run", "--train", "t.csv", "--out", "o", "--config", "bad.conf"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("populaton"));

    let o = canonreg(&["run", "--train", "missing.csv", "--out", "o"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("missing.csv"));

    fs::write(dir.path().join("nan.csv"), "a,y\n1,x\n").unwrap();
    let o = canonreg(&["run", "--train", "nan.csv", "--out", "o"], dir.path());
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn run_exports_deterministically_and_eval_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    write_data(&p.join("t.csv"), &["a", "b", "y"]);
    fs::write(p.join("small.conf"), SMALL).unwrap();
    let args = |out: &'static str| ["run", "--train", "t.csv", "--test", "t.csv", "--out", out, "--config", "small.conf"];
    let o = canonreg(&args("o1"), p);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("complexity"));
    assert_eq!(canonreg(&args("o2"), p).status.code(), Some(0));
    let f1 = fs::read_to_string(p.join("o1/front.csv")).unwrap();
    assert_eq!(f1, fs::read_to_string(p.join("o2/front.csv")).unwrap());

    // the last model is the most accurate; check its stored error
    let last = f1.lines().count() - 2;
    let stored: f64 = f1.lines().last().unwrap().split(',').nth(3).unwrap().parse().unwrap();
    let model = format!("o1/model_{last}.json");
    let o = canonreg(&["eval", "--model", &model, "--data", "t.csv"], p);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let printed: f64 = out.lines().next().unwrap().trim_start_matches("error_pct = ").parse().unwrap();
    assert!((printed - stored).abs() < 1e-10);

    // same data with shuffled columns predicts the same
    write_data(&p.join("s.csv"), &["y", "b", "a"]);
    let o2 = canonreg(&["eval", "--model", &model, "--data", "s.csv"], p);
    assert_eq!(stdout(&o2), out);

    // the constant model predicts its offset everywhere
    let o = canonreg(&["eval", "--model", "o1/model_0.json", "--data", "t.csv", "--out", "pred.csv"], p);
    assert_eq!(o.status.code(), Some(0));
    let preds: Vec<String> = fs::read_to_string(p.join("pred.csv")).unwrap().lines().skip(1).map(String::from).collect();
    assert_eq!(preds.len(), 25);
    assert!(preds.iter().all(|v| v == &preds[0]));

    // a variable the model needs is absent
    fs::write(p.join("m.csv"), "a,y\n1,2\n").unwrap();
    let o = canonreg(&["eval", "--model", &model, "--data", "m.csv"], p);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn bench_offset_like() {
    let dir = tempfile::tempdir().unwrap();
    let o = canonreg(&["bench", "--suite", "offset_like", "--seed", "1", "--generations", "3", "--population", "20"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("3 generations"));
    assert!(out.contains("PASS"));
    let constant_row = out.lines().nth(1).unwrap();
    let err: f64 = constant_row.split_whitespace().nth(3).unwrap().parse().unwrap();
    assert!(err < 1e-9);

    let o = canonreg(&["bench", "--suite", "nope"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}
