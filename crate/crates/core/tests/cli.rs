use std::fs;
use std::process::{Command, Output};

fn qlearn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qlearn")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn delta_of_a_small_grid() {
    let o = qlearn(&["delta", "kind=regular", "dim=2", "points=4", "lo=-1", "hi=1"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let delta: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("delta"))
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!((delta - 2f64.sqrt() / 3.0).abs() < 1e-12, "{out}");
    assert!(out.contains("16"));
}

#[test]
fn bad_input_exits_two() {
    let o = qlearn(&["delta", "kind=regular", "dim=two"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("dim"));

    let o = qlearn(&["run", "/nonexistent/qlearn.toml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn incidence_prints_a_slope() {
    let o = qlearn(&["incidence", "2", "8,16,32", "--normals", "8"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 5, "{out}");
    assert!(out.lines().last().unwrap().starts_with("slope "));
}

#[test]
fn margin_of_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pair.txt");
    fs::write(&path, "+1 1:1\n-1 1:-1\n").unwrap();
    let o = qlearn(&["margin", path.to_str().unwrap()]);
    assert!(o.status.success());
    let out = stdout(&o);
    let line = out.lines().find(|l| l.starts_with("margin ")).unwrap();
    let gamma: f64 = line.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((gamma - 1.0).abs() < 1e-6);
}

#[test]
fn run_writes_csv_and_text() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("tiny.toml");
    fs::write(
        &config,
        r#"
name = "tiny"
seeds = [0, 1]

[dataset]
synthetic = { dim = 2, samples = 60, margin = 0.2, seed = 3 }
train = 40

[grid.regular]
ranges = [[-1.0, 1.0], [-2.0, 2.0]]
points = [3, 9]
"#,
    )
    .unwrap();
    let out_dir = dir.path().join("results");
    let o = Command::new(env!("CARGO_BIN_EXE_qlearn"))
        .args(["run", config.to_str().unwrap()])
        .env("QLEARN_OUTPUT_DIR", &out_dir)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out_dir.join("tiny.csv")).unwrap();
    // header plus one row per cell and seed
    assert_eq!(csv.lines().count(), 1 + 2 * 2 * 2, "{csv}");
    assert!(out_dir.join("tiny.txt").exists());
    assert!(stdout(&o).contains("[-2,2]"));
}

#[test]
fn validate_passes_quickly() {
    let o = qlearn(&["validate", "--instances", "2"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn shipped_configs_parse() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            qlearn::experiment::ExperimentConfig::from_file(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            seen += 1;
        }
    }
    assert!(seen >= 4);
}

#[test]
fn shipped_synthetic_configs_run() {
    let out_dir = tempfile::tempdir().unwrap();
    for name in ["synth01", "synth02_cluster", "frank_wolfe_log"] {
        let config = format!("{}/../../configs/{name}.toml", env!("CARGO_MANIFEST_DIR"));
        let o = Command::new(env!("CARGO_BIN_EXE_qlearn"))
            .args(["run", &config])
            .env("QLEARN_OUTPUT_DIR", out_dir.path())
            .output()
            .unwrap();
        assert!(o.status.success(), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(out_dir.path().join(format!("{name}.csv")).exists());
    }
}
