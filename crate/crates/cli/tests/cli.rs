use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bellforge")).args(args).current_dir(root()).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn field(text: &str, key: &str) -> String {
    text.lines().find_map(|l| l.strip_prefix(key)).unwrap_or_else(|| panic!("no {key} in {text}")).trim().to_string()
}

#[test]
fn count_params() {
    assert_eq!(stdout(&["count-params", "3", "1", "1"]).trim(), "23");
    assert_eq!(stdout(&["count-params", "2", "1", "1"]).trim(), "16");
    assert!(!run(&["count-params", "2", "2", "1"]).status.success());
}

#[test]
fn evaluate_empty_setup() {
    let out = scratch("empty");
    let text = stdout(&["evaluate", "configs/empty_setup.json", "--out", out.to_str().unwrap()]);
    assert_eq!(field(&text, "beta").parse::<f64>().unwrap(), 2.0);
    assert_eq!(field(&text, "branch"), "NoClick");
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("evaluation.json")).unwrap()).unwrap();
    assert_eq!(json["result"]["beta"], 2.0);
    assert_eq!(text.lines().filter(|l| l.starts_with("x=")).count(), 4);
}

#[test]
fn evaluate_heralded_setup() {
    let args = ["evaluate", "configs/fig2d_setup.json", "configs/fig2d_params.json"];
    let text = stdout(&args);
    let beta: f64 = field(&text, "beta").parse().unwrap();
    assert!(beta > 2.25, "{text}");
    assert_eq!(field(&text, "branch"), "Click");
    assert!(field(&text, "p_herald").parse::<f64>().unwrap() >= 1e-4);

    let text = stdout(&[&args[..], &["--eta", "0"]].concat());
    assert_eq!(field(&text, "beta").parse::<f64>().unwrap(), 2.0);
}

#[test]
fn evaluate_rejects_bad_input() {
    assert!(!run(&["evaluate", "configs/fig2d_setup.json", "configs/fig2d_params.json", "--modes", "2"])
        .status
        .success());
    assert!(!run(&["evaluate", "configs/fig2a_setup.json", "configs/fig2d_params.json", "--modes", "2"])
        .status
        .success());
    assert!(!run(&["evaluate", "configs/missing.json"]).status.success());
    assert!(!run(&["evaluate", "configs/empty_setup.json", "--eta", "1.5"]).status.success());
}

#[test]
fn decompose_identity_gives_zero_angles() {
    let out = scratch("identity");
    let text = stdout(&["decompose", "identity", "-n", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(field(&text, "beam splitters"), "6");
    let plan: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("plan.json")).unwrap()).unwrap();
    assert!(plan["entries"].as_array().unwrap().iter().all(|e| e["value"].as_f64().unwrap() == 0.0));
    let setup = std::fs::read_to_string(out.join("setup.json")).unwrap();
    assert!(setup.contains("\"BS\""));
}

#[test]
fn decompose_file_and_random() {
    let out = scratch("file");
    std::fs::create_dir_all(&out).unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let path = out.join("u.json");
    std::fs::write(&path, format!(r#"{{"f": [[[{s}, 0], [{s}, 0]], [[{s}, 0], [-{s}, 0]]]}}"#)).unwrap();
    let text = stdout(&["decompose", "file", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(field(&text, "recompose error").parse::<f64>().unwrap() < 1e-12);

    std::fs::write(&path, r#"{"f": [[[2, 0]]]}"#).unwrap();
    assert!(!run(&["decompose", "file", path.to_str().unwrap(), "--out", out.to_str().unwrap()]).status.success());

    let squeezed = scratch("random");
    let text = stdout(&["decompose", "random", "-n", "3", "--squeeze", "0.8", "--out", squeezed.to_str().unwrap()]);
    assert!(field(&text, "recompose error").parse::<f64>().unwrap() < 1e-8);
    assert_eq!(field(&text, "squeezers"), "3");
    // The written setup is a runnable experiment file.
    stdout(&[
        "evaluate",
        squeezed.join("setup.json").to_str().unwrap(),
        squeezed.join("params.json").to_str().unwrap(),
    ]);
}

#[test]
fn learn_and_optimize_write_outputs() {
    let out = scratch("learn");
    stdout(&[
        "learn",
        "--config",
        "configs/restricted.toml",
        "--trials",
        "3",
        "--replicas",
        "1",
        "--d-verify",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    for f in ["learning_curve.csv", "trials.jsonl", "memory.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let out = scratch("fixed");
    let text = stdout(&[
        "optimize-fixed",
        "configs/empty_setup.json",
        "--trials",
        "3",
        "--replicas",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(text.lines().count(), 2);
    let curve = std::fs::read_to_string(out.join("replica_01/learning_curve.csv")).unwrap();
    let rewards: Vec<&str> = curve.lines().skip(1).map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(rewards, ["1", "0", "0"]);
}

#[test]
fn sweep_writes_table() {
    let out = scratch("sweep");
    let text = stdout(&[
        "sweep-eta",
        "configs/fig2a_setup.json",
        "--config",
        "configs/fig2a.toml",
        "--grid",
        "1,0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(text.lines().next(), Some("eta,beta"));
    assert_eq!(text.lines().last(), Some("0,2"));
    assert!(out.join("sweep.csv").exists());
}
