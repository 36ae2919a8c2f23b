use std::fs;
use std::process::{Command, Output};

fn pcefold(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcefold"))
        .args(args)
        .env_remove("RUST_BACKTRACE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn build_reports_benchmark_sizes() {
    let o = pcefold(&["build", "--seq", "seq_50"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "id=seq_50 L=30 m=50 |QC|=991 n_min=7");

    let o = pcefold(&["build", "--seq", "seq_80"]);
    assert!(stdout(&o).contains("m=80 |QC|=2345 n_min=8"));
}

#[test]
fn empty_sequence_file_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.fa");
    fs::write(&path, "").unwrap();
    let o = pcefold(&["build", "--seq", path.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
}

#[test]
fn unknown_input_is_an_error() {
    let o = pcefold(&["build", "--seq", "seq_does_not_exist"]);
    assert!(!o.status.success());
}

#[test]
fn run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = pcefold(&[
        "run",
        "--seq",
        "seq_50",
        "--seeds",
        "2",
        "--iters",
        "10",
        "--k-list",
        "1,10",
        "--decoders",
        "pagd",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("condition,decoder,K,"));
    assert_eq!(text.lines().count(), 3);
    assert!(out.join("results.json").exists());
    assert!(out.join("summary.csv").exists());
    assert!(out.join("loss/seed1_trained.csv").exists());
}

#[test]
fn decode_and_oracle_agree_on_a_hairpin() {
    let dir = tempfile::tempdir().unwrap();
    let seq = dir.path().join("h.fa");
    fs::write(&seq, ">h\nGGGGAAAACCCC\n").unwrap();
    let built = dir.path().join("h.json");
    assert!(pcefold(&["build", "--seq", seq.to_str().unwrap(), "--out", built.to_str().unwrap()])
        .status
        .success());

    let oracle: serde_json::Value =
        serde_json::from_slice(&pcefold(&["oracle", "--qubo", built.to_str().unwrap()]).stdout).unwrap();
    assert_eq!(oracle["proved_optimal"], true);

    let m = oracle["bits"].as_str().unwrap().len();
    let evs = dir.path().join("evs.json");
    fs::write(&evs, serde_json::to_string(&vec![-0.5; m]).unwrap()).unwrap();
    let o = pcefold(&[
        "decode",
        "--qubo",
        built.to_str().unwrap(),
        "--evs",
        evs.to_str().unwrap(),
        "--k",
        "20",
    ]);
    assert!(o.status.success());
    let decoded: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(decoded["feasible"], true);
    let (e, opt) = (decoded["energy"].as_f64().unwrap(), oracle["energy"].as_f64().unwrap());
    assert!(e >= opt - 1e-9);
}

#[test]
fn device_graph_has_two_hex_shape() {
    let g: serde_json::Value = serde_json::from_slice(&pcefold(&["device"]).stdout).unwrap();
    assert_eq!(g["nodes"], 23);
    assert_eq!(g["edges"].as_array().unwrap().len(), 24);
}
