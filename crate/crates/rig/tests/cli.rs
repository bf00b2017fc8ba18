use std::path::Path;
use std::process::{Command, Output};

use rig::experiments::{read_csv, write_csv, COLUMNS};
use rig_core::regime::{classify, classify_regime};
use rig_core::ModelParams;
use serde_json::Value;

fn rig(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rig")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn prob_two_groups() {
    let v = json(&rig(&["prob", "--n", "2", "--P", "5", "--a", "0.5,0.5", "--K", "1,2"]));
    let q = &v["quantities"];
    assert!((q["edge_prob"].as_f64().unwrap() - 0.425).abs() < 1e-12);
    assert!((q["b"][0].as_f64().unwrap() - 0.3).abs() < 1e-12);
    assert!((q["b"][1].as_f64().unwrap() - 0.55).abs() < 1e-12);
    assert!((q["p"][1][1].as_f64().unwrap() - 0.7).abs() < 1e-12);
}

#[test]
fn prob_whole_pool() {
    let v = json(&rig(&["prob", "--n", "100", "--P", "100", "--a", "1", "--K", "100"]));
    assert_eq!(v["quantities"]["p"][0][0].as_f64(), Some(1.0));
    assert_eq!(v["quantities"]["expected_isolated"].as_f64(), Some(0.0));
}

#[test]
fn validation_errors_exit_2() {
    let out = rig(&["prob", "--n", "5", "--P", "10", "--a", "0.5,0.3", "--K", "1,2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sum"));

    let out = rig(&["prob", "--n", "5", "--P", "10", "--a", "0.5,0.5", "--K", "3,2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_examples() {
    let v = json(&rig(&["solve", "--n", "1000", "--P", "10000", "--a", "1", "--ratios", "1", "--target-beta", "0"]));
    let k = v["K"][0].as_u64().unwrap();
    assert!(v["beta"].as_f64().unwrap() >= 0.0);
    let below = json(&rig(&["prob", "--n", "1000", "--P", "10000", "--a", "1", "--K", &(k - 1).to_string()]));
    assert!(below["quantities"]["beta"].as_f64().unwrap() < 0.0);

    let v =
        json(&rig(&["solve", "--n", "100", "--P", "50", "--a", "0.5,0.5", "--ratios", "1,2", "--target-beta", "-2"]));
    assert!(v["beta"].as_f64().unwrap() >= -2.0);

    let out = rig(&["solve", "--n", "100000", "--P", "3", "--a", "1", "--ratios", "1", "--target-beta", "1e9"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn simulate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for out in [&a, &b] {
        let args = [
            "simulate",
            "--n",
            "50",
            "--P",
            "200",
            "--a",
            "0.3,0.7",
            "--K",
            "2,4",
            "--trials",
            "300",
            "--seed",
            "5",
            "--out",
            path(out),
        ];
        json(&rig(&args));
    }
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    assert!(bytes.ends_with(b"\n"));
    let header = String::from_utf8(bytes).unwrap().lines().next().unwrap().to_string();
    assert_eq!(header, COLUMNS.join(","));
}

#[test]
fn simulate_whole_pool_is_connected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    json(&rig(&[
        "simulate",
        "--n",
        "30",
        "--P",
        "4",
        "--a",
        "1",
        "--K",
        "4",
        "--trials",
        "100",
        "--seed",
        "1",
        "--out",
        path(&out),
    ]));
    let rows = read_csv(std::fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(rows[0].p_connected, 1.0);
    assert_eq!(rows[0].connected, 100);
    assert_eq!(rows[0].p_f, 0.0);
}

#[test]
fn simulate_mean_isolated_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    json(&rig(&[
        "simulate",
        "--n",
        "500",
        "--P",
        "1000",
        "--a",
        "0.5,0.5",
        "--K",
        "3,6",
        "--trials",
        "1000",
        "--seed",
        "9",
        "--out",
        path(&out),
    ]));
    let row = &read_csv(std::fs::File::open(&out).unwrap()).unwrap()[0];
    assert!((row.mean_isolated - row.expected_isolated_closed_form).abs() <= 3.0 * row.stderr_isolated);
}

#[test]
fn simulate_dumps_a_sample() {
    let dir = tempfile::tempdir().unwrap();
    let (out, dump) = (dir.path().join("s.csv"), dir.path().join("g.json"));
    json(&rig(&[
        "simulate",
        "--n",
        "6",
        "--P",
        "20",
        "--a",
        "0.5,0.5",
        "--K",
        "2,3",
        "--trials",
        "4",
        "--seed",
        "2",
        "--out",
        path(&out),
        "--dump-trial",
        "3",
        "--dump",
        path(&dump),
    ]));
    let sample: Value = serde_json::from_slice(&std::fs::read(&dump).unwrap()).unwrap();
    let groups = sample["groups"].as_array().unwrap();
    let sets = sample["object_sets"].as_array().unwrap();
    assert_eq!(groups.len(), 6);
    for (g, s) in groups.iter().zip(sets) {
        assert_eq!(s.as_array().unwrap().len(), 2 + g.as_u64().unwrap() as usize);
    }
}

#[test]
fn single_point_sweep_matches_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim.csv");
    json(&rig(&[
        "simulate",
        "--n",
        "80",
        "--P",
        "300",
        "--a",
        "0.5,0.5",
        "--K",
        "2,4",
        "--trials",
        "250",
        "--seed",
        "11",
        "--out",
        path(&sim),
    ]));
    let config = dir.path().join("sweep.json");
    let swept = dir.path().join("sweep.csv");
    std::fs::write(
        &config,
        format!(
            r#"{{"schema":1,"n":80,"P":300,"a":[0.5,0.5],"K":[2,4],"axis":"n","points":[80],"trials":250,"seed":11,"output":"{}"}}"#,
            path(&swept)
        ),
    )
    .unwrap();
    json(&rig(&["sweep", path(&config)]));
    let strip = |p: &Path| -> Vec<String> {
        let text = std::fs::read_to_string(p).unwrap();
        let row = text.lines().nth(1).unwrap();
        row.split(',').skip(2).map(str::to_string).collect()
    };
    assert_eq!(strip(&sim), strip(&swept));
}

#[test]
fn csv_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.json");
    let out = dir.path().join("out.csv");
    std::fs::write(
        &config,
        format!(
            r#"{{"schema":1,"n":40,"P":100,"a":[0.2,0.8],"K":[1,3],"axis":"K1-scale","points":[1,1.5,2],"trials":50,"seed":3,"output":"{}"}}"#,
            path(&out)
        ),
    )
    .unwrap();
    json(&rig(&["sweep", path(&config)]));
    let bytes = std::fs::read(&out).unwrap();
    let rows = read_csv(bytes.as_slice()).unwrap();
    assert_eq!(rows.len(), 3);
    let mut again = Vec::new();
    write_csv(&rows, &mut again).unwrap();
    assert_eq!(again, bytes);
}

#[test]
fn bad_config_leaves_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.json");
    let out = dir.path().join("out.csv");
    std::fs::write(
        &config,
        format!(r#"{{"schema":2,"n":40,"P":100,"a":[1],"K":[1],"axis":"n","points":[40],"trials":5,"seed":3,"output":"{}"}}"#, path(&out)),
    )
    .unwrap();
    let result = rig(&["sweep", path(&config)]);
    assert_eq!(result.status.code(), Some(2));
    assert!(!out.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);

    // unreachable beta target
    std::fs::write(
        &config,
        format!(
            r#"{{"schema":1,"n":1000,"P":3,"a":[1],"ratios":[1],"axis":"beta-target","points":[1e6],"trials":5,"seed":3,"output":"{}"}}"#,
            path(&out)
        ),
    )
    .unwrap();
    assert_eq!(rig(&["sweep", path(&config)]).status.code(), Some(3));
    assert!(!out.exists());
}

#[test]
fn oracle_commands() {
    let v = json(&rig(&["oracle", "pair", "--P", "5", "--ki", "1", "--kj", "2"]));
    assert_eq!(v["p"]["exact"], "2/5");
    let v = json(&rig(&["oracle", "events", "--n", "3", "--P", "5", "--a", "0.5,0.5", "--K", "1,2"]));
    assert_eq!(v["expected_isolated"]["exact"], "831/800");

    let out = rig(&["oracle", "events", "--n", "30", "--P", "40", "--a", "1", "--K", "3"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn diag_reports_regime() {
    let v = json(&rig(&["diag", "--n", "10000", "--P", "17000", "--a", "1", "--K", "4"]));
    let d = &v["diagnostics"];
    assert!(d["beta"].as_f64().unwrap().abs() < 1.0);
    let b1 = (d["beta"].as_f64().unwrap() + 10000f64.ln()) / 10000.0;
    assert_eq!(v["regime"], classify(10000.0, b1, 0.05).label());
    assert!((d["yagan_c"].as_f64().unwrap() - 1.0).abs() < 0.1);
    let v = json(&rig(&["diag", "--n", "1000", "--P", "100", "--a", "1", "--K", "10"]));
    let flags: Vec<&str> = v["diagnostics"]["flags"].as_array().unwrap().iter().map(|f| f.as_str().unwrap()).collect();
    assert!(flags.contains(&"pool-small"));
    assert!(flags.contains(&"key-ring-large"));
}

#[test]
fn regime_depends_only_on_n_and_b1() {
    // Same n and b1 through different (P, K): identical classification.
    let x = ModelParams::new(50, vec![1.0], vec![1], 10).unwrap();
    let y = ModelParams::new(50, vec![0.5, 0.5], vec![1, 1], 10).unwrap();
    assert_eq!(classify_regime(&x, 0.05).unwrap(), classify_regime(&y, 0.05).unwrap());
    assert_eq!(classify_regime(&x, 0.05).unwrap(), classify(50.0, 0.1, 0.05));
}
