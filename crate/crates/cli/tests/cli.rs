use std::path::PathBuf;
use std::process::{Command, Output};

fn ist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ist"))
        .args(args)
        .env_remove("IST_WORKERS")
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ist-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn gnp_build_writes_an_artifact_that_verifies() {
    let dir = scratch("gnp");
    let path = dir.join("trees.json");
    let out = ist(&[
        "build-gnp",
        "--n",
        "300",
        "--p",
        "0.4",
        "--eps",
        "0.2",
        "--seed",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let record = json(&out);
    assert_eq!(record["outcome"], "success");
    assert_eq!(record["verified"], true);
    let check = ist(&["verify", path.to_str().unwrap()]);
    assert_eq!(check.status.code(), Some(0));
    assert_eq!(json(&check)["ok"], true);
}

#[test]
fn tampered_artifact_fails_verification() {
    let dir = scratch("tamper");
    let path = dir.join("trees.json");
    let out = ist(&[
        "build-gnp",
        "--n",
        "200",
        "--p",
        "0.4",
        "--eps",
        "0.2",
        "--seed",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let mut artifact: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    // make the second tree a copy of the first
    let first = artifact["trees"][0].clone();
    artifact["trees"][1] = first;
    std::fs::write(&path, artifact.to_string()).unwrap();
    let check = ist(&["verify", path.to_str().unwrap()]);
    assert_eq!(check.status.code(), Some(1));
    assert_eq!(json(&check)["ok"], false);
}

#[test]
fn construction_failure_exits_one() {
    let out = ist(&[
        "build-gnp",
        "--n",
        "2000",
        "--p",
        "0.076",
        "--eps",
        "0.3",
        "--seed",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["outcome"], "phase2");
}

#[test]
fn bad_parameters_exit_two() {
    assert_eq!(
        ist(&["build-gnp", "--n", "50", "--p", "0.3", "--eps", "0.7"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        ist(&["build-regular", "--n", "50", "--d", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        ist(&["sweep", "--model", "gnp", "--n", "50", "--d", "4"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        ist(&["verify", "/nonexistent/artifact.json"]).status.code(),
        Some(1)
    );
    assert_eq!(ist(&["sweep", "--model", "gnp"]).status.code(), Some(2));
}

#[test]
fn sweep_output_is_reproducible_across_worker_counts() {
    let args = [
        "sweep",
        "--model",
        "regular-even",
        "--n",
        "40,60",
        "--d",
        "4,8",
        "--trials",
        "4",
        "--seed",
        "9",
    ];
    let one = ist(&[&args[..], &["--workers", "1"]].concat());
    let three = ist(&[&args[..], &["--workers", "3"]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, three.stdout);
    let text = String::from_utf8(one.stdout).unwrap();
    // header, 16 trial rows, 4 summaries
    assert_eq!(text.lines().count(), 21);
    assert!(text.lines().next().unwrap().starts_with("kind,"));
}

#[test]
fn empty_grid_prints_only_the_header() {
    let out = ist(&["sweep", "--model", "gnp", "--n", "50", "--p", "0.3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1);
}

#[test]
fn odd_regular_build_checks_both_properties() {
    let dir = scratch("odd");
    let path = dir.join("odd.json");
    for seed in 0..20 {
        let out = ist(&[
            "build-regular",
            "--n",
            "61",
            "--d",
            "4",
            "--seed",
            &seed.to_string(),
            "--out",
            path.to_str().unwrap(),
        ]);
        let record = json(&out);
        if record["outcome"] == "success" {
            assert_eq!(out.status.code(), Some(0));
            assert_eq!(record["strong_verified"], true);
            assert_eq!(
                ist(&["verify", path.to_str().unwrap()]).status.code(),
                Some(0)
            );
            return;
        }
        assert_eq!(out.status.code(), Some(1));
    }
    panic!("no odd build succeeded in 20 seeds");
}

#[test]
fn oracle_on_a_small_graph() {
    let dir = scratch("oracle");
    let path = dir.join("k4.txt");
    let gen = ist(&[
        "gen",
        "--model",
        "gnp",
        "--n",
        "4",
        "--p",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(gen.status.code(), Some(0));
    let out = ist(&["oracle", path.to_str().unwrap(), "--root", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["max_trees"], 3);
}

#[test]
fn diameter_study_reports_thresholds() {
    let out = ist(&[
        "diameter-study",
        "--n",
        "200",
        "--trials",
        "3",
        "--deletions",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["trials"], 3);
    assert!(report["s_four"].as_u64() <= report["s_sixteen"].as_u64());
}
