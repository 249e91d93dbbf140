use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn netweight(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netweight"))
        .args(args)
        .current_dir(root())
        .env_remove("NETWEIGHT_ALPHA_CAP")
        .env_remove("NETWEIGHT_CHI_CAP")
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = netweight(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(root().join("tests/golden").join(name)).unwrap()
}

fn check_golden(name: &str, args: &[&str]) {
    assert_eq!(stdout_of(args), golden(name), "golden mismatch for {name}");
}

#[test]
fn golden_random_generator() {
    check_golden(
        "random_k3_m8_s7.txt",
        &[
            "generate", "--family", "random", "--k", "3", "--m", "8", "--seed", "7",
        ],
    );
}

#[test]
fn golden_validate() {
    check_golden(
        "validate_c5.txt",
        &["validate", "--input", "tests/data/c5.txt"],
    );
}

#[test]
fn golden_weights() {
    check_golden(
        "weights_opt_c5.csv",
        &["weights", "--method", "opt", "--input", "tests/data/c5.txt"],
    );
    check_golden(
        "weights_ind_c5.csv",
        &["weights", "--method", "ind", "--input", "tests/data/c5.txt"],
    );
    check_golden(
        "weights_eqw_star.csv",
        &[
            "weights",
            "--method",
            "eqw",
            "--input",
            "tests/data/star.txt",
        ],
    );
}

#[test]
fn golden_svalue() {
    check_golden("svalue_c5.txt", &["svalue", "--input", "tests/data/c5.txt"]);
}

#[test]
fn golden_bounds() {
    check_golden(
        "bounds_c5.csv",
        &[
            "bounds",
            "--input",
            "tests/data/c5.txt",
            "--epsilon",
            "0.25,0.5,1",
            "--M",
            "1",
            "--sigma2",
            "0.25",
        ],
    );
}

#[test]
fn golden_compare() {
    check_golden(
        "compare.csv",
        &[
            "compare",
            "--input",
            "tests/data/disjoint.txt",
            "tests/data/star.txt",
            "tests/data/c5.txt",
        ],
    );
}

#[test]
fn golden_fit() {
    check_golden(
        "fit_c5.json",
        &[
            "fit",
            "--input",
            "tests/data/c5.txt",
            "--data",
            "tests/data/c5_sample.csv",
            "--method",
            "opt",
            "--R",
            "1",
        ],
    );
}

#[test]
fn golden_simulations() {
    check_golden(
        "concentration_c5.csv",
        &[
            "simulate-concentration",
            "--config",
            "tests/data/concentration_c5.json",
        ],
    );
    check_golden(
        "erm_c5.csv",
        &["simulate-erm", "--config", "tests/data/erm_c5.json"],
    );
}

#[test]
fn canonical_structure_values() {
    let csv = golden("compare.csv");
    let rows: Vec<Vec<&str>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    // m, alpha, chi*, greedy, s
    assert_eq!(rows[0][1..6], ["3", "3", "1", "3", "3"]);
    assert_eq!(rows[1][1..6], ["4", "1", "4", "1", "1"]);
    assert_eq!(rows[2][1..6], ["5", "2", "2.5", "2", "2.5"]);
}

#[test]
fn output_file_and_sidecar() {
    let dir = std::env::temp_dir().join(format!("netweight-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("conc.csv");
    let out_s = out.to_str().unwrap();
    let printed = stdout_of(&[
        "simulate-concentration",
        "--config",
        "tests/data/concentration_c5.json",
        "--output",
        out_s,
    ]);
    assert!(printed.is_empty());
    let csv = std::fs::read_to_string(&out).unwrap();
    let golden_csv = golden("concentration_c5.csv");
    let (body, meta_line) = golden_csv.trim_end().rsplit_once('\n').unwrap();
    assert_eq!(csv.trim_end(), body);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("conc.csv.meta.json")).unwrap())
            .unwrap();
    let inline: serde_json::Value =
        serde_json::from_str(meta_line.strip_prefix("# meta=").unwrap()).unwrap();
    assert_eq!(meta, inline);
    assert_eq!(meta["instance"]["s"], 2.5);
    assert_eq!(meta["seeds"][0], 5);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn seed_override_changes_simulation() {
    let base = stdout_of(&[
        "simulate-concentration",
        "--config",
        "tests/data/concentration_c5.json",
    ]);
    let other = stdout_of(&[
        "simulate-concentration",
        "--config",
        "tests/data/concentration_c5.json",
        "--seed",
        "6",
    ]);
    assert_ne!(base, other);
    let same = stdout_of(&[
        "simulate-concentration",
        "--config",
        "tests/data/concentration_c5.json",
        "--seed",
        "5",
    ]);
    assert_eq!(base, same);
}

#[test]
fn generated_instances_round_trip() {
    let text = stdout_of(&["generate", "--family", "cycle", "--m", "5", "--k", "3"]);
    assert_eq!(
        text,
        std::fs::read_to_string(root().join("tests/data/c5.txt")).unwrap()
    );
    let json = stdout_of(&[
        "generate", "--family", "star", "--m", "4", "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["k"], 2);
    assert_eq!(v["edges"].as_array().unwrap().len(), 4);
}

#[test]
fn fit_with_model_reports_expected_risk() {
    let out = stdout_of(&[
        "fit",
        "--input",
        "tests/data/c5.txt",
        "--data",
        "tests/data/c5_sample.csv",
        "--method",
        "ind",
        "--R",
        "1",
        "--model",
        "tests/data/coin_model.json",
        "--n-test",
        "500",
    ]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["method"], "ind");
    assert_eq!(v["risk"]["expected_estimate"]["n"], 500);
    assert!(v["stationarity"].as_f64().unwrap() <= 1e-8);
}

fn code(args: &[&str]) -> i32 {
    netweight(args).status.code().unwrap()
}

fn write_temp(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("netweight-cli-codes-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&["frobnicate"]), 1);
    assert_eq!(code(&[]), 1);
    assert_eq!(code(&["weights", "--input", "tests/data/c5.txt"]), 1);
    assert_eq!(
        code(&[
            "weights",
            "--method",
            "best",
            "--input",
            "tests/data/c5.txt"
        ]),
        1
    );
    assert_eq!(
        code(&[
            "bounds",
            "--input",
            "tests/data/c5.txt",
            "--epsilon",
            "x",
            "--M",
            "1"
        ]),
        1
    );
    assert_eq!(
        code(&[
            "bounds",
            "--input",
            "tests/data/c5.txt",
            "--epsilon",
            "0.5",
            "--M",
            "1",
            "--covering",
            "cubic"
        ]),
        1
    );
}

#[test]
fn data_errors_exit_2() {
    let bad_index = write_temp("bad_index.txt", "2 1\n2 2\n0 2\n");
    assert_eq!(code(&["validate", "--input", s(&bad_index)]), 2);
    let short = write_temp("short.txt", "2 2\n2 2\n0 1\n");
    assert_eq!(code(&["svalue", "--input", s(&short)]), 2);
    assert_eq!(code(&["validate", "--input", "tests/data/missing.txt"]), 2);
    let bad_eps = netweight(&[
        "bounds",
        "--input",
        "tests/data/c5.txt",
        "--epsilon=-1",
        "--M",
        "1",
    ]);
    assert_eq!(bad_eps.status.code(), Some(2));
    assert!(!bad_eps.stderr.is_empty());
    // sample with a missing edge
    let sample = write_temp("sample.csv", "0,1,0,1,0.5\n1,1,1,0,0.1\n");
    assert_eq!(
        code(&[
            "fit",
            "--input",
            "tests/data/c5.txt",
            "--data",
            s(&sample),
            "--method",
            "opt",
            "--R",
            "1"
        ]),
        2
    );
}

#[test]
fn oversized_instances_exit_3() {
    let big = stdout_of(&[
        "generate", "--family", "random", "--k", "2", "--m", "40", "--sizes", "60,60", "--seed",
        "1",
    ]);
    let path = write_temp("big.txt", &big);
    assert_eq!(
        code(&["weights", "--method", "ind-exact", "--input", s(&path)]),
        3
    );
    // greedy and OPT have no cap
    assert_eq!(
        code(&["weights", "--method", "ind", "--input", s(&path)]),
        0
    );
    assert_eq!(
        code(&["weights", "--method", "opt", "--input", s(&path)]),
        0
    );

    let capped = Command::new(env!("CARGO_BIN_EXE_netweight"))
        .args([
            "weights",
            "--method",
            "ind-exact",
            "--input",
            "tests/data/c5.txt",
        ])
        .current_dir(root())
        .env("NETWEIGHT_ALPHA_CAP", "4")
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&capped.stderr).contains("NETWEIGHT_ALPHA_CAP"));
}

#[test]
fn weights_with_scan_order() {
    let order = write_temp("order.txt", "1 0 2 3 4\n");
    let out = stdout_of(&[
        "weights",
        "--method",
        "ind",
        "--input",
        "tests/data/c5.txt",
        "--order",
        s(&order),
    ]);
    let chosen: Vec<&str> = out
        .lines()
        .skip(1)
        .filter(|l| l.ends_with(",1"))
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(chosen, ["1", "3"]);
    let bad = write_temp("bad_order.txt", "0 0 1 2 3\n");
    assert_eq!(
        code(&[
            "weights",
            "--method",
            "ind",
            "--input",
            "tests/data/c5.txt",
            "--order",
            s(&bad)
        ]),
        2
    );
}

#[test]
fn simulation_ignores_thread_count() {
    let with_threads = |n: &str| {
        Command::new(env!("CARGO_BIN_EXE_netweight"))
            .args(["simulate-concentration", "--config", "tests/data/concentration_c5.json"])
            .current_dir(root())
            .env("RAYON_NUM_THREADS", n)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(with_threads("1"), with_threads("5"));
}
