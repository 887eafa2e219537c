use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ipapprox"))
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ipapprox-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

const G1: &str = r#"{"format":1,"kind":"general","H":[["2","3","5"]],"b":["10"],"w":["1","1","1"],"l":[0,0,0],"u":[3,3,2]}"#;

#[test]
fn solve_general_example_with_oracle_check() {
    let input = scratch("g1.json", G1);
    let out = run(&["solve", "--input", input.to_str().unwrap(), "--epsilon", "1/5", "--oracle-check"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["status"], "solved");
    assert_eq!(report["objective"], "2");
    assert_eq!(report["oracle"]["value"], "2");
    assert_eq!(report["oracle_check"], "pass");
    assert_eq!(report["within_bound"], true);
    assert_eq!(report["bound"], "1");
    assert!(report["solve_stats"]["bb_nodes"].as_u64().unwrap() >= 1);
}

#[test]
fn reports_are_byte_identical_and_written_to_file() {
    let input = scratch("g1-det.json", G1);
    let json_out = input.with_extension("report.json");
    let args = ["solve", "--input", input.to_str().unwrap(), "--seed", "3", "--json-out", json_out.to_str().unwrap()];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let written: Value = serde_json::from_str(&fs::read_to_string(&json_out).unwrap()).unwrap();
    assert_eq!(written["seed"], 3);
}

#[test]
fn check_reports_crossed_bounds() {
    let input = scratch(
        "crossed.json",
        r#"{"format":1,"kind":"general","H":[["1"]],"b":["1"],"w":["1"],"l":[2],"u":[1]}"#,
    );
    let out = run(&["check", "--input", input.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("bounds crossed"));

    let good = scratch("good.json", G1);
    let out = run(&["check", "--input", good.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
}

#[test]
fn parse_errors_name_the_json_path() {
    let input = scratch(
        "badentry.json",
        r#"{"format":1,"kind":"general","H":[["1","x"]],"b":["1"],"w":["1","1"],"l":[0,0],"u":[1,1]}"#,
    );
    let out = run(&["check", "--input", input.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("$.H[0][1]"));
}

#[test]
fn gen_is_deterministic() {
    let dir = scratch("placeholder", "");
    let a = dir.with_file_name("gen-a.json");
    let b = dir.with_file_name("gen-b.json");
    for path in [&a, &b] {
        let out = run(&["gen", "--kind", "general", "--m", "2", "--n", "6", "--seed", "7", "--out", path.to_str().unwrap()]);
        assert_eq!(code(&out), 0);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let out = run(&["check", "--input", a.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
}

#[test]
fn generated_instances_pass_oracle_check() {
    for kind in ["general", "nfold-config", "nfold", "schedule"] {
        let out = run(&["gen", "--kind", kind, "--seed", "11"]);
        assert_eq!(code(&out), 0);
        let input = scratch(&format!("gen-{kind}.json"), &String::from_utf8(out.stdout).unwrap());
        let out = run(&["solve", "--input", input.to_str().unwrap(), "--oracle-check", "--workers", "2"]);
        assert_eq!(code(&out), 0, "{kind}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn status_exit_codes() {
    let gap = scratch(
        "gap.json",
        r#"{"format":1,"kind":"nfold_config","blocks":[{"D":[["1"]],"configs":[[0]],"weights":["0"]}],"b0":["5"]}"#,
    );
    let out = run(&["solve", "--input", gap.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["status"], "near_feasibility_unattainable");
    assert_eq!(report["max_abs_residual"], "5");

    let empty = scratch(
        "empty.json",
        r#"{"format":1,"kind":"nfold_config","blocks":[{"D":[["1"]],"configs":[],"weights":["0"]}],"b0":["1"]}"#,
    );
    assert_eq!(code(&run(&["solve", "--input", empty.to_str().unwrap()])), 3);

    let g1 = scratch("g1-limit.json", G1);
    let out = run(&["solve", "--input", g1.to_str().unwrap(), "--node-limit", "0"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn pipeline_must_match_kind() {
    let g1 = scratch("g1-pipe.json", G1);
    let out = run(&["solve", "--input", g1.to_str().unwrap(), "--pipeline", "nfold"]);
    assert_eq!(code(&out), 1);
    let out = run(&["solve", "--input", g1.to_str().unwrap(), "--pipeline", "general"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn oracle_subcommand() {
    let g1 = scratch("g1-oracle.json", G1);
    let out = run(&["oracle", "--input", g1.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["value"], "2");
    assert_eq!(v["witness"], serde_json::json!([0, 0, 2]));

    let none = scratch(
        "none.json",
        r#"{"format":1,"kind":"general","H":[["2"]],"b":["3"],"w":["1"],"l":[0],"u":[5]}"#,
    );
    assert_eq!(code(&run(&["oracle", "--input", none.to_str().unwrap()])), 3);
    assert_eq!(code(&run(&["oracle", "--input", g1.to_str().unwrap(), "--cap", "3"])), 4);
}

#[test]
fn schedule_file_reports_the_makespan() {
    let s = scratch("sched.json", r#"{"jobs": [["1","2"],["2","1"]], "cmax": "2"}"#);
    let out = run(&["solve", "--input", s.to_str().unwrap(), "--epsilon", "1/2", "--oracle-check"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["kind"], "schedule");
    assert_eq!(v["schedule"]["within_makespan_bound"], true);
    assert_eq!(v["schedule"]["makespan_bound"], "3");
}
