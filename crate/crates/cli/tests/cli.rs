use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const C7: &str = "% weighted 7-cycle\n7 7 10\n4 2 7\n1 1 3\n6 2 4\n2 3 5\n5 4 6\n3 5 7\n7 6 1\n";

fn mwis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mwis")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_is_deterministic_for_a_fixed_seed() {
    let dir = TempDir::new().unwrap();
    let inst = write(dir.path(), "c7.graph", C7);
    let out_a = dir.path().join("a.sol");
    let out_b = dir.path().join("b.sol");
    for out in [&out_a, &out_b] {
        let o = mwis(&["solve", s(&inst), "--seed", "7", "--time-limit", "5", "--population-size", "12", "--quiet", "--output", s(out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(fs::read(&out_a).unwrap(), fs::read(&out_b).unwrap());
    // optimum of the weighted 7-cycle: {2, 4, 6} = 6 + 5 + 7
    assert_eq!(fs::read_to_string(&out_a).unwrap(), "2\n4\n6\n");
    let v = mwis(&["verify", s(&inst), s(&out_a)]);
    assert!(v.status.success());
    assert_eq!(String::from_utf8_lossy(&v.stdout).trim(), "OK, weight=18");
}

#[test]
fn solve_prints_a_result_record() {
    let dir = TempDir::new().unwrap();
    let inst = write(dir.path(), "c7.graph", C7);
    let result = dir.path().join("r.json");
    let o = mwis(&["solve", s(&inst), "--seed", "3", "--time-limit", "5", "--quiet", "--result", s(&result)]);
    assert!(o.status.success());
    let stdout: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let file: serde_json::Value = serde_json::from_str(&fs::read_to_string(&result).unwrap()).unwrap();
    assert_eq!(stdout, file);
    assert_eq!(stdout["weight"], 18);
    assert_eq!(stdout["n"], 7);
    assert_eq!(stdout["seed"], 3);
}

#[test]
fn malformed_instance_exits_3() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.graph", "3 2\n2\n1\n");
    for args in [vec!["solve", s(&bad), "--quiet"], vec!["reduce", s(&bad)], vec!["exact", s(&bad)]] {
        assert_eq!(mwis(&args).status.code(), Some(3), "{args:?}");
    }
}

#[test]
fn invalid_solution_exits_4() {
    let dir = TempDir::new().unwrap();
    let inst = write(dir.path(), "c7.graph", C7);
    let adjacent = write(dir.path(), "adj.sol", "0\n1\n");
    let o = mwis(&["verify", s(&inst), s(&adjacent)]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("INVALID"));
    let garbage = write(dir.path(), "garbage.sol", "zero\n");
    assert_eq!(mwis(&["verify", s(&inst), s(&garbage)]).status.code(), Some(4));
    let out_of_range = write(dir.path(), "oor.sol", "12\n");
    assert_eq!(mwis(&["verify", s(&inst), s(&out_of_range)]).status.code(), Some(4));
}

#[test]
fn usage_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let inst = write(dir.path(), "c7.graph", C7);
    assert_eq!(mwis(&["solve"]).status.code(), Some(2));
    assert_eq!(mwis(&["solve", s(&inst), "--ordering", "fastest"]).status.code(), Some(2));
    assert_eq!(mwis(&["solve", s(&inst), "--mutation-prob", "1.5"]).status.code(), Some(2));
    assert_eq!(mwis(&["solve", s(&inst), "--time-limit", "-1"]).status.code(), Some(2));
    assert_eq!(mwis(&["solve", s(&inst), "--no-such-flag"]).status.code(), Some(2));
    let conflict = mwis(&["solve", s(&inst), "--selection", "participation", "--selection-fraction", "0.5"]);
    assert_eq!(conflict.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&conflict.stderr);
    assert!(msg.contains("--selection") && msg.contains("--selection-fraction"), "{msg}");
}

#[test]
fn missing_file_exits_1() {
    assert_eq!(mwis(&["verify", "/nonexistent/x.graph", "/nonexistent/x.sol"]).status.code(), Some(1));
}

#[test]
fn reduce_writes_a_kernel_and_sidecar() {
    let dir = TempDir::new().unwrap();
    // path 1-9-9-1: degree-one reductions solve it
    let inst = write(dir.path(), "p4.graph", "4 3 10\n1 2\n9 1 3\n9 2 4\n1 3\n");
    let o = mwis(&["reduce", s(&inst)]);
    assert!(o.status.success());
    let side: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(side["offset"], 10);
    assert_eq!(side["kernel_vertices"], 0);
    let kernel = fs::read_to_string(dir.path().join("p4.graph.kernel")).unwrap();
    assert!(kernel.starts_with("0 0"));
}

#[test]
fn exact_matches_solver() {
    let dir = TempDir::new().unwrap();
    let inst = write(dir.path(), "c7.graph", C7);
    let sol = dir.path().join("exact.sol");
    let o = mwis(&["exact", s(&inst), "--output", s(&sol)]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["weight"], 18);
    assert!(mwis(&["verify", s(&inst), s(&sol)]).status.success());
}

#[test]
fn ordering_bench_row_counts() {
    let dir = TempDir::new().unwrap();
    let inst = write(dir.path(), "c7.graph", C7);
    let disable = mwis(&["ordering-bench", s(&inst), "--mode", "disable-one"]);
    assert!(disable.status.success());
    assert_eq!(String::from_utf8_lossy(&disable.stdout).lines().count(), 1 + 13);
    let sweep = mwis(&["ordering-bench", s(&inst), "--mode", "preset-sweep"]);
    let text = String::from_utf8_lossy(&sweep.stdout).to_string();
    assert_eq!(text.lines().count(), 1 + 5);
    // every ordering solves a 7-cycle completely to the same offset
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split('\t').collect();
        assert_eq!(cols[3], "18", "{line}");
    }
}
