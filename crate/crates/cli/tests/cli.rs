use std::path::PathBuf;
use std::process::{Command, Output};

fn input(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("inputs").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_equires")).args(args).env_remove("EQUIRES_GOLDEN_DIR").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch_dir(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("equires-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn bare_input_runs_equiresolution() {
    let o = run(&[input("ex8_6.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("e = 1, ell = 1"), "{s}");
    assert!(s.contains("V(x,y)"), "{s}");
}

#[test]
fn resolved_input_has_empty_sing() {
    let o = run(&["sing", input("smooth.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "Sing = ∅");
}

#[test]
fn failed_condition_exits_with_two() {
    let o = run(&["equires", input("ex_nohay.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("no A-permissible lift"));
    let o = run(&["--m", "1", input("ex_nohay.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn bad_input_reports_position() {
    let o = run(&["equires", input("bad.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.json:5:13:"));
    let dir = scratch_dir("schema");
    let p = dir.join("schema2.json");
    std::fs::write(&p, "{\n  \"schema\": 2,\n  \"m\": 1,\n  \"vars\": [\"x\"],\n  \"ideal\": [\"x\"],\n  \"b\": 1\n}\n").unwrap();
    let o = run(&["sing", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains(":2:3:"));
}

#[test]
fn dimension_guard_exits_with_three() {
    let o = run(&["--max-dim", "1", "equires", input("ex8_6.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn replays_match_their_goldens() {
    for name in ["ex4_2", "ex_nohay", "ex4_6", "ex6_9", "ex6_10", "ex8_6"] {
        let o = run(&["replay", name]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
        assert!(stdout(&o).contains(&format!("golden {name}: match")));
    }
    assert!(stdout(&run(&["replay", "ex6_10"])).contains("B_Z = ((x^30), 24)"));
}

#[test]
fn replay_reports_are_byte_identical() {
    let dir = scratch_dir("replay");
    let (a, b) = (dir.join("a.json"), dir.join("b.json"));
    for p in [&a, &b] {
        assert_eq!(run(&["--out", p.to_str().unwrap(), "replay", "ex8_6"]).status.code(), Some(0));
    }
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(x, y);
    let golden = std::fs::read(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("goldens/ex8_6.json")).unwrap();
    assert_eq!(x, golden);
}

#[test]
fn external_golden_directory_is_used() {
    let dir = scratch_dir("goldens");
    std::fs::write(dir.join("ex4_2.json"), "{}\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_equires"))
        .args(["replay", "ex4_2"])
        .env("EQUIRES_GOLDEN_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("mismatch at line 1"));
}

#[test]
fn other_commands_run() {
    let o = run(&["center", input("ex8_6.json").to_str().unwrap()]);
    assert!(stdout(&o).contains("W: V(x,y)"));
    let o = run(&["step", input("ex8_6.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Sing = ∅"));
    let o = run(&["resolve", input("monomial.json").to_str().unwrap()]);
    assert!(stdout(&o).contains("steps: 2"));
    let o = run(&["principalize", input("cusp_ideal.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["--trace", "none", "embedded", input("cusp_curve.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("eta = 3, e = 3"));
    let o = run(&["principalize", input("ex8_6.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn report_file_is_versioned_json() {
    let dir = scratch_dir("report");
    let p = dir.join("report.json");
    run(&["--out", p.to_str().unwrap(), input("ex8_6.json").to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["e"], 1);
    assert_eq!(v["run"]["steps"][0]["value"]["max_omega"], "1/1");
}
