use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use riselab::report::{parse_checks_csv, CHECKS_HEADER};
use riselab::Scenario;

fn riselab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_riselab")).args(args).current_dir(dir).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

#[test]
fn passing_run_writes_tables_and_stamp() {
    let dir = tempfile::tempdir().unwrap();
    let o = riselab(&["pythagoras", "--seeds", "4", "--grid", "16", "--out", "out"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("out/checks.csv")).unwrap();
    assert!(csv.starts_with(CHECKS_HEADER));
    let (scenario, records) = parse_checks_csv(&csv).unwrap();
    assert_eq!(scenario, Some(Scenario::Pythagoras));
    assert_eq!(records.iter().map(|r| r.seed).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
    let stamp: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/run.json")).unwrap()).unwrap();
    assert_eq!(stamp["pass"], true);
    assert_eq!(stamp["grid"], 16);
}

#[test]
fn config_file_and_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "run.toml", "scenario = \"triangle\"\nseeds = 50\ngrid = 32\nbase_seed = 7\n");
    let o = riselab(&["--config", "run.toml", "--seeds", "2", "--out", "t"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (_, records) = parse_checks_csv(&fs::read_to_string(dir.path().join("t/checks.csv")).unwrap()).unwrap();
    assert_eq!(records.iter().map(|r| r.seed).collect::<Vec<_>>(), vec![7, 8]);
}

#[test]
fn violations_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "tight.toml", "[tolerances]\nflat = 0.0\n");
    let o = riselab(&["flat-compare", "--config", "tight.toml", "--seeds", "3", "--out", "f"], dir.path());
    assert_eq!(code(&o), 1);
    let csv = fs::read_to_string(dir.path().join("f/checks.csv")).unwrap();
    assert!(csv.lines().any(|l| l.ends_with(",false")));
}

#[test]
fn exploratory_scenario_always_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "strict.toml", "[tolerances]\ninequality = 0.0\n");
    let o = riselab(&["exploratory-strong-triangle", "--config", "strict.toml", "--seeds", "20", "--out", "x"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(dir.path().join("x/values.csv").exists());
}

#[test]
fn usage_and_config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&riselab(&["no-such-scenario"], dir.path())), 2);
    assert_eq!(code(&riselab(&[], dir.path())), 2);
    assert_eq!(code(&riselab(&["pythagoras", "--grid", "4"], dir.path())), 2);
    assert_eq!(code(&riselab(&["conservation", "--grid", "8", "--dt", "0.125"], dir.path())), 2);
    assert_eq!(code(&riselab(&["pythagoras", "--config", "missing.toml"], dir.path())), 2);
    write(dir.path(), "bad.toml", "scenario = \"pythagoras\"\nunknown_key = 1\n");
    assert_eq!(code(&riselab(&["--config", "bad.toml"], dir.path())), 2);
    write(dir.path(), "chi.toml", "chi = [\"cubic-ish\"]\n");
    assert_eq!(code(&riselab(&["metric-table", "--config", "chi.toml"], dir.path())), 2);
    assert_eq!(code(&riselab(&["pythagoras", "--scenario", "triangle"], dir.path())), 2);
}

#[test]
fn unwritable_output_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "blocker", "a file, not a directory");
    let o = riselab(&["pythagoras", "--seeds", "1", "--out", "blocker/out"], dir.path());
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("blocker"));
}

#[test]
fn written_instances_can_be_read_back() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "gen.toml", "write_instances = true\ngrid = 16\n");
    let o = riselab(&["triangle", "--config", "gen.toml", "--seeds", "1", "--seed", "5", "--out", "a"], dir.path());
    assert_eq!(code(&o), 0);
    let first = fs::read_to_string(dir.path().join("a/checks.csv")).unwrap();

    // the same triple from files reproduces the same check
    write(
        dir.path(),
        "files.toml",
        "grid = 16\nbase_seed = 5\npotentials = [\"a/instances/seed-5-0.json\", \"a/instances/seed-5-1.json\", \"a/instances/seed-5-2.json\"]\n",
    );
    let o = riselab(&["triangle", "--config", "files.toml", "--out", "b"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(dir.path().join("b/checks.csv")).unwrap(), first);
}

#[test]
fn malformed_potential_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "p.json", "{\"dim\":1,\"bounds\":[[0,1]],\"m\":8,\"values\":[1,2]}");
    write(dir.path(), "c.toml", "potentials = [\"p.json\", \"p.json\"]\n");
    assert_eq!(code(&riselab(&["pythagoras", "--config", "c.toml"], dir.path())), 2);
}

#[test]
fn flat_compare_draws_three_curves() {
    let dir = tempfile::tempdir().unwrap();
    let o = riselab(&["flat-compare", "--seeds", "1", "--grid", "16", "--out", "f"], dir.path());
    assert_eq!(code(&o), 0);
    let svg = fs::read_to_string(dir.path().join("f/flat-compare.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 3);
    for label in ["lower", "rise", "upper"] {
        assert!(svg.contains(label));
    }
}

#[test]
fn shifted_pair_has_unit_distances() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "shift.toml", "shift = 1.0\np = [1.0, 2.0, 3.5]\n");
    let o = riselab(&["metric-table", "--config", "shift.toml", "--seeds", "2", "--out", "m"], dir.path());
    assert_eq!(code(&o), 0);
    let values = fs::read_to_string(dir.path().join("m/values.csv")).unwrap();
    let rows: Vec<&str> = values.lines().filter(|l| l.contains(",d_p:")).collect();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|l| l.contains(",1.0,1.0,true")));
}
