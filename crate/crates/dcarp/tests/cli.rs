use std::path::Path;
use std::process::{Command, Output};

fn dcarp(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dcarp")).args(args).current_dir(dir).output().unwrap()
}

fn map() -> String {
    format!("{}/tests/data/synth-grid-20.dat", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(dcarp(&[], dir.path()).status.code(), Some(1));
    assert_eq!(dcarp(&["solve"], dir.path()).status.code(), Some(1));
    assert_eq!(dcarp(&["solve", "x", "--strategy", "greedy"], dir.path()).status.code(), Some(1));
    assert_eq!(dcarp(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn parse_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.dcarp"), "VERTICES : 2\nLIST_REQ :\n1 5 1 1\n").unwrap();
    let out = dcarp(&["solve", "bad.dcarp"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    assert_eq!(dcarp(&["report", "missing.csv"], dir.path()).status.code(), Some(2));
}

#[test]
fn convert_then_solve() {
    let dir = tempfile::tempdir().unwrap();
    let out = dcarp(&["convert", &map(), "-o", "map.dcarp"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("map.dcarp")).unwrap();
    assert!(text.starts_with("NAME : synth-grid-20\n"));
    let args = ["solve", "map.dcarp", "--solver", "descent", "--max-evaluations", "500", "--seed", "4"];
    let a = dcarp(&args, dir.path());
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let sol = String::from_utf8(a.stdout).unwrap();
    assert!(sol.starts_with("# cost "));
    assert!(sol.lines().any(|l| !l.starts_with('#')));
    assert_eq!(dcarp(&args, dir.path()).stdout, sol.as_bytes());
}

#[test]
fn scenario_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let config = format!(
        "scenario_id = \"t\"\ninstance = \"{}\"\nscenario_length = 3\nruns = 2\nseed = 9\noutput_csv = \"log.csv\"\n\
         output_dir = \"steps\"\nbaseline = \"restart\"\n[budget]\nmax_evaluations = 300\npopulation = 10\n\
         [[arm]]\nname = \"restart\"\nstrategy = \"restart\"\nsolver = \"descent\"\n\
         [[arm]]\nname = \"transfer\"\nstrategy = \"transfer\"\nsolver = \"descent\"\n",
        map()
    );
    std::fs::write(dir.path().join("s.toml"), config).unwrap();
    let out = dcarp(&["scenario", "s.toml"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let log = std::fs::read_to_string(dir.path().join("log.csv")).unwrap();
    let mut lines = log.lines();
    assert_eq!(lines.next(), Some("scenario_id,m,arm,run,seed,cost,wall_ms,feasible"));
    assert!(lines.all(|l| l.ends_with(",0,true")));
    assert!(dir.path().join("steps/instance_0.dcarp").exists());
    assert!(dir.path().join("steps/best_0.sol").exists());

    let rep = dcarp(&["report", "log.csv", "--baseline", "restart"], dir.path());
    assert!(rep.status.success());
    let text = String::from_utf8(rep.stdout).unwrap();
    assert!(text.contains("W-D-L against restart:"));
    assert!(text.contains("restart: 0-"));
    let csv = dcarp(&["report", "log.csv", "--csv"], dir.path());
    assert!(String::from_utf8(csv.stdout).unwrap().starts_with("scenario_id,m,arm,runs,failed,mean,std,min,vs_baseline\n"));
}
