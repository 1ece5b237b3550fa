use std::process::{Command, Output};

use rtaylor::exact::Rat;
use rtaylor::pipeline::{body_positions, cos_sin_mid, export_trajectory, repro_intro, PipelineConfig};
use rtaylor::topology::Verdict;

fn rtaylor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rtaylor")).args(args).output().expect("binary runs")
}

fn tmp(name: &str) -> std::path::PathBuf {
    std::env::temp_dir().join(format!("rtaylor-cli-{}-{name}", std::process::id()))
}

#[test]
fn intro_exit_codes() {
    let ok = rtaylor(&["repro", "intro"]);
    assert_eq!(ok.status.code(), Some(0));
    let json = String::from_utf8(ok.stdout).unwrap();
    assert!(json.contains("\"printed_z\": \"12709/25000\""));
    let bad = rtaylor(&["repro", "intro", "--grid-exp", "5"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8(bad.stdout).unwrap().contains("first mismatch: z_1"));
}

#[test]
fn intro_report_is_deterministic() {
    assert_eq!(repro_intro(6).to_json(false), repro_intro(6).to_json(false));
    let r = repro_intro(5);
    assert_eq!(r.verdict, Verdict::Fail);
    assert!(!r.paper_faithful);
}

#[test]
fn verify_bounds_single_entries() {
    assert_eq!(rtaylor(&["verify", "bounds", "--phi", "3"]).status.code(), Some(0));
    let out = rtaylor(&["verify", "bounds", "--phi", "58"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("discrepancy: B(phi58)"));
}

#[test]
fn decimal_config_is_rejected() {
    let p = tmp("bad.cfg");
    std::fs::write(&p, "sb = 0.0001\n").unwrap();
    let out = rtaylor(&["verify", "lemma1", "--config", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("p/q rational"));
    std::fs::remove_file(p).ok();
}

#[test]
fn config_overrides_are_deviations() {
    let c = PipelineConfig::parse("long_steps = 20000\nsb = 1/10000\n").unwrap();
    let d = c.deviations();
    assert_eq!(d.len(), 2, "{d:?}");
    assert!(d.iter().any(|s| s.starts_with("long_steps = 20000")));
}

#[test]
fn dump_lists_every_phi() {
    let out = rtaylor(&["dump", "phi"]);
    assert_eq!(out.status.code(), Some(0));
    let s = String::from_utf8(out.stdout).unwrap();
    assert_eq!(s.lines().filter(|l| l.starts_with("phi")).count(), 58);
    assert!(s.contains("B(phi1) = [-102003/125000, 237/50000]"));
}

#[test]
fn run_writes_csv() {
    let csv = tmp("run.csv");
    let out = rtaylor(&[
        "run", "--field", "W", "--a", "43170475352787/10000000000000", "--b", "0", "--t", "1/100", "--steps", "100", "--grid-exp", "14", "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 102);
    assert_eq!(lines[1], "0,0,0,10,0,0");
    std::fs::remove_file(csv).ok();
    assert_eq!(rtaylor(&["run", "--field", "Q", "--a", "1", "--b", "0", "--t", "1", "--steps", "1"]).status.code(), Some(1));
}

#[test]
fn trajectory_rows() {
    let k = PipelineConfig::default().constants;
    let mut buf = Vec::new();
    let s = export_trajectory(&k.a0, &k.b0, &Rat::frac(1, 100), 1, &mut buf).unwrap();
    assert_eq!(s.rows, 2);
    assert!(!s.certified);
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,x1,y1,z1,x2,y2,z2,x3,y3,z3");
    let row0: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row0, vec![0.0, 0.0, 0.0, 0.0, 10.0, 0.0, 0.0, -10.0, 0.0, 0.0]);
    assert_eq!(lines.len(), 3);
}

#[test]
fn quarter_turn_at_t0() {
    let k = PipelineConfig::default().constants;
    let mut buf = Vec::new();
    export_trajectory(&k.a0, &k.b0, &k.t0, 1, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    let angle = last[5].atan2(last[4]).to_degrees();
    assert!((angle - 70.0).abs() < 1e-3, "{angle}");
}

#[test]
fn embedding_is_centered() {
    let p = body_positions(&Rat::frac(1, 3), &Rat::int(10), &Rat::frac(7, 5));
    for axis in 0..2 {
        assert_eq!(&p[0][axis] + &p[1][axis] + p[2][axis].clone(), Rat::zero());
    }
    let (c, s) = cos_sin_mid(&Rat::frac(7, 5));
    assert!((&c * &c + &s * &s - Rat::one()).abs() < Rat::pow10(-25));
}
