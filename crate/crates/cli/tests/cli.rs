use std::path::Path;
use std::process::{Command, Output};

use gazecut::imaging::{load_pgm, write_pgm, write_ppm};
use gazecut::synth::synthetic_scene;

fn gazecut(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gazecut")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const SCENE: &[&str] = &["--synthetic", "64x32", "--dis-min", "4", "--dis-max", "12", "--margin", "2"];

fn with_scene<'a>(head: &[&'a str], tail: &[&'a str]) -> Vec<&'a str> {
    head.iter().chain(SCENE).chain(tail).copied().collect()
}

#[test]
fn selftest_passes_and_repeats() {
    let args = ["selftest", "--networks", "40", "--instances", "15", "--max-width", "20"];
    let a = gazecut(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    let text = stdout(&a);
    for suite in ["transform-round-trip", "solver-equivalence", "exact-optimality", "hierarchy", "hard-inhibit"] {
        assert!(text.contains(&format!("PASS {suite} ")), "{text}");
    }
    assert_eq!(text, stdout(&gazecut(&args)));
}

#[test]
fn forced_selftest_failure_exits_non_zero() {
    let o = gazecut(&["selftest", "--networks", "1", "--instances", "1", "--max-width", "2", "--force-failure"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL forced-failure"));
}

#[test]
fn solve_writes_outputs_with_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    let (disp, labels, stats, dimacs) = (p("d.pgm"), p("l.txt"), p("s.txt"), p("g.max"));
    let args = with_scene(
        &["solve"],
        &["--out-disparity", &disp, "--out-labels", &labels, "--out-stats", &stats, "--dump-graph", &dimacs],
    );
    let o = gazecut(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.starts_with("method=exact images=64x32\n"));
    assert!(out.contains("\nerror=") && out.contains("\ndifference,count\n"));

    let s = std::fs::read_to_string(&stats).unwrap();
    assert!(s.starts_with("# command=solve\n"));
    assert!(s.contains("# penalty=14\n# inhibit=1023\n"));
    assert!(s.contains("\nstop=Converged\n"));
    assert!(!s.contains("flow_ms"));
    let l = std::fs::read_to_string(&labels).unwrap();
    assert!(l.lines().any(|line| !line.starts_with('#')));
    let img = load_pgm(&disp).unwrap();
    assert_eq!((img.width(), img.height()), (64, 32));
    let g = std::fs::read_to_string(&dimacs).unwrap();
    assert!(g.starts_with("c command=solve\n"));
    assert!(g.lines().any(|l| l.starts_with("p max ")));

    // Same configuration, same bytes.
    let first = std::fs::read(&disp).unwrap();
    let first_stats = s;
    assert_eq!(gazecut(&args).status.code(), Some(0));
    assert_eq!(std::fs::read(&disp).unwrap(), first);
    assert_eq!(std::fs::read_to_string(&stats).unwrap(), first_stats);
}

#[test]
fn levels_and_timings() {
    for level in ["1", "2"] {
        let o = gazecut(&with_scene(&["solve", "--level", level, "--block-size", "3", "--timings"], &[]));
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let out = stdout(&o);
        assert!(out.starts_with(&format!("method=l={level} b=3 ")));
        assert!(out.contains("\nskin_nodes=") && out.contains("\nflow_ms="));
    }
}

#[test]
fn solver_cap_exits_with_its_own_code() {
    let o = gazecut(&with_scene(
        &["solve", "--level", "2", "--block-size", "2", "--max-sweeps", "1", "--wave-rounds", "1", "--rounds-per-sweep", "1"],
        &[],
    ));
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn configuration_and_io_errors() {
    let empty = gazecut(&with_scene(&["sweep", "--penalties", "10..2:2"], &[]));
    assert_eq!(empty.status.code(), Some(2));
    let zero_step = gazecut(&with_scene(&["sweep", "--penalties", "2..10:0"], &[]));
    assert_eq!(zero_step.status.code(), Some(2));
    let bad_range = gazecut(&with_scene(&["solve", "--dis-min", "20"], &[]));
    assert_eq!(bad_range.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.ppm");
    let m = missing.to_str().unwrap();
    let o = gazecut(&["solve", "--left", m, "--right", m]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nope.ppm"));

    let garbage = dir.path().join("bad.ppm");
    std::fs::write(&garbage, b"P6\n4 4\n255\n\x01").unwrap();
    let g = garbage.to_str().unwrap();
    assert_eq!(gazecut(&["solve", "--left", g, "--right", g]).status.code(), Some(3));
}

#[test]
fn sweep_and_compare_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let args = with_scene(&["sweep", "--penalties", "2..14:4", "--out", out.to_str().unwrap()], &[]);
    assert_eq!(gazecut(&args).status.code(), Some(0));
    let first = std::fs::read_to_string(&out).unwrap();
    assert_eq!(gazecut(&args).status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), first);
    let rows: Vec<&str> = first.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "penalty,inhibit,error,exact_pct,energy,flow");
    assert_eq!(rows.len(), 5);
    assert!(first.contains("# penalties=2..14:4\n"));

    let list = gazecut(&with_scene(&["sweep", "--penalties", "6,2", "--inhibit", "0"], &[]));
    let text = stdout(&list);
    assert!(text.contains("\n6,0,") && text.contains("\n2,0,"), "{text}");

    let cmp = gazecut(&with_scene(&["compare", "--methods", "0:1,1:2,2:2"], &[]));
    assert_eq!(cmp.status.code(), Some(0));
    let text = stdout(&cmp);
    assert!(text.contains("\nexact,0,1,") && text.contains("\nl=1 b=2,1,2,") && text.contains("\nl=2 b=2,2,2,"));
    assert_eq!(text, stdout(&gazecut(&with_scene(&["compare", "--methods", "0:1,1:2,2:2"], &[]))));
}

fn write_scene(dir: &Path) -> (String, String, String) {
    let s = synthetic_scene(48, 20, 4, 10, 9);
    let p = |n: &str| dir.join(n).to_str().unwrap().to_string();
    write_ppm(&s.pair.left, p("l.ppm"), &[]).unwrap();
    write_ppm(&s.pair.right, p("r.ppm"), &[]).unwrap();
    write_pgm(&s.ground_truth, p("gt.pgm"), &[]).unwrap();
    assert_eq!(s.scale, 8);
    (p("l.ppm"), p("r.ppm"), p("gt.pgm"))
}

#[test]
fn files_on_disk_and_convert_gt() {
    let dir = tempfile::tempdir().unwrap();
    let (l, r, gt) = write_scene(dir.path());
    let model = ["--dis-min", "4", "--dis-max", "10", "--margin", "2"];
    let mut args = vec!["solve", "--left", &l, "--right", &r, "--gt", &gt];
    args.extend(model);
    let o = gazecut(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("\nerror="));

    let no_gt = gazecut(&["solve", "--left", &l, "--right", &r, "--dis-min", "4", "--dis-max", "10"]);
    assert_eq!(no_gt.status.code(), Some(0));
    assert!(!stdout(&no_gt).contains("error="));

    let out = dir.path().join("depth.pgm");
    let mut args = vec!["convert-gt", "--gt", &gt, "--out", out.to_str().unwrap()];
    args.extend(model);
    let o = gazecut(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("sites="));
    let map = load_pgm(&out).unwrap();
    assert!(map.as_bytes().iter().any(|&v| v > 0));
    assert!(std::fs::read(&out).unwrap().starts_with(b"P5\n# command=convert-gt\n"));
}
