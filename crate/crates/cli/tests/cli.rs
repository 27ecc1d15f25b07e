//! The `sl2` binary end to end.

use std::fs;
use std::process::{Command, Output};

fn sl2(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sl2")).args(args).output().expect("spawn sl2")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn profile_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("p.svg");
    let o = sl2(&[
        "profile", "--cocycle", "rotation", "--k", "2", "--eps-min", "-0.1", "--eps-max", "0.1", "--eps-points", "5",
        "--svg",
    ]
    .iter()
    .copied()
    .chain([svg.to_str().unwrap()])
    .collect::<Vec<_>>());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "eps,L,slope");
    assert_eq!(lines.len(), 6);
    let last: Vec<f64> = lines[5].split(',').map(|x| x.parse().unwrap()).collect();
    assert!((last[1] - 0.4 * std::f64::consts::PI).abs() < 1e-6);
    let svg = fs::read_to_string(svg).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("polyline"));
}

#[test]
fn config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("scan.csv");
    fs::write(&cfg, "# far from the spectrum\nlambda = 2\ne_min = 7\ne_max = 8\ne_points = 5\n").unwrap();
    let o = sl2(&["classify", "--config", cfg.to_str().unwrap(), "--e-points", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "E,L,omega,defect,class,stratumL_fit_residual,boundary,borderline");
    assert_eq!(rows.len(), 3);
    assert!(rows[1..].iter().all(|r| r.contains(",UniformlyHyperbolic,")));
}

#[test]
fn gradient_single_mode() {
    let o = sl2(&["gradient", "--lambda", "2", "--energy", "0.29968919732015936", "--eps", "0.15", "--modes", "0"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().starts_with("0,"));
}

#[test]
fn exit_codes() {
    // wrong stratum
    let o = sl2(&["gradient", "--lambda", "2", "--energy", "0.29968919732015936", "--eps", "0.15", "--j", "2"]);
    assert_eq!(o.status.code(), Some(4));
    // bad configuration
    assert_eq!(sl2(&["classify", "--alpha", "nonsense"]).status.code(), Some(2));
    assert_eq!(sl2(&["profile", "--bogus", "1"]).status.code(), Some(2));
    // numerical failure: ε outside the strip of the diagonal exponential
    let o = sl2(&["profile", "--cocycle", "diagonal-exponential", "--q0", "2", "--alpha", "1/2", "--eps-max", "5"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}
