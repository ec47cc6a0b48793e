use std::path::PathBuf;
use std::process::Command;

use lightfol::scenario::Body;
use lightfol::{emit, load_scenario, load_str, run_checks, Format, LoadError};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.scn"))
}

fn fixtures() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

fn jsonl(file: &lightfol::ScenarioFile, filter: Option<&[String]>, seed: Option<u64>) -> String {
    let mut out = Vec::new();
    emit(&run_checks(file, filter, seed, None), Format::Jsonl, &mut out).unwrap();
    String::from_utf8(out).unwrap()
}

const MINIMAL: &str = "[manifold]\ndim = 3\nindex = 1\nmetric = diag(-1, 1, 1)\n\n[foliation]\nlevel = x1 + x2\nradical = gradient\n\n[complement]\nfields = (1, 0, 0)\n\n[checks]\nrun = ltr, rad_q\n\n[sampling]\npoints = (0, 0, 0); (0.5, 0.1, 0.2)\n";

#[test]
fn shipped_fol45_registers_twelve_checks() {
    let f = load_scenario(&fixture("fol45_n3_s1")).unwrap();
    assert_eq!(f.checks.len(), 12);
    assert!(matches!(f.body, Body::Foliation { lightlike: Some(_), .. }));
}

#[test]
fn generated_fol45_matches_shipped_file() {
    let text = lightfol::fixtures::fol45(3, 1).unwrap();
    assert_eq!(text, std::fs::read_to_string(fixture("fol45_n3_s1")).unwrap());
    for (n, s) in [(4, 2), (5, 1), (5, 3)] {
        let f = load_str(&lightfol::fixtures::fol45(n, s).unwrap(), "x").unwrap();
        assert!(run_checks(&f, None, None, Some(3)).passed(), "fol45 n={n} s={s}");
    }
}

#[test]
fn missing_manifold_is_a_validation_error() {
    let text = MINIMAL.replace("[manifold]\ndim = 3\nindex = 1\nmetric = diag(-1, 1, 1)\n", "");
    match load_str(&text, "x") {
        Err(LoadError::Validation { field, .. }) => assert_eq!(field, "manifold"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn expression_typo_reports_line_and_position() {
    let text = MINIMAL.replace("x1 + x2", "x1 + * x2");
    match load_str(&text, "x") {
        Err(LoadError::Parse { line, message }) => {
            assert_eq!(line, 7);
            assert!(message.contains("position") || message.contains("offset") || message.chars().any(|c| c.is_ascii_digit()), "{message}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn other_load_errors() {
    assert!(matches!(load_str(&MINIMAL.replace("ltr, rad_q", "ltr, nope"), "x"), Err(LoadError::Parse { .. })));
    assert!(matches!(load_str(&MINIMAL.replace("ltr, rad_q", "ltr, flow_n"), "x"), Err(LoadError::Validation { .. })));
    assert!(matches!(load_str(&MINIMAL.replace("(1, 0, 0)", "(1, 0)"), "x"), Err(LoadError::Parse { line: 11, .. })));
    assert!(matches!(load_str(&MINIMAL.replace("dim = 3", "dim = 9"), "x"), Err(LoadError::Validation { .. })));
    assert!(matches!(load_str(&format!("{MINIMAL}[flow]\nxi = (1, 1, 0)\nv = (1, 0, 0)\n"), "x"), Err(LoadError::Validation { .. })));
    assert!(matches!(load_str(&format!("{MINIMAL}[options]\nconvention = weird\n"), "x"), Err(LoadError::Parse { .. })));
    assert!(matches!(load_scenario(&fixture("does_not_exist")), Err(LoadError::Io(_))));
}

#[test]
fn jsonl_line_count_and_fields() {
    let f = load_str(MINIMAL, "minimal").unwrap();
    let out = jsonl(&f, None, None);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 1 + 2 * 2);
    let rec: serde_json::Value = serde_json::from_str(lines[1]).unwrap();
    for k in ["check", "sample_index", "point", "residual", "tolerance", "pass"] {
        assert!(rec.get(k).is_some(), "{k}");
    }
    assert_eq!(rec["check"], "ltr");
}

#[test]
fn empty_filter_gives_header_only() {
    let f = load_scenario(&fixture("warped_exp")).unwrap();
    let out = jsonl(&f, Some(&[]), None);
    assert_eq!(out.lines().count(), 1);
}

#[test]
fn jsonl_is_byte_identical_across_runs() {
    let f = load_scenario(&fixture("warped_exp")).unwrap();
    assert_eq!(jsonl(&f, None, Some(42)), jsonl(&f, None, Some(42)));
    assert_ne!(jsonl(&f, None, Some(42)), jsonl(&f, None, Some(43)));
}

#[test]
fn errors_become_failed_records() {
    // V tangent to the leaves: the pairing with the radical vanishes
    let f = load_str(&MINIMAL.replace("(1, 0, 0)", "(1, -1, 0)"), "x").unwrap();
    let r = run_checks(&f, None, None, None);
    assert!(!r.passed());
    assert_eq!(r.checks.len(), 2);
    assert!(r.checks[0].records.iter().all(|rec| rec.error.is_some() && rec.residual.is_none()));
}

#[test]
fn tolerance_override() {
    let f = load_str(&format!("{MINIMAL}[options]\ntol.ltr = 1e-30\n"), "x").unwrap();
    let r = run_checks(&f, None, None, None);
    assert_eq!(r.check("ltr").unwrap().tolerance, 1e-30);
    assert_eq!(r.check("rad_q").unwrap().tolerance, 1e-9);
}

#[test]
fn shipped_fixtures_outcomes() {
    for path in fixtures() {
        let f = load_scenario(&path).unwrap();
        let r = run_checks(&f, None, None, None);
        let failed: Vec<&str> = r.checks.iter().filter(|c| !c.passed()).map(|c| c.name.as_str()).collect();
        match f.name.as_str() {
            "broken_kappa" => assert_eq!(failed, ["rummler"]),
            "sign_flip" => assert_eq!(failed, ["divergence"]),
            _ => assert!(failed.is_empty(), "{}: {failed:?}", f.name),
        }
    }
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lightfol"))
}

#[test]
fn exit_codes() {
    let ok = bin().arg("check").arg(fixture("flow_r31")).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let fail = bin().arg("check").arg(fixture("broken_kappa")).output().unwrap();
    assert_eq!(fail.status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.scn");
    std::fs::write(&bad, "[manifold]\ndim = 3\n").unwrap();
    let load = bin().arg("check").arg(&bad).output().unwrap();
    assert_eq!(load.status.code(), Some(2));
}

#[test]
fn cli_only_and_samples() {
    let out = bin()
        .args(["check", "--format", "jsonl", "--samples", "3", "--only", "rummler", "tau", "--"])
        .arg(fixture("warped_exp"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1 + 2 * 3);
    let gen = bin().args(["scenario", "new", "fol45", "--n", "4", "--s", "2"]).output().unwrap();
    assert_eq!(gen.status.code(), Some(0));
    assert!(String::from_utf8(gen.stdout).unwrap().contains("metric = diag(-1, -1, 1, 1)"));
}
