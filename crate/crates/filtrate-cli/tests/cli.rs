use std::path::Path;
use std::process::{Command, Output};

fn filtrate(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_filtrate"));
    c.args(args).current_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")).env_remove("FILTRATE_BUDGET");
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    filtrate(args, &[]).status.code().unwrap()
}

#[test]
fn parse_errors_exit_with_2() {
    assert_eq!(code(&["info", "simplex:p0,p7"]), 2);
    assert_eq!(code(&["info", "simplex:p1,p0"]), 2);
    assert_eq!(code(&["info", "no/such/file.txt"]), 2);
    assert_eq!(code(&["ih", "circle", "--perversity", "data/posets/vee.txt"]), 2);
}

#[test]
fn budget_exhaustion_exits_with_3() {
    assert_eq!(code(&["--budget", "5", "enum-maps", "simplex:p0,p1", "model:mobius"]), 3);
    let out = filtrate(&["enum-maps", "simplex:p0,p1", "model:mobius"], &[("FILTRATE_BUDGET", "5")]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn header_reports_settings() {
    let out = filtrate(&["--budget", "1234", "spi1", "model:mobius", "--chain", "p0"], &[]);
    let text = String::from_utf8(out.stdout).unwrap();
    let first = text.lines().next().unwrap();
    assert!(first.contains("budget=1234") && first.contains("dim-cap=3") && first.contains("ex-stage=0"), "{first}");
}

#[test]
fn shipped_certificates_verify() {
    for (cert, chain, k) in [
        ("data/certificates/p0p0p1-k1.txt", "p0,p0,p1", "1"),
        ("data/certificates/p0p0p1-k1.json", "p0,p0,p1", "1"),
        ("data/certificates/p0p1p1-k2.txt", "p0,p1,p1", "2"),
    ] {
        assert_eq!(code(&["verify-presentation", cert, "--chain", chain, "--k", k]), 0, "{cert}");
    }
    // Right certificate, wrong horn.
    assert_eq!(code(&["verify-presentation", "data/certificates/p0p0p1-k1.txt", "--chain", "p0,p1,p1", "--k", "2"]), 1);
}

#[test]
fn json_output_parses() {
    for args in [
        vec!["info", "model:cylinder", "--json"],
        vec!["holink", "model:mobius", "--json"],
        vec!["ih", "cone-sphere", "--perversity", "data/perversities/cone-sphere-minus-one.txt", "--json"],
    ] {
        let out = filtrate(&args, &[]);
        assert!(out.status.success(), "{args:?}");
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert!(v.is_object(), "{args:?}");
    }
}
