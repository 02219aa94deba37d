use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fakeplane"));
    c.env("SOURCE_DATE_EPOCH", "1700000000");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, content: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fakeplane-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, content).unwrap();
    p
}

const QUICK: &str = r#"{"algebra":{"cyclotomic_modulus":7,"alpha":"lambda/lambda_bar"},
 "local_factors":{"2":"3","7":"1"},"indices":{"congruence":7,"normalizer":3},"oracle_terms":10000}"#;

#[test]
fn single_value_commands() {
    let o = run(&["resolve", "7", "3"]);
    assert_eq!((stdout(&o).trim(), o.status.code()), ("(-3)(-2)(-2)", Some(0)));
    assert_eq!(stdout(&run(&["resolve", "3", "2"])).trim(), "(-2)(-2)");
    assert_eq!(stdout(&run(&["volume"])).trim(), "3/7");
    assert_eq!(stdout(&run(&["dims", "--group", "gamma", "--weight", "3"])).trim(), "4");
    assert_eq!(stdout(&run(&["dims", "--group", "gamma", "--weight", "2"])).trim(), "1");
    assert_eq!(stdout(&run(&["lvalue"])).trim(), "32/2401*7^(1/2)*pi^3");
}

#[test]
fn file_commands() {
    let h = scratch("heights.json", r#"{"euler":"3","signature":"1","points":[{"n":7,"q":3},{"n":3,"q":2},{"n":3,"q":2},{"n":3,"q":2}]}"#);
    let out = stdout(&run(&["heights", h.to_str().unwrap()]));
    assert_eq!(out, "euler_height = 1/7\nsignature_height = 1/21\n");
    let s =
        scratch("surface.json", r#"{"c2":"12","c1_sq":"0","q_irr":"0","p_g":"0","chi":"1","signature":"-8","plurigenera":{"2":1,"3":4}}"#);
    let out = stdout(&run(&["classify", s.to_str().unwrap()]));
    assert!(out.starts_with("kodaira = 1\n"), "{out}");
    assert!(out.contains("fake_projective_plane = false"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["resolve", "4", "2"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let missing = scratch(
        "missing.json",
        r#"{"algebra":{"cyclotomic_modulus":7,"alpha":"lambda/lambda_bar"},"indices":{"congruence":7,"normalizer":3}}"#,
    );
    assert_eq!(run(&["--config", missing.to_str().unwrap(), "report"]).status.code(), Some(2));
    let trivial = scratch("trivial.json", &QUICK.replace(r#""2":"3""#, r#""2":"1""#));
    let o = run(&["--config", trivial.to_str().unwrap(), "report"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains(r#""computed": "1/7""#));
    let ok = scratch("quick.json", QUICK);
    assert_eq!(run(&["--config", ok.to_str().unwrap(), "report", "--format", "md"]).status.code(), Some(0));
}

#[test]
fn report_is_byte_identical() {
    let ok = scratch("quick-det.json", QUICK);
    let a = run(&["--config", ok.to_str().unwrap(), "report"]);
    let b = run(&["--config", ok.to_str().unwrap(), "report"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let out = scratch("out.json", "");
    assert_eq!(run(&["--config", ok.to_str().unwrap(), "report", "--output", out.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(std::fs::read(&out).unwrap(), a.stdout);
}

#[test]
fn dataset_paths_resolve_relative_to_config() {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data/gamma.json");
    let ds = scratch("gamma-copy.json", &std::fs::read_to_string(data).unwrap());
    let cfg = scratch(
        "with-datasets.json",
        &QUICK.replace(
            "\"oracle_terms\"",
            &format!("\"datasets\":{{\"gamma\":\"{}\"}},\"oracle_terms\"", ds.file_name().unwrap().to_str().unwrap()),
        ),
    );
    let o = run(&["--config", cfg.to_str().unwrap(), "dims", "--group", "gamma", "--weight", "3"]);
    assert_eq!((stdout(&o).trim(), o.status.code()), ("4", Some(0)));
}
