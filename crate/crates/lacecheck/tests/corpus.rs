use lacecheck::check::Checker;
use lacecheck::config::Config;
use lacecheck::corpus::run_corpus;
use std::path::Path;
use std::process::Command;

fn root() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn lacecheck(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_lacecheck")).args(args).current_dir(root()).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).to_string())
}

#[test]
fn flipped_expectation_is_one_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["MP", "uo-self"] {
        std::fs::copy(root().join(format!("corpus/{name}.lace")), dir.path().join(format!("{name}.lace"))).unwrap();
    }
    std::fs::write(dir.path().join("MP.expect"), "status: refuted\n").unwrap();
    std::fs::copy(root().join("corpus/uo-self.expect"), dir.path().join("uo-self.expect")).unwrap();
    let entries = run_corpus(&Checker::new(Config::default()).unwrap(), dir.path()).unwrap();
    let failing: Vec<&str> = entries.iter().filter(|e| !e.passed()).map(|e| e.name.as_str()).collect();
    assert_eq!(failing, ["MP"]);
}

#[test]
fn empty_directory_is_an_empty_summary() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = lacecheck(&["run-corpus", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("0/0"), "{out}");
}

#[test]
fn exit_codes() {
    assert_eq!(lacecheck(&["check", "corpus/MP.lace"]).0, 0);
    assert_eq!(lacecheck(&["check", "corpus/uo-self.lace"]).0, 1);
    assert_eq!(lacecheck(&["check", "tests/fixtures/aux2-read-into-regular.lace"]).0, 1);
    assert_eq!(lacecheck(&["check", "no/such/file.lace"]).0, 3);
}

#[test]
fn json_report_names_the_failure() {
    let (code, out) = lacecheck(&["check", "--json", "corpus/uo-self.lace"]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["status"], "refuted");
    let obs = v["obligations"].as_array().unwrap();
    assert!(obs.iter().any(|o| o["kind"] == "UO" && o["verdict"] == "invalid"), "{out}");
}

#[test]
fn pms_off_skips_the_final_assertion() {
    let (code, out) = lacecheck(&["check", "--pms", "off", "corpus/R-uo-lo.lace"]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn sc_reading_needs_the_flag() {
    assert_eq!(lacecheck(&["check", "corpus/SCreg.lace"]).0, 1);
    assert_eq!(lacecheck(&["check", "--screg", "corpus/SCreg.lace"]).0, 0);
}
