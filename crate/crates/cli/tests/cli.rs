//! Process-level tests for the translation wiring and per-file behavior
//! not already pinned by the acceptance suite.

use std::path::{Path, PathBuf};
use std::process::Command;

fn fixture_dir(sub: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(sub)
}

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_yangc"));
    cmd.env_remove("YANG_PATH");
    cmd
}

#[test]
fn yin_translation_to_output_file() {
    let valid = fixture_dir("valid");
    let tmp = tempfile::tempdir().unwrap();
    let out_file = tmp.path().join("out.xml");
    let out = bin()
        .arg("-f")
        .arg("yin")
        .arg("-o")
        .arg(&out_file)
        .arg("-p")
        .arg(&valid)
        .arg(valid.join("router.yang"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let xml = std::fs::read_to_string(&out_file).unwrap();
    assert!(xml.starts_with("<?xml version=\"1.0\" encoding=\"UTF-8\"?>"));
    roxmltree::Document::parse(&xml).unwrap();
    assert!(xml.contains("<prefix value=\"router\"/>"));
}

#[test]
fn yin_translation_to_stdout_concatenates_documents() {
    let valid = fixture_dir("valid");
    let out = bin()
        .arg("-f")
        .arg("yin")
        .arg("-p")
        .arg(&valid)
        .arg(valid.join("interfaces.yang"))
        .arg(valid.join("software.yang"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.matches("<?xml version").count(), 2);
    assert!(stdout.contains("name=\"interfaces\""));
    assert!(stdout.contains("name=\"software\""));
}

#[test]
fn output_file_with_multiple_inputs_is_a_usage_error() {
    let valid = fixture_dir("valid");
    let tmp = tempfile::tempdir().unwrap();
    let out = bin()
        .arg("-f")
        .arg("yin")
        .arg("-o")
        .arg(tmp.path().join("out.xml"))
        .arg(valid.join("interfaces.yang"))
        .arg(valid.join("software.yang"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn a_broken_file_does_not_stop_the_next_one() {
    let cli = fixture_dir("cli");
    let out = bin()
        .arg(cli.join("syntax-error.yang"))
        .arg(cli.join("clean.yang"))
        .output()
        .unwrap();
    // the first file fails, the second is still processed; exit reflects
    // the validation failure
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr.lines().count(), 1);
    assert!(stderr.contains("syntax-error.yang"));
}

#[test]
fn translation_covers_every_successfully_built_file_despite_errors_elsewhere() {
    let cli = fixture_dir("cli");
    let out = bin()
        .arg("-f")
        .arg("yin")
        .arg(cli.join("syntax-error.yang"))
        .arg(cli.join("clean.yang"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    // only the parseable file is translated
    assert_eq!(stdout.matches("<?xml version").count(), 1);
    assert!(stdout.contains("name=\"clean\""));
}

#[test]
fn translation_is_byte_identical_across_runs() {
    let valid = fixture_dir("valid");
    let run = || {
        bin()
            .arg("-f")
            .arg("yin")
            .arg("-p")
            .arg(&valid)
            .arg(valid.join("c-define.yang"))
            .output()
            .unwrap()
    };
    let first = run();
    let second = run();
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    assert!(!first.stdout.is_empty());
}

#[test]
fn warnings_alone_keep_exit_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("norev.yang");
    std::fs::write(
        &file,
        "module norev { namespace \"urn:norev\"; prefix n; leaf x { type int8; } }",
    )
    .unwrap();
    let out = bin().arg(&file).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("warning[MISSING_REVISION]"));
}

#[test]
fn diagnostics_carry_file_line_and_code() {
    let neg = fixture_dir("neg");
    let out = bin()
        .arg("-p")
        .arg(neg.join("lib"))
        .arg(neg.join("dup-prefix.yang"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr
        .lines()
        .find(|l| l.contains("DUP_PREFIX"))
        .expect("a DUP_PREFIX line");
    // file:line:col: severity[CODE]: message
    assert!(line.contains("dup-prefix.yang:"), "{}", line);
    assert!(line.contains(": error[DUP_PREFIX]: "), "{}", line);
}
