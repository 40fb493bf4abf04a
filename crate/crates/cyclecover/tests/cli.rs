//! End-to-end checks of the command-line surface: cover/verify round trips,
//! exit codes, generation determinism and the corpus table.

use std::path::PathBuf;
use std::process::Command;

fn scc() -> Command {
    Command::new(env!("CARGO_BIN_EXE_scc"))
}

fn write_petersen(dir: &std::path::Path) -> PathBuf {
    let g = cyclecover::harness::named::petersen();
    let path = dir.join("petersen.mg");
    std::fs::write(&path, g.to_text()).unwrap();
    path
}

fn tempdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("scc-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn cover_auto_picks_cubic_and_verify_round_trips() {
    let dir = tempdir("roundtrip");
    let input = write_petersen(&dir);
    let cover_path = dir.join("petersen.cover.json");
    let out = scc()
        .args(["cover", "--input"])
        .arg(&input)
        .args(["--method", "auto", "--out"])
        .arg(&cover_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("Cubic"), "auto should pick the cubic bound: {stderr}");
    assert!(stderr.contains("34/21"));

    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&cover_path).unwrap()).unwrap();
    assert_eq!(doc["construction"], "cubic");
    assert_eq!(doc["bound"][0], 34);
    assert_eq!(doc["bound"][1], 21);

    let verify = scc()
        .args(["verify", "--input"])
        .arg(&input)
        .args(["--cover"])
        .arg(&cover_path)
        .output()
        .unwrap();
    assert_eq!(verify.status.code(), Some(0));
}

#[test]
fn verify_rejects_tampered_cover() {
    let dir = tempdir("tamper");
    let input = write_petersen(&dir);
    let cover_path = dir.join("cover.json");
    assert!(scc()
        .args(["cover", "--input"])
        .arg(&input)
        .args(["--out"])
        .arg(&cover_path)
        .status()
        .unwrap()
        .success());
    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&cover_path).unwrap()).unwrap();
    // Drop one cycle: coverage breaks.
    doc["cycles"].as_array_mut().unwrap().pop();
    std::fs::write(&cover_path, serde_json::to_string(&doc).unwrap()).unwrap();
    let verify = scc()
        .args(["verify", "--input"])
        .arg(&input)
        .args(["--cover"])
        .arg(&cover_path)
        .output()
        .unwrap();
    assert_eq!(verify.status.code(), Some(1), "tampered cover must exit 1");
}

#[test]
fn unreadable_input_is_an_input_error() {
    let out = scc()
        .args(["cover", "--input", "/nonexistent/graph.mg"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oracle_reports_k4_optimum() {
    let dir = tempdir("oracle");
    let g = cyclecover::harness::named::k4();
    let input = dir.join("k4.mg");
    std::fs::write(&input, g.to_text()).unwrap();
    let out = scc()
        .args(["oracle", "--input"])
        .arg(&input)
        .args(["--max-cycles", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("optimum with <= 3 cycles: 8"), "{stdout}");
}

#[test]
fn gen_is_deterministic_and_corpus_runs_on_files() {
    let dir = tempdir("gen");
    let a = dir.join("a.mg");
    let b = dir.join("b.mg");
    for path in [&a, &b] {
        assert!(scc()
            .args(["gen", "--kind", "cubic", "--n", "10", "--seed", "9", "--out"])
            .arg(path)
            .status()
            .unwrap()
            .success());
    }
    assert_eq!(
        std::fs::read_to_string(&a).unwrap(),
        std::fs::read_to_string(&b).unwrap(),
        "same (n, seed) must generate identical bytes"
    );

    let out = scc()
        .args(["corpus", "--kind", "file-dir", "--path"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let table = String::from_utf8_lossy(&out.stdout);
    assert!(table.contains("cubic"), "{table}");

    // Reproducibility: identical spec, identical bytes.
    let again = scc()
        .args(["corpus", "--kind", "file-dir", "--path"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.stdout, again.stdout);
}
