//! Command-line behavior: exit codes, diagnostics, hints and flags.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_clv"))
}

fn repo(path: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(path)
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("clv-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn unsupported_terms_exit_2_with_diagnostic() {
    let dir = tmp_dir("badterm");
    let input = dir.join("bad.p");
    std::fs::write(&input, "fof(bad, axiom, p(f(X))).\n").unwrap();
    let out = bin()
        .args(["prove", input.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("function symbols"), "{stderr}");
    assert!(stderr.contains("bad.p:1:"), "position missing: {stderr}");
}

#[test]
fn unprovable_goal_exits_1() {
    let dir = tmp_dir("unprovable");
    let input = dir.join("nope.p");
    std::fs::write(
        &input,
        "fof(a1, axiom, ![X]: (p(X) => q(X))).\nfof(g, conjecture, q(c) => p(c)).\n",
    )
    .unwrap();
    let out = bin()
        .args([
            "prove",
            input.to_str().unwrap(),
            "--output",
            dir.join("nope.xml").to_str().unwrap(),
            "--timeout",
            "5",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("EXHAUSTED g"), "{stdout}");
}

#[test]
fn hints_restrict_and_order_the_search() {
    let dir = tmp_dir("hints");
    let input = dir.join("h.p");
    // Provable through a1 only; hints excluding it must fail the search.
    std::fs::write(
        &input,
        "fof(a1, axiom, ![X]: (p(X) => q(X))).\n\
         fof(a2, axiom, ![X]: (r(X) => q(X))).\n\
         fof(g, conjecture, p(c) => q(c)).\n",
    )
    .unwrap();
    let good = dir.join("good.hints");
    std::fs::write(&good, "# only the needed fact\na1\n").unwrap();
    let bad = dir.join("bad.hints");
    std::fs::write(&bad, "a2\n").unwrap();

    let ok = bin()
        .args([
            "prove",
            input.to_str().unwrap(),
            "--output",
            dir.join("h1.xml").to_str().unwrap(),
            "--hints",
            good.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));

    let fail = bin()
        .args([
            "prove",
            input.to_str().unwrap(),
            "--output",
            dir.join("h2.xml").to_str().unwrap(),
            "--hints",
            bad.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(fail.status.code(), Some(1));

    let unknown = dir.join("unknown.hints");
    std::fs::write(&unknown, "no_such_axiom\n").unwrap();
    let err = bin()
        .args([
            "prove",
            input.to_str().unwrap(),
            "--hints",
            unknown.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(err.status.code(), Some(2));
}

#[test]
fn validate_rejects_broken_documents_with_exit_2() {
    let dir = tmp_dir("validate");
    let f = dir.join("broken.xml");
    std::fs::write(&f, "<main><frontpage></frontpage></main>").unwrap();
    let out = bin().args(["validate", f.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("INVALID"), "{stdout}");
}

#[test]
fn export_rejects_unknown_targets() {
    let dir = tmp_dir("target");
    let input = dir.join("t.p");
    std::fs::write(&input, "fof(g, conjecture, ![X]: (p(X) => p(X))).\n").unwrap();
    let xml = dir.join("t.xml");
    assert!(bin()
        .args([
            "prove",
            input.to_str().unwrap(),
            "--output",
            xml.to_str().unwrap(),
        ])
        .status()
        .unwrap()
        .success());
    let out = bin()
        .args(["export", xml.to_str().unwrap(), "--to", "mizar"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn batch_with_jobs_matches_reference_when_waves_respect_dependencies() {
    // jobs=1 is the reference configuration; a jobs=2 run of an
    // independent two-item manifest must agree with it.
    let dir = tmp_dir("jobs");
    for (name, text) in [
        ("i1.p", "fof(a1, axiom, ![X]: (p(X) => q(X))).\nfof(t1, conjecture, p(c) => q(c)).\n"),
        ("i2.p", "fof(a2, axiom, ![X]: (r(X) => s(X))).\nfof(t2, conjecture, r(c) => s(c)).\n"),
    ] {
        std::fs::write(dir.join(name), text).unwrap();
    }
    std::fs::write(dir.join("manifest.txt"), "i1.p\ni2.p\n").unwrap();
    let mut statuses = Vec::new();
    for (jobs, sub) in [("1", "out1"), ("2", "out2")] {
        let out = bin()
            .args([
                "batch",
                dir.join("manifest.txt").to_str().unwrap(),
                "--output-dir",
                dir.join(sub).to_str().unwrap(),
                "--jobs",
                jobs,
                "--date",
                "2024-01-01",
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
        statuses.push(std::fs::read_to_string(dir.join(sub).join("summary.txt")).unwrap());
    }
    let strip_times = |s: &str| -> Vec<(String, String)> {
        s.lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| {
                let mut it = l.split_whitespace();
                (it.next().unwrap().to_string(), it.next().unwrap().to_string())
            })
            .collect()
    };
    assert_eq!(strip_times(&statuses[0]), strip_times(&statuses[1]));
}

#[test]
fn prove_then_check_always_succeeds_on_corpus_items() {
    let dir = tmp_dir("roundtrip");
    for item in ["th_2_1", "th_3_1", "th_4_11_a"] {
        let xml = dir.join(format!("{item}.xml"));
        let prove = bin()
            .args([
                "prove",
                repo(&format!("corpus/{item}.p")).to_str().unwrap(),
                "--output",
                xml.to_str().unwrap(),
                "--date",
                "2024-01-01",
            ])
            .output()
            .unwrap();
        assert!(prove.status.success(), "{item}");
        let check = bin().args(["check", xml.to_str().unwrap()]).output().unwrap();
        assert!(check.status.success(), "{item}: {}", String::from_utf8_lossy(&check.stdout));
    }
}
