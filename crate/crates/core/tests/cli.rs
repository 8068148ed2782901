mod common;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;

use common::*;
use patternforge::format::{read_core, read_covering, read_hierarchy, read_pattern, write_pattern, write_rule};
use patternforge::rules::{make_generic, make_reflect1_down};
use patternforge::OrdinalTerm;
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_patternforge")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

struct Work {
    dir: TempDir,
}

impl Work {
    fn new() -> Work {
        Work { dir: TempDir::new().unwrap() }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn file(&self, name: &str, text: &str) -> String {
        let p = self.path(name);
        std::fs::write(&p, text).unwrap();
        s(&p)
    }

    fn hierarchy(&self, shipped: &str) -> String {
        let p = s(&self.path(&format!("{shipped}.json")));
        assert_eq!(run(&["build", "--shipped", shipped, "--out", &p]).code, 0);
        p
    }
}

fn s(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

#[test]
fn exit_codes() {
    let w = Work::new();
    let tower = w.hierarchy("tower6");
    let omega2 = w.hierarchy("omega-two");
    let good = w.file("good.json", &write_pattern(&pattern(&["0", "w", "w^(2)"], &[("w", "w^(2)")], &[])));
    let uncovered = w.file(
        "uncovered.json",
        &write_pattern(&pattern(&["0", "w", "w^(2)"], &[("w", "w^(2)")], &[("w", "w^(2)")])),
    );
    let invalid = w.file(
        "invalid.json",
        "patternforge-v1\n{\"universe\": [\"0\", \"w^(0)\"], \"le1\": [[\"w^(0)\", \"0\"]], \"le2\": []}\n",
    );
    let garbage = w.file("garbage.json", "not a file we know\n");
    let missing = s(&w.path("missing.json"));

    let identity = {
        let p = pattern(&["0", "w"], &[], &[]);
        w.file("identity.json", &write_rule(&make_generic(&p, &p).unwrap()))
    };
    let reflect = {
        let p = pattern(&["0", "w", "w^(2)"], &[("w", "w^(2)")], &[("w", "w^(2)")]);
        let x: BTreeSet<OrdinalTerm> = [t("w^(2)")].into();
        w.file("reflect.json", &write_rule(&make_reflect1_down(&p, &t("w"), &t("w^(2)"), &x).unwrap()))
    };

    let core_tower = s(&w.path("core-tower.json"));
    let core_omega2 = s(&w.path("core-omega2.json"));
    let core_bound1 = s(&w.path("core-bound1.json"));
    assert_eq!(run(&["core", &tower, "--out", &core_tower]).code, 0);
    assert_eq!(run(&["core", &omega2, "--out", &core_omega2]).code, 0);
    assert_eq!(run(&["core", &tower, "--bound", "1", "--out", &core_bound1]).code, 0);

    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec!["--help"], 0),
        (vec!["--version"], 0),
        (vec![], 2),
        (vec!["frobnicate"], 2),
        (vec!["validate", &good], 0),
        (vec!["validate", &invalid], 1),
        (vec!["validate", &missing], 2),
        (vec!["validate", &garbage], 2),
        (vec!["validate", &good, "--host", &tower], 0),
        (vec!["validate", &uncovered, "--host", &omega2], 1),
        (vec!["validate", &good, "--host", &garbage], 2),
        (vec!["build", "--shipped", "nope"], 2),
        (vec!["build", "--top", "w"], 2),
        (vec!["axioms", &tower], 0),
        (vec!["axioms", &good], 2),
        (vec!["cover", &good, &tower], 0),
        (vec!["cover", &uncovered, &omega2], 1),
        (vec!["isominimal", &good, &tower], 0),
        (vec!["isominimal", &uncovered, &omega2], 1),
        (vec!["core", &tower, "--bound", "0"], 2),
        (vec!["compare", &core_tower, &core_tower, "--host", &tower], 0),
        (vec!["compare", &core_tower, &core_omega2], 1),
        (vec!["compare", &core_tower, &core_bound1], 2),
        (vec!["compare", &core_tower, &core_tower, "--host", &omega2], 2),
        (vec!["chains", &tower], 0),
        (vec!["rule-test", &identity, &tower], 0),
        (vec!["rule-test", &reflect, &tower], 1),
        (vec!["rule-test", &good, &tower], 2),
        (vec!["export-dot", &tower], 0),
        (vec!["export-dot", &garbage], 2),
        (vec!["--format", "yaml", "chains", &tower], 2),
    ];
    for (args, code) in cases {
        let r = run(&args);
        assert_eq!(r.code, code, "{args:?}\nstdout: {}\nstderr: {}", r.stdout, r.stderr);
        if code == 2 && !args.is_empty() && args[0] != "--help" {
            assert!(!r.stderr.is_empty(), "{args:?} says nothing on stderr");
        }
    }
}

#[test]
fn builds_are_reproducible_and_ignore_the_seed() {
    let w = Work::new();
    let a = s(&w.path("a.json"));
    let b = s(&w.path("b.json"));
    let carrier = w.file("carrier.txt", "# small\n0\n1\nw\n\nw+1\n");
    assert_eq!(run(&["--seed", "1", "build", "--carrier", &carrier, "--top", "w^(2)", "--out", &a]).code, 0);
    assert_eq!(run(&["--seed", "99", "build", "--carrier", &carrier, "--top", "w^(2)", "--out", &b]).code, 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let h = read_hierarchy(&std::fs::read_to_string(&a).unwrap()).unwrap();
    assert_eq!(h.terms().len(), 4);

    let open = w.file("open.txt", "0\nw+1\n");
    assert_eq!(run(&["build", "--carrier", &open, "--top", "w^(2)"]).code, 2);
    let low = run(&["build", "--carrier", &carrier, "--top", "w"]);
    assert_eq!(low.code, 2, "top must exceed the carrier");
}

#[test]
fn emitted_files_read_back() {
    let w = Work::new();
    let tower = w.hierarchy("tower6");
    let good = w.file("good.json", &write_pattern(&pattern(&["0", "w", "w^(2)"], &[("w", "w^(2)")], &[])));

    let cov = s(&w.path("cov.json"));
    assert_eq!(run(&["cover", &good, &tower, "--out", &cov]).code, 0);
    let (p, assignment) = read_covering(&std::fs::read_to_string(&cov).unwrap()).unwrap();
    assert_eq!(write_pattern(&p), std::fs::read_to_string(&good).unwrap());
    assert_eq!(assignment.len(), 3);

    let iso = s(&w.path("iso.json"));
    assert_eq!(run(&["isominimal", &good, &tower, "--out", &iso]).code, 0);
    let r = read_pattern(&std::fs::read_to_string(&iso).unwrap()).unwrap();
    assert_eq!(r.len(), 3);

    let core = s(&w.path("core.json"));
    assert_eq!(run(&["core", &tower, "--out", &core]).code, 0);
    let c = read_core(&std::fs::read_to_string(&core).unwrap()).unwrap();
    let printed = run(&["core", &tower]);
    assert_eq!(printed.stdout, std::fs::read_to_string(&core).unwrap());
    assert!(!c.members.is_empty());

    let text = std::fs::read_to_string(&tower).unwrap();
    let stored = text.split("\"sha256\": \"").nth(1).unwrap()[..64].to_string();
    let bad = w.file("tampered.json", &text.replace(&stored, &"0".repeat(64)));
    let r = run(&["chains", &bad]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("hash mismatch"), "{}", r.stderr);
}

#[test]
fn json_and_sugar_output() {
    let w = Work::new();
    let tower = w.hierarchy("tower6");
    let r = run(&["--format", "json", "chains", &tower]);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["length"], 2);
    assert_eq!(v["chain"][0], "w^(w^(0))");
    let r = run(&["--sugar", "chains", &tower]);
    assert_eq!(r.stdout.trim(), "length 2: w <2 w^(2)");

    let core = s(&w.path("core.json"));
    assert_eq!(run(&["core", &tower, "--out", &core]).code, 0);
    let r = run(&["compare", &core, &core]);
    let (_, machine) = r.stdout.split_once("--- machine-readable ---\n").unwrap();
    let v: serde_json::Value = serde_json::from_str(machine).unwrap();
    assert_eq!(v["result"], "embedding");
    assert_eq!(v["host_checked"], false);
}

#[test]
fn dot_export_is_pinned() {
    let w = Work::new();
    let h = w.hierarchy("omega-two");
    let out = s(&w.path("h.dot"));
    assert_eq!(run(&["--sugar", "export-dot", &h, "--out", &out]).code, 0);
    let dot = std::fs::read_to_string(&out).unwrap();
    assert_eq!(run(&["--sugar", "export-dot", &h]).stdout, dot);
    assert_golden("omega-two.dot", &dot);
    let tower = w.hierarchy("tower6");
    assert_golden("tower6.dot", &run(&["--sugar", "export-dot", &tower]).stdout);
}
