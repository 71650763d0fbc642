use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_clause");

fn clause(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = clause(args);
    assert!(
        out.status.success(),
        "clause {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    clause(args).status.code().unwrap()
}

/// Tiny deterministic generator so the tests need no RNG crate.
struct Lcg(u64);

impl Lcg {
    fn below(&mut self, n: usize) -> usize {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((self.0 >> 33) as usize) % n
    }
}

const SYLLABLES: &[&str] = &["ka", "lo", "mi", "ne", "pu", "ra", "si", "to", "vu", "ze", "bo", "di"];

fn word(g: &mut Lcg) -> String {
    (0..3).map(|_| SYLLABLES[g.below(SYLLABLES.len())]).collect()
}

/// Writes `reference.tsv` and `annotations.tsv` for a corpus where each of
/// three clauses is the same sentence in every document.
fn planted(dir: &Path) -> (PathBuf, PathBuf) {
    let mut g = Lcg(5);
    let clauses: Vec<Vec<String>> = (0..3).map(|c| (0..10).map(|i| format!("c{c}w{i}")).collect()).collect();
    let mut reference = String::new();
    let mut annotations = String::new();
    for d in 0..12 {
        let mut text = String::new();
        let order: Vec<Option<usize>> = {
            let mut v: Vec<Option<usize>> = vec![None; 6];
            for c in 0..3 {
                let at = g.below(v.len() + 1);
                v.insert(at, Some(c));
            }
            v
        };
        for slot in order {
            if !text.is_empty() {
                text.push(' ');
            }
            let words = match slot {
                Some(c) => clauses[c].clone(),
                None => (0..8).map(|_| word(&mut g)).collect(),
            };
            let start = text.len();
            text.push_str(&words.join(" "));
            text.push('.');
            if let Some(c) = slot {
                // inclusive end
                annotations.push_str(&format!("doc{d}\tclause{c}\t{start}-{}\n", text.len() - 1));
            }
        }
        reference.push_str(&format!("doc{d}\t{text}\n"));
    }
    let r = dir.join("reference.tsv");
    let a = dir.join("annotations.tsv");
    fs::write(&r, reference).unwrap();
    fs::write(&a, annotations).unwrap();
    (r, a)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Workflow {
    _dir: TempDir,
    root: PathBuf,
    reference: PathBuf,
}

impl Workflow {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().to_path_buf();
        let (reference, annotations) = planted(&root);
        let prefix = format!("{}/", root.display());
        ok(&["subsample", "--annotations", s(&annotations), "--rng-seed", "3", "--episodes", "2", "--out-prefix", &prefix]);
        Workflow {
            _dir: dir,
            root,
            reference,
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    fn run(&self, out: &str, extra: &[&str]) -> String {
        let out = self.path(out);
        let in_tsv = self.path("in.tsv");
        let mut args = vec![
            "run",
            "--preset",
            "tfidf-lsa",
            "--set",
            "projector.rank=40",
            "--in",
            s(&in_tsv),
        ];
        let reference = self.reference.display().to_string();
        let out_s = out.display().to_string();
        args.extend(["--reference", &reference, "--out", &out_s]);
        args.extend(extra);
        ok(&args);
        fs::read_to_string(out).unwrap()
    }

    fn evaluate(&self, out: &str) -> String {
        ok(&["evaluate", "--expected", s(&self.path("expected.tsv")), "--out", s(&self.path(out))])
    }
}

#[test]
fn planted_workflow_scores_one_and_writes_manifests() {
    let w = Workflow::new();
    let out = w.run("out.tsv", &[]);
    // 3 clauses × k in 2..=6 × 2 draws
    assert_eq!(out.lines().count(), 30);
    assert_eq!(w.evaluate("out.tsv").trim_end(), "macro-soft-f1\t1.000000");

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(w.path("out.tsv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "run");
    assert_eq!(manifest["config"]["source"], "preset:tfidf-lsa");
    assert_eq!(manifest["rng_seed"], 0);
    let roles: Vec<&str> = manifest["inputs"].as_array().unwrap().iter().map(|r| r["role"].as_str().unwrap()).collect();
    assert_eq!(roles, ["reference", "in"]);
    assert_eq!(manifest["outputs"][0]["sha256"].as_str().unwrap().len(), 64);

    let sub: serde_json::Value = serde_json::from_str(&fs::read_to_string(w.path("manifest.json")).unwrap()).unwrap();
    assert_eq!(sub["rng_seed"], 3);
}

#[test]
fn identical_runs_on_any_thread_count_are_byte_identical() {
    let a = Workflow::new();
    let b = Workflow::new();
    assert_eq!(fs::read(a.path("in.tsv")).unwrap(), fs::read(b.path("in.tsv")).unwrap());
    assert_eq!(fs::read(a.path("expected.tsv")).unwrap(), fs::read(b.path("expected.tsv")).unwrap());
    let one = a.run("out1.tsv", &["--threads", "1"]);
    let four = b.run("out4.tsv", &["--threads", "4"]);
    assert_eq!(one, four);
    assert_eq!(a.evaluate("out1.tsv"), b.evaluate("out4.tsv"));
}

#[test]
fn fit_then_run_matches_in_process_fit() {
    let w = Workflow::new();
    let model = w.path("model.bin");
    let reference = w.reference.display().to_string();
    let fit = |m: &Path| {
        ok(&["fit", "--preset", "tfidf-lsa", "--set", "projector.rank=40", "--reference", &reference, "--model-out", s(m)])
    };
    fit(&model);
    let again = w.path("model2.bin");
    fit(&again);
    assert_eq!(fs::read(&model).unwrap(), fs::read(&again).unwrap());

    let direct = w.run("direct.tsv", &[]);
    let out = w.path("loaded.tsv");
    ok(&["run", "--model", s(&model), "--in", s(&w.path("in.tsv")), "--reference", &reference, "--out", s(&out)]);
    assert_eq!(fs::read_to_string(out).unwrap(), direct);
}

#[test]
fn validation_failures_exit_2_and_io_failures_exit_1() {
    let w = Workflow::new();
    let reference = w.reference.display().to_string();
    let in_tsv = w.path("in.tsv").display().to_string();
    let out = w.path("x.tsv").display().to_string();
    let run = |extra: &[&str]| {
        let mut args = vec!["run", "--in", &in_tsv, "--reference", &reference, "--out", &out];
        args.extend(extra);
        code(&args)
    };
    // word mover's distance needs token vectors
    assert_eq!(run(&["--preset", "tfidf-lsa", "--set", "scorer.kind=wmd"]), 2);
    assert_eq!(run(&["--preset", "no-such-preset"]), 2);
    assert_eq!(run(&["--preset", "tfidf-lsa", "--set", "projector.rank=100000"]), 2);
    assert_eq!(run(&[]), 2);
    let missing = w.path("missing.conf").display().to_string();
    assert_eq!(run(&["--config", &missing]), 1);
    assert_eq!(
        code(&["fit", "--preset", "tfidf-lsa", "--reference", &reference, "--model-out", &w.path("m").display().to_string()]),
        2,
        "rank 500 exceeds the candidate count"
    );
    assert_eq!(code(&["evaluate", "--expected", s(&w.path("nope.tsv")), "--out", &out]), 1);
}

#[test]
fn evaluate_worked_example_and_edge_cases() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        fs::write(&p, text).unwrap();
        p
    };
    let expected = write("expected.tsv", "c\t1-4\n");
    let returned = write("out.tsv", "c\t1-3,10-15\n");
    let report = ok(&["evaluate", "--expected", s(&expected), "--out", s(&returned), "--per-line"]);
    let lines: Vec<&str> = report.lines().collect();
    assert_eq!(lines[0], "1\tc\t0.333333\t0.750000\t0.461538");
    let p = 1.0 / 3.0;
    let r = 0.75;
    assert_eq!(*lines.last().unwrap(), format!("macro-soft-f1\t{:.6}", 2.0 * p * r / (p + r)));

    let empty = write("empty.tsv", "c\t\n");
    assert_eq!(ok(&["evaluate", "--expected", s(&expected), "--out", s(&empty)]).trim_end(), "macro-soft-f1\t0.000000");
    assert_eq!(ok(&["evaluate", "--expected", s(&expected), "--out", s(&expected)]).trim_end(), "macro-soft-f1\t1.000000");

    let two = write("two.tsv", "c\t1-4\nc\t1-4\n");
    assert_eq!(code(&["evaluate", "--expected", s(&expected), "--out", s(&two)]), 2);
    let other = write("other.tsv", "d\t1-4\n");
    assert_eq!(code(&["evaluate", "--expected", s(&expected), "--out", s(&other)]), 2);

    // same file read as half-open: 1-4 is three characters
    let ho = write("ho.tsv", "c\t1-5\n");
    let v = ok(&["evaluate", "--range-convention", "half-open", "--expected", s(&ho), "--out", s(&expected)]);
    assert!(v.trim_end().starts_with("macro-soft-f1\t0.857143"), "{v}");
}

#[test]
fn subsample_is_reproducible_and_rejects_bad_k() {
    let dir = tempfile::tempdir().unwrap();
    let (_, annotations) = planted(dir.path());
    let go = |prefix: &str, seed: &str| {
        let prefix = format!("{}/{prefix}", dir.path().display());
        ok(&["subsample", "--annotations", s(&annotations), "--rng-seed", seed, "--out-prefix", &prefix]);
        fs::read_to_string(format!("{prefix}in.tsv")).unwrap()
    };
    let a = go("a.", "9");
    assert_eq!(a, go("b.", "9"));
    assert_ne!(a, go("c.", "10"));
    // one draw per clause and k, k - 1 seeds each
    let seeds: Vec<usize> = a.lines().map(|l| l.split('\t').count() - 2).collect();
    assert_eq!(seeds.len(), 15);
    assert!(seeds.iter().all(|&n| (1..=5).contains(&n)));
    let bad = code(&["subsample", "--annotations", s(&annotations), "--k-min", "1", "--out-prefix", "x"]);
    assert_eq!(bad, 2);
}

#[test]
fn preset_listing() {
    let names = ok(&["preset"]);
    for n in ["tfidf-lsa", "glove-sif", "glove-wmd", "contextual-mean", "contextual-fica-3gram", "dct"] {
        assert!(names.lines().any(|l| l == n), "{n} missing");
    }
    assert!(ok(&["preset", "tfidf-lsa"]).contains("projector.rank = 500"));
}

#[test]
fn contextual_sidecar_fixture_runs_end_to_end() {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/sidecar");
    let dir = tempfile::tempdir().unwrap();
    let in_tsv = dir.path().join("in.tsv");
    // seed: first sentence of alpha (inclusive 0-50)
    fs::write(&in_tsv, "beta\tgoverning-law\talpha 0-50\n").unwrap();
    let out = dir.path().join("out.tsv");
    let sidecar = format!("vectorizer.sidecar={}", fixtures.join("manifest.tsv").display());
    ok(&[
        "run",
        "--preset",
        "contextual-mean",
        "--set",
        &sidecar,
        "--in",
        s(&in_tsv),
        "--reference",
        s(&fixtures.join("reference.tsv")),
        "--out",
        s(&out),
    ]);
    assert_eq!(fs::read_to_string(&out).unwrap(), "governing-law\t47-96\n");
    let manifest = fs::read_to_string(dir.path().join("out.tsv.manifest.json")).unwrap();
    assert!(manifest.contains("\"role\": \"sidecar\""));
}
