use std::path::Path;

use causex_cli::run_cli;
use serde_json::Value as Json;
use tempfile::TempDir;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn run(args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_cli(std::iter::once("causex").chain(args.iter().copied()), &mut out, &mut err);
    Run { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn tree(args: &[&str]) -> Json {
    let mut args = args.to_vec();
    args.extend(["--format", "tree"]);
    let r = run(&args);
    assert_eq!(r.code, 0, "{}", r.err);
    serde_json::from_str(&r.out).unwrap_or_else(|e| panic!("{e}: {}", r.out))
}

fn corpus_root() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus"))
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const FOREST: &str = "
model Md {
  exo UL : {0, 1}
  exo UMD : {0, 1}
  endo L : {0, 1} = UL
  endo MD : {0, 1} = UMD
  endo F : {0, 1} = max(L, MD)
}
";

#[test]
fn k2_single_conjunct_is_not_an_explanation() {
    let r = tree(&["check-explanation", "--state", "K2", "--phi", "F=1", "--x", "L=1"]);
    assert_eq!(r["is_explanation"], false);
    assert_eq!(r["ex1b"]["holds"], false);
    assert_eq!(r["ex1a"]["holds"], true);
}

#[test]
fn solve_reads_a_model_file() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "forest.scm.txt", FOREST);
    let r = tree(&["solve", &file, "Md", "UL=0,UMD=0"]);
    assert_eq!(r["values"]["F"], 0);
    let r = tree(&["solve", &file, "Md", "(UL=1, UMD=0)"]);
    assert_eq!(r["values"]["F"], 1);
}

#[test]
fn scores_are_exact_ratios() {
    let r = tree(&["score", "--state", "Kprime-uniform", "--phi", "S2S_4373=1", "--x", "S2S_4373_62_23=1"]);
    assert_eq!(r["ex1b_score"], "1/1");
    assert_eq!(r["prior_score"], "4/7");
    assert_eq!(r["ex1b_mode"], "unconditional");
    let r = tree(&["score", "--state", "K3", "--phi", "F=1", "--x", "L=1", "--ex1b-conditional"]);
    assert_eq!(r["ex1b_mode"], "conditional");
}

#[test]
fn causes_in_the_disjunctive_model() {
    let r = tree(&["find-causes", "--model", "Md", "--context", "UL=1, UMD=1", "--phi", "F=1"]);
    assert_eq!(r["causes"], serde_json::json!(["F=1", "L=1 & MD=1"]));
    let r = tree(&["check-cause", "--model", "Mc", "--context", "UL=1, UMD=1", "--phi", "F=1", "--x", "L=1"]);
    assert_eq!((&r["is_cause"], &r["is_but_for"]), (&Json::Bool(true), &Json::Bool(true)));
    let r = tree(&["check-cause", "--model", "Mc", "--context", "UL=1, UMD=1", "--phi", "F=1", "--x", "L=1", "--contrast", "0"]);
    assert_eq!(r["ac2"]["contrast"], serde_json::json!({"L": 0}));
}

#[test]
fn explicit_documents_replace_the_corpus() {
    let dir = TempDir::new().unwrap();
    let models = write(&dir, "m.scm.txt", FOREST);
    let states = write(&dir, "k.state.txt", "models \"m.scm.txt\"\nstate Both { Md(UL=1, UMD=1) : 1/2 Md(UL=0, UMD=1) : 1/2 }\n");
    let r = tree(&["find-explanations", "--models", &models, "--states", &states, "--state", "Both", "--phi", "F=1"]);
    assert_eq!(r["explanations"], serde_json::json!(["L=1", "MD=1", "F=1"]));
    assert_eq!(r["nontrivial"], serde_json::json!(["L=1"]));
}

#[test]
fn table_format_is_aligned_paths() {
    let r = run(&["check-cause", "--model", "Md", "--context", "UL=0, UMD=0", "--phi", "F=1", "--x", "L=1"]);
    assert_eq!(r.code, 0);
    let line = r.out.lines().find(|l| l.starts_with("is_cause")).unwrap();
    assert_eq!(line.split_whitespace().collect::<Vec<_>>(), ["is_cause", "false"]);
    let starts: std::collections::BTreeSet<usize> = r
        .out
        .lines()
        .map(|l| {
            l.find(char::is_whitespace).unwrap() + l[l.find(char::is_whitespace).unwrap()..].find(|c: char| !c.is_whitespace()).unwrap()
        })
        .collect();
    assert_eq!(starts.len(), 1, "values not aligned:\n{}", r.out);
}

#[test]
fn bad_formula_prints_the_grammar() {
    let r = run(&["check-cause", "--model", "Md", "--context", "UL=1, UMD=1", "--phi", "F=1 &", "--x", "L=1"]);
    assert_eq!(r.code, 1);
    assert!(r.err.contains("--phi: column 6: syntax error"), "{}", r.err);
    assert!(r.err.contains(":="), "no grammar excerpt:\n{}", r.err);
    assert!(r.out.is_empty());
}

#[test]
fn out_of_range_value_is_a_type_error() {
    let r = run(&["check-cause", "--model", "Md", "--context", "UL=1, UMD=1", "--phi", "F=2", "--x", "L=1"]);
    assert_eq!(r.code, 1);
    assert!(r.err.contains("type error"), "{}", r.err);
}

#[test]
fn resolution_errors_exit_1() {
    for args in [
        vec!["check-cause", "--model", "Nope", "--context", "UL=1", "--phi", "F=1", "--x", "L=1"],
        vec!["score", "--state", "Nope", "--phi", "F=1", "--x", "L=1"],
        vec!["validate", "/nonexistent/m.scm.txt"],
        vec!["frobnicate"],
        vec!["score", "--phi", "F=1"],
    ] {
        let r = run(&args);
        assert_eq!(r.code, 1, "{args:?}: {}", r.err);
        assert!(!r.err.is_empty(), "{args:?}");
    }
}

#[test]
fn model_errors_carry_positions() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "bad.scm.txt", &FOREST.replace("max(L, MD)", "max(L, MD, X)"));
    let r = run(&["validate", &file]);
    assert_eq!(r.code, 1);
    assert!(r.err.contains("7:32: resolution error"), "{}", r.err);
    assert!(r.err.contains('X'));
}

#[test]
fn invalid_models_are_reported_not_rejected() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "m.scm.txt", "model M { exo U : {0, 1} endo A : {0, 1} = U + 1 }");
    let r = tree(&["validate", &file]);
    assert_eq!(r["models"][0]["valid"], false, "{r}");
}

#[test]
fn help_and_version_exit_0() {
    for args in [vec!["--help"], vec!["score", "--help"], vec!["--version"]] {
        let r = run(&args);
        assert_eq!(r.code, 0, "{args:?}");
        assert!(!r.out.is_empty());
    }
}

#[test]
fn query_documents_check_their_expectations() {
    let dir = TempDir::new().unwrap();
    write(&dir, "m.scm.txt", FOREST);
    let good = write(
        &dir,
        "good.query.txt",
        "query check-cause\nmodels m.scm.txt\nmodel Md\ncontext UL=1, UMD=1\nphi F=1\nx L=1 & MD=1\nexpect is_cause = true\n",
    );
    assert_eq!(run(&["run", &good]).code, 0);
    let bad = write(
        &dir,
        "bad.query.txt",
        "query check-cause\nmodels m.scm.txt\nmodel Md\ncontext UL=1, UMD=1\nphi F=1\nx L=1\nexpect is_cause = true\n",
    );
    let r = run(&["run", &bad]);
    assert_eq!(r.code, 1);
    assert!(r.err.contains("is_cause"), "{}", r.err);
}

#[test]
fn embedded_corpus_replays() {
    let r = run(&["corpus", "run"]);
    assert_eq!(r.code, 0, "{}{}", r.out, r.err);
    let n = r.out.lines().filter(|l| l.starts_with("ok ")).count();
    assert!(n >= 40, "{}", r.out);
    assert!(r.out.ends_with(&format!("{n} cases passed\n")));
    let list = run(&["corpus", "list"]);
    assert_eq!(list.out.lines().count(), n);
}

#[test]
fn corpus_directory_replays_and_reports_mismatches() {
    let dir = TempDir::new().unwrap();
    std::fs::create_dir(dir.path().join("cases")).unwrap();
    for e in std::fs::read_dir(corpus_root()).unwrap() {
        let p = e.unwrap().path();
        if p.is_file() {
            std::fs::copy(&p, dir.path().join(p.file_name().unwrap())).unwrap();
        }
    }
    let case = std::fs::read_to_string(corpus_root().join("cases/Md-u0-solve.query.txt")).unwrap();
    std::fs::write(dir.path().join("cases/Md-u0-solve.query.txt"), &case).unwrap();
    let d = dir.path().to_string_lossy().into_owned();
    let r = run(&["corpus", "run", "--dir", &d]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.contains("1 cases passed"));

    std::fs::write(dir.path().join("cases/Md-u0-solve.query.txt"), case.replace("values.F = 0", "values.F = 1")).unwrap();
    let r = run(&["corpus", "run", "--dir", &d]);
    assert_eq!(r.code, 1);
    assert!(r.out.contains("FAIL  Md-u0-solve"), "{}", r.out);
    assert!(r.err.contains("values.F"), "{}", r.err);
}
