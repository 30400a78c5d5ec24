use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn proppr(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_proppr"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("run proppr")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = proppr(dir, args);
    assert!(
        out.status.success(),
        "proppr {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn synth(kind: &str, entities: &str) -> TempDir {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["synth", "--kind", kind, "--entities", entities, "--out-dir", "."]);
    dir
}

fn metric(report: &str, name: &str) -> f64 {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{name}\t")))
        .unwrap()
        .parse()
        .unwrap()
}

const PROGRAM: [&str; 4] = ["--rules", "rules.ppr", "--facts", "facts.tsv"];

#[test]
fn answers_are_deterministic_and_thread_independent() {
    let dir = synth("hyperlink", "32");
    let args = [&["answer"][..], &PROGRAM, &["--queries", "queries.txt"]].concat();
    let first = ok(dir.path(), &args);
    assert_eq!(first, ok(dir.path(), &args));
    let threaded = [&args[..], &["--threads", "3"]].concat();
    assert_eq!(first, ok(dir.path(), &threaded));
    // every query is answered, ranks start at 1, probabilities sum to 1
    let mut totals = std::collections::BTreeMap::new();
    for line in first.lines() {
        let cols: Vec<&str> = line.split('\t').collect();
        assert_eq!(cols.len(), 4, "{line}");
        *totals.entry(cols[0]).or_insert(0.0) += cols[2].parse::<f64>().unwrap();
    }
    assert_eq!(totals.len(), 16);
    for t in totals.values() {
        assert!((t - 1.0).abs() < 1e-9);
    }
}

#[test]
fn local_and_exact_answers_agree_at_small_epsilon() {
    let dir = synth("hyperlink", "16");
    let base = ["answer", "--rules", "rules.ppr", "--facts", "facts.tsv", "--queries", "queries.txt", "--epsilon", "1e-7"];
    let local = ok(dir.path(), &base);
    let exact = ok(dir.path(), &[&base[..], &["--exact", "--max-t", "2000"]].concat());
    let parse = |text: &str| -> std::collections::HashMap<(String, String), f64> {
        text.lines()
            .map(|l| {
                let c: Vec<&str> = l.split('\t').collect();
                ((c[0].to_string(), c[3].to_string()), c[2].parse().unwrap())
            })
            .collect()
    };
    let (l, e) = (parse(&local), parse(&exact));
    for (k, p) in &e {
        if *p > 1e-3 {
            let q = l.get(k).copied().unwrap_or(0.0);
            assert!((q - p).abs() < 1e-3, "{k:?}: {q} vs {p}");
        }
    }
}

#[test]
fn bad_queries_become_error_records() {
    let dir = synth("hyperlink", "16");
    std::fs::write(dir.path().join("q.txt"), "% comment\nabout(e0,Z)\nabout(e0,\n\nnosuch(a)\n").unwrap();
    let out = ok(dir.path(), &["answer", "--rules", "rules.ppr", "--facts", "facts.tsv", "--queries", "q.txt"]);
    let errors: Vec<&str> = out.lines().filter(|l| l.split('\t').nth(1) == Some("error")).collect();
    assert_eq!(errors.len(), 2, "{out}");
    assert_eq!(errors[0].split('\t').nth(2), Some("syntax"));
    assert_eq!(errors[1].split('\t').nth(2), Some("unknown_predicate"));
    assert!(out.lines().any(|l| l.starts_with("about(e0,V0)\t1\t")));
}

#[test]
fn failures_exit_with_an_error_line() {
    let dir = synth("hyperlink", "16");
    let out = proppr(dir.path(), &["answer", "--rules", "missing.ppr", "--queries", "queries.txt"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error\tio\tmissing.ppr"));

    let out = proppr(dir.path(), &["answer", "--rules", "rules.ppr", "--facts", "facts.tsv", "--queries", "queries.txt", "--alpha-prime", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error\tinvalid_params\t"));

    let out = proppr(dir.path(), &["answer", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error\tusage\t"));

    std::fs::write(dir.path().join("bad.ppr"), "about(X,Z) :- handLabeled(X,Z)\n").unwrap();
    let out = proppr(dir.path(), &["answer", "--rules", "bad.ppr", "--queries", "queries.txt"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error\tsyntax\t"));
}

#[test]
fn ground_train_eval_pipeline() {
    let dir = synth("citation", "12");
    let d = dir.path();
    let records = ok(d, &[&["ground"][..], &PROGRAM, &["--train", "train.tsv"]].concat());
    std::fs::write(d.join("g.txt"), &records).unwrap();
    let learn = ["--loss", "log", "--epochs", "3", "--seed", "5"];
    let from_cache = ok(d, &[&["train", "--groundings", "g.txt", "--train", "train.tsv"][..], &learn].concat());
    let from_examples = ok(d, &[&["train"][..], &PROGRAM, &["--train", "train.tsv", "--loss-log", "loss.tsv"], &learn].concat());
    assert_eq!(from_cache, from_examples);
    std::fs::write(d.join("w.tsv"), &from_cache).unwrap();
    assert_eq!(std::fs::read_to_string(d.join("loss.tsv")).unwrap().lines().count(), 3);

    let unit = ok(d, &[&["eval"][..], &PROGRAM, &["--test", "test.tsv"]].concat());
    let trained = ok(d, &[&["eval"][..], &PROGRAM, &["--test", "test.tsv", "--params-in", "w.tsv"]].concat());
    assert!(metric(&trained, "AUC") >= metric(&unit, "AUC"), "{unit}\n{trained}");

    // evaluating saved answers gives the same report as answering in place
    let queries: String = std::fs::read_to_string(d.join("test.tsv"))
        .unwrap()
        .lines()
        .map(|l| format!("{}\n", l.split('\t').next().unwrap()))
        .collect();
    std::fs::write(d.join("tq.txt"), queries).unwrap();
    ok(d, &[&["answer"][..], &PROGRAM, &["--queries", "tq.txt", "--params-in", "w.tsv", "--output", "a.tsv"]].concat());
    let saved = ok(d, &["eval", "--test", "test.tsv", "--answers", "a.tsv"]);
    assert_eq!(saved, trained);
}

#[test]
fn train_without_usable_examples_fails() {
    let dir = synth("hyperlink", "16");
    std::fs::write(dir.path().join("t.tsv"), "about(e0,Z)\t+about(e0,nothing)\n").unwrap();
    let out = proppr(dir.path(), &[&["train"][..], &PROGRAM, &["--train", "t.tsv"]].concat());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error\tno_examples\t"));
}

#[test]
fn synth_is_seeded() {
    let a = synth("citation", "10");
    let b = synth("citation", "10");
    for f in ["facts.tsv", "train.tsv", "test.tsv"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap()
        );
    }
    let c = TempDir::new().unwrap();
    ok(c.path(), &["synth", "--kind", "citation", "--entities", "10", "--seed", "9", "--out-dir", "."]);
    assert_ne!(
        std::fs::read(a.path().join("facts.tsv")).unwrap(),
        std::fs::read(c.path().join("facts.tsv")).unwrap()
    );
}
