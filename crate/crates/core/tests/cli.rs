//! Black-box tests of the `treelab` binary: subcommand plumbing, exit
//! codes, stream discipline and the seed environment override.

use std::path::PathBuf;
use std::process::{Command, Output};

fn exe() -> &'static str {
    env!("CARGO_BIN_EXE_treelab")
}

struct Sandbox {
    dir: PathBuf,
}

impl Sandbox {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("treelab-cli-{}-{tag}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Sandbox { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(exe())
            .args(args)
            .current_dir(&self.dir)
            .env_remove("TREELAB_SEED")
            .output()
            .expect("binary runs")
    }
}

impl Drop for Sandbox {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.dir);
    }
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn gen_train_rules_eval_pipeline() {
    let sb = Sandbox::new("pipeline");
    let gen = sb.run(&["gen", "--seed", "1", "--n", "90", "--out", "s.arff"]);
    assert_eq!(gen.status.code(), Some(0));
    assert!(stdout_of(&gen).is_empty(), "results only on stdout");
    assert!(stderr_of(&gen).contains("wrote 90 instances"));

    for algo in ["id3", "c45", "cart"] {
        let model = format!("{algo}.json");
        let train = sb.run(&["train", "--algo", algo, "--in", "s.arff", "--model", &model]);
        assert_eq!(train.status.code(), Some(0), "{algo}: {train:?}");
        assert!(sb.path(&model).exists());

        let rules = sb.run(&["rules", "--model", &model]);
        assert_eq!(rules.status.code(), Some(0));
        let text = stdout_of(&rules);
        assert!(!text.is_empty());
        if algo == "cart" {
            assert!(
                text.contains("=(") && text.contains("!=("),
                "binary subset syntax: {text}"
            );
        } else {
            assert!(text.contains(" = "), "multiway syntax: {text}");
        }

        let eval = sb.run(&[
            "eval", "--algo", algo, "--in", "s.arff", "--k", "10", "--seed", "7",
        ]);
        assert_eq!(eval.status.code(), Some(0));
        let report = stdout_of(&eval);
        assert!(report.contains("Correctly Classified Instances"));
        assert!(report.contains("Confusion Matrix"));
        let pcts: Vec<f64> = report
            .lines()
            .filter(|l| l.contains("Classified Instances") || l.contains("Unclassified Instances"))
            .filter_map(|l| l.split_whitespace().last())
            .map(|tok| tok.trim_end_matches('%').parse::<f64>().unwrap())
            .collect();
        assert_eq!(pcts.len(), 3);
        assert!((pcts.iter().sum::<f64>() - 100.0).abs() < 1e-6);
    }
}

#[test]
fn eval_json_is_machine_readable() {
    let sb = Sandbox::new("json");
    assert!(sb
        .run(&["gen", "--seed", "3", "--n", "45", "--out", "s.arff"])
        .status
        .success());
    let eval = sb.run(&[
        "eval", "--algo", "c45", "--in", "s.arff", "--k", "5", "--seed", "2", "--json",
    ]);
    assert_eq!(eval.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&eval)).unwrap();
    assert_eq!(doc["algorithm"], "C4.5");
    assert_eq!(doc["k"], 5);
    let sum = doc["correct_pct"].as_f64().unwrap()
        + doc["incorrect_pct"].as_f64().unwrap()
        + doc["unclassified_pct"].as_f64().unwrap();
    assert!((sum - 100.0).abs() < 1e-6);
    assert!(doc["confusion"]["rows"].is_array());
    assert!(doc["per_class"].is_array());
    assert!(doc["build_time_secs"].is_number());
}

#[test]
fn usage_errors_exit_one_with_clean_stdout() {
    let sb = Sandbox::new("usage");
    for args in [
        vec!["eval", "--algo", "svm", "--in", "x.arff"],
        vec!["train", "--algo", "id3"],
        vec!["--bogus"],
        vec!["gen", "--seed", "abc", "--n", "9", "--out", "x.arff"],
    ] {
        let out = sb.run(&args);
        assert_eq!(out.status.code(), Some(1), "args {args:?}: {out:?}");
        assert!(stdout_of(&out).is_empty(), "usage errors keep stdout clean");
        assert!(!stderr_of(&out).is_empty());
    }
}

#[test]
fn data_errors_exit_two_with_one_line_diagnostic() {
    let sb = Sandbox::new("data");
    std::fs::write(
        sb.path("broken.arff"),
        "@relation t\n@attribute a {x}\n@data\nz\n",
    )
    .unwrap();

    let missing = sb.run(&["eval", "--algo", "id3", "--in", "nope.arff"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(stdout_of(&missing).is_empty());
    assert_eq!(stderr_of(&missing).lines().count(), 1);

    let broken = sb.run(&[
        "train",
        "--algo",
        "id3",
        "--in",
        "broken.arff",
        "--model",
        "m.json",
    ]);
    assert_eq!(broken.status.code(), Some(2));
    assert!(stderr_of(&broken).starts_with("error: "));

    std::fs::write(sb.path("notamodel.json"), "{}").unwrap();
    let badmodel = sb.run(&["rules", "--model", "notamodel.json"]);
    assert_eq!(badmodel.status.code(), Some(2));

    // Numeric attributes are a data error for ID3 specifically.
    std::fs::write(
        sb.path("numeric.arff"),
        "@relation t\n@attribute v numeric\n@attribute c {p,f}\n@data\n1,p\n2,f\n3,p\n4,f\n",
    )
    .unwrap();
    let id3 = sb.run(&["eval", "--algo", "id3", "--in", "numeric.arff", "--k", "2"]);
    assert_eq!(id3.status.code(), Some(2));
    let c45 = sb.run(&["eval", "--algo", "c45", "--in", "numeric.arff", "--k", "2"]);
    assert_eq!(c45.status.code(), Some(0), "C4.5 accepts numerics: {c45:?}");
}

#[test]
fn environment_variable_supplies_the_default_seed() {
    let sb = Sandbox::new("envseed");
    let run_with_env = |out: &str, env: Option<&str>| {
        let mut cmd = Command::new(exe());
        cmd.args(["gen", "--n", "20", "--out", out])
            .current_dir(&sb.dir);
        match env {
            Some(v) => cmd.env("TREELAB_SEED", v),
            None => cmd.env_remove("TREELAB_SEED"),
        };
        cmd.output().expect("binary runs")
    };

    assert!(run_with_env("default.arff", None).status.success());
    assert!(run_with_env("env9.arff", Some("9")).status.success());
    assert!(sb
        .run(&["gen", "--seed", "9", "--n", "20", "--out", "flag9.arff"])
        .status
        .success());
    assert!(sb
        .run(&["gen", "--seed", "1", "--n", "20", "--out", "flag1.arff"])
        .status
        .success());

    let read = |name: &str| std::fs::read_to_string(sb.path(name)).unwrap();
    assert_eq!(
        read("env9.arff"),
        read("flag9.arff"),
        "env seed equals explicit seed"
    );
    assert_eq!(
        read("default.arff"),
        read("flag1.arff"),
        "default seed is 1"
    );
    assert_ne!(read("env9.arff"), read("flag1.arff"));

    // A flag must beat the environment.
    let mut cmd = Command::new(exe());
    cmd.args(["gen", "--seed", "1", "--n", "20", "--out", "flagwins.arff"])
        .current_dir(&sb.dir)
        .env("TREELAB_SEED", "9");
    assert!(cmd.output().unwrap().status.success());
    assert_eq!(read("flagwins.arff"), read("flag1.arff"));

    // An unparseable environment seed is a data error.
    let bad = run_with_env("bad.arff", Some("not-a-number"));
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn bin_subcommand_feeds_id3() {
    let sb = Sandbox::new("bin");
    let mut arff =
        String::from("@relation marks\n@attribute score numeric\n@attribute c {p,f}\n@data\n");
    for (score, class) in [
        (95.0, "p"),
        (85.0, "p"),
        (72.0, "p"),
        (55.0, "f"),
        (43.0, "f"),
        (30.0, "f"),
    ] {
        arff.push_str(&format!("{score},{class}\n"));
    }
    std::fs::write(sb.path("marks.arff"), arff).unwrap();

    let bin = sb.run(&["bin", "--in", "marks.arff", "--out", "graded.arff"]);
    assert_eq!(bin.status.code(), Some(0), "{bin:?}");
    let graded = std::fs::read_to_string(sb.path("graded.arff")).unwrap();
    assert!(graded.contains("@attribute score {O,A,B,C,D,E,F}"));
    assert!(graded.contains("O,p"));

    // The binned file satisfies ID3's all-nominal precondition.
    let train = sb.run(&[
        "train",
        "--algo",
        "id3",
        "--in",
        "graded.arff",
        "--model",
        "m.json",
    ]);
    assert_eq!(train.status.code(), Some(0), "{train:?}");
}

#[test]
fn class_flag_overrides_the_class_attribute() {
    let sb = Sandbox::new("class");
    std::fs::write(
        sb.path("d.arff"),
        "@relation t\n@attribute label {p,f}\n@attribute a {x,y}\n@data\np,x\np,x\nf,y\nf,y\n",
    )
    .unwrap();
    // Default: class is the last attribute 'a'.
    let model_default = sb.run(&[
        "train", "--algo", "id3", "--in", "d.arff", "--model", "m1.json",
    ]);
    assert!(model_default.status.success());
    // Override: classify 'label' from 'a'.
    let model_label = sb.run(&[
        "train", "--algo", "id3", "--in", "d.arff", "--model", "m2.json", "--class", "label",
    ]);
    assert!(model_label.status.success());
    let rules = sb.run(&["rules", "--model", "m2.json"]);
    let text = stdout_of(&rules);
    assert!(
        text.contains("a = x: p"),
        "tree predicts label from a: {text}"
    );

    let unknown = sb.run(&[
        "train", "--algo", "id3", "--in", "d.arff", "--model", "m3.json", "--class", "nope",
    ]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn tuning_flags_reach_the_algorithms() {
    let sb = Sandbox::new("tuning");
    assert!(sb
        .run(&["gen", "--seed", "5", "--n", "60", "--out", "s.arff"])
        .status
        .success());

    // A permissive C4.5 configuration grows no smaller than the default.
    let loose = sb.run(&[
        "train",
        "--algo",
        "c45",
        "--in",
        "s.arff",
        "--model",
        "loose.json",
        "--cf",
        "0.5",
        "--min-leaf",
        "0.5",
    ]);
    assert!(loose.status.success());
    let tight = sb.run(&[
        "train",
        "--algo",
        "c45",
        "--in",
        "s.arff",
        "--model",
        "tight.json",
        "--cf",
        "0.1",
        "--min-leaf",
        "5",
    ]);
    assert!(tight.status.success());
    let nodes = |name: &str| {
        let text = std::fs::read_to_string(sb.path(name)).unwrap();
        let tree = treelab::tree::DecisionTree::from_json(&text).unwrap();
        let (i, l) = tree.node_count();
        i + l
    };
    assert!(nodes("loose.json") >= nodes("tight.json"));

    let cart = sb.run(&[
        "eval",
        "--algo",
        "cart",
        "--in",
        "s.arff",
        "--k",
        "5",
        "--seed",
        "2",
        "--folds-internal",
        "3",
        "--no-1se",
    ]);
    assert_eq!(cart.status.code(), Some(0), "{cart:?}");

    let cf_out_of_range = sb.run(&[
        "train", "--algo", "c45", "--in", "s.arff", "--model", "x.json", "--cf", "0.9",
    ]);
    assert_eq!(cf_out_of_range.status.code(), Some(2));
}

#[test]
fn no_stratify_changes_fold_assignment_only() {
    let sb = Sandbox::new("strat");
    assert!(sb
        .run(&["gen", "--seed", "8", "--n", "50", "--out", "s.arff"])
        .status
        .success());
    let a = sb.run(&[
        "eval", "--algo", "c45", "--in", "s.arff", "--k", "5", "--seed", "3",
    ]);
    let b = sb.run(&[
        "eval",
        "--algo",
        "c45",
        "--in",
        "s.arff",
        "--k",
        "5",
        "--seed",
        "3",
        "--no-stratify",
    ]);
    assert!(a.status.success() && b.status.success());
    assert!(stdout_of(&a).contains("stratified"));
    assert!(stdout_of(&b).contains("unstratified"));
}
