//! Command-line entry point: data generation, grade binning, training,
//! rule dumping and cross-validated evaluation.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data/model errors.
//! Results go to stdout; status and diagnostics go to stderr.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::c45::C45Config;
use crate::cart::CartConfig;
use crate::dataset::{
    bin_grade, generate_synthetic, parse_arff, serialize_arff, AttributeKind, AttributeSpec, Cell,
    Dataset, Grade,
};
use crate::evaluation::{cross_validate, render_report};
use crate::tree::DecisionTree;
use crate::Inducer;

/// Seed used when neither `--seed` nor `TREELAB_SEED` is given.
const DEFAULT_SEED: u64 = 1;

#[derive(Parser)]
#[command(
    name = "treelab",
    version,
    about = "Decision-tree workbench: ID3, C4.5 and CART over ARFF data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Algo {
    Id3,
    C45,
    Cart,
}

#[derive(Args)]
struct Tuning {
    /// C4.5 pruning confidence factor.
    #[arg(long, default_value_t = 0.25)]
    cf: f64,
    /// Minimum leaf weight (C4.5 and CART stopping rule).
    #[arg(long, default_value_t = 2.0)]
    min_leaf: f64,
    /// Internal cross-validation folds of CART's pruning.
    #[arg(long, default_value_t = 5)]
    folds_internal: usize,
    /// Disable CART's one-standard-error subtree selection.
    #[arg(long)]
    no_1se: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Generate seeded synthetic student enrolment data.
    Gen {
        #[arg(long)]
        seed: Option<u64>,
        /// Number of instances.
        #[arg(long)]
        n: usize,
        /// Output ARFF file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a model and write it as JSON.
    Train {
        #[arg(long, value_enum)]
        algo: Algo,
        /// Input ARFF file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Output model file.
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Class attribute name; the last attribute when omitted.
        #[arg(long)]
        class: Option<String>,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Print the decision rules of a stored model.
    Rules {
        #[arg(long)]
        model: PathBuf,
    },
    /// Cross-validate an algorithm and print the evaluation report.
    Eval {
        #[arg(long, value_enum)]
        algo: Algo,
        /// Input ARFF file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Number of folds.
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Emit the report as JSON instead of text.
        #[arg(long)]
        json: bool,
        /// Plain folding instead of stratified folding.
        #[arg(long)]
        no_stratify: bool,
        /// Class attribute name; the last attribute when omitted.
        #[arg(long)]
        class: Option<String>,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Bin numeric mark columns into the O..F grade bands.
    Bin {
        /// Input ARFF file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Output ARFF file.
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated column names; every numeric column when omitted.
        #[arg(long)]
        cols: Option<String>,
    },
}

/// Parses `argv` and runs the requested command, returning the process
/// exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn execute(command: Command) -> Result<(), String> {
    match command {
        Command::Gen { seed, n, out } => {
            if n == 0 {
                return Err("--n must be at least 1".to_string());
            }
            let seed = resolve_seed(seed)?;
            let d = generate_synthetic(seed, n);
            write_text(&out, &serialize_arff(&d))?;
            eprintln!("wrote {} instances to {}", d.len(), out.display());
            Ok(())
        }
        Command::Train {
            algo,
            input,
            model,
            seed,
            class,
            tuning,
        } => {
            let seed = resolve_seed(seed)?;
            let d = load_dataset(&input, class.as_deref())?;
            let inducer = make_inducer(algo, &tuning, seed);
            let tree = inducer.induce(&d).map_err(|e| e.to_string())?;
            write_text(&model, &tree.to_json())?;
            let (internal, leaves) = tree.node_count();
            eprintln!(
                "trained {} model ({internal} internal nodes, {leaves} leaves) -> {}",
                tree.algorithm().name(),
                model.display()
            );
            Ok(())
        }
        Command::Rules { model } => {
            let tree = DecisionTree::from_json(&read_text(&model)?).map_err(|e| e.to_string())?;
            print!("{}", tree.render_rules());
            Ok(())
        }
        Command::Eval {
            algo,
            input,
            k,
            seed,
            json,
            no_stratify,
            class,
            tuning,
        } => {
            let seed = resolve_seed(seed)?;
            let d = load_dataset(&input, class.as_deref())?;
            let inducer = make_inducer(algo, &tuning, seed);
            let report =
                cross_validate(&inducer, &d, k, seed, !no_stratify).map_err(|e| e.to_string())?;
            if json {
                let doc = serde_json::to_string_pretty(&report)
                    .map_err(|e| format!("report serialization failed: {e}"))?;
                println!("{doc}");
            } else {
                print!("{}", render_report(&report));
            }
            Ok(())
        }
        Command::Bin { input, out, cols } => {
            let d = load_dataset(&input, None)?;
            let binned = bin_columns(&d, cols.as_deref())?;
            write_text(&out, &serialize_arff(&binned))?;
            eprintln!("wrote binned data to {}", out.display());
            Ok(())
        }
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, String> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("TREELAB_SEED") {
        Ok(text) => text
            .parse::<u64>()
            .map_err(|_| format!("TREELAB_SEED must be an unsigned integer, got '{text}'")),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn make_inducer(algo: Algo, tuning: &Tuning, seed: u64) -> Inducer {
    match algo {
        Algo::Id3 => Inducer::Id3,
        Algo::C45 => Inducer::C45(C45Config {
            confidence_factor: tuning.cf,
            min_leaf_weight: tuning.min_leaf,
        }),
        Algo::Cart => Inducer::Cart(CartConfig {
            internal_folds: tuning.folds_internal,
            one_se_rule: !tuning.no_1se,
            min_leaf_weight: tuning.min_leaf,
            seed,
            ..CartConfig::default()
        }),
    }
}

fn load_dataset(path: &Path, class: Option<&str>) -> Result<Dataset, String> {
    let d = parse_arff(&read_text(path)?).map_err(|e| format!("{}: {e}", path.display()))?;
    match class {
        None => Ok(d),
        Some(name) => {
            let index = d
                .attribute_index(name)
                .ok_or_else(|| format!("no attribute named '{name}'"))?;
            d.with_class_index(index).map_err(|e| e.to_string())
        }
    }
}

/// Replaces numeric mark columns by their O..F grade bands.
fn bin_columns(d: &Dataset, cols: Option<&str>) -> Result<Dataset, String> {
    let selected: Vec<usize> = match cols {
        None => (0..d.schema().len())
            .filter(|i| !d.attribute(*i).is_nominal())
            .collect(),
        Some(list) => {
            let mut indices = Vec::new();
            for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let index = d
                    .attribute_index(name)
                    .ok_or_else(|| format!("no attribute named '{name}'"))?;
                if d.attribute(index).is_nominal() {
                    return Err(format!("attribute '{name}' is not numeric"));
                }
                indices.push(index);
            }
            indices
        }
    };
    if selected.is_empty() {
        return Err("no numeric columns to bin".to_string());
    }

    let schema: Vec<AttributeSpec> = d
        .schema()
        .iter()
        .enumerate()
        .map(|(i, attr)| {
            if selected.contains(&i) {
                AttributeSpec {
                    name: attr.name.clone(),
                    kind: AttributeKind::Nominal(
                        Grade::LABELS.iter().map(|s| s.to_string()).collect(),
                    ),
                }
            } else {
                attr.clone()
            }
        })
        .collect();
    let instances = d
        .instances()
        .iter()
        .map(|inst| {
            let cells = inst
                .cells
                .iter()
                .enumerate()
                .map(|(i, cell)| match (selected.contains(&i), cell) {
                    (true, Cell::Number(x)) => {
                        let grade = bin_grade(*x)
                            .map_err(|e| format!("attribute '{}': {e}", d.attribute(i).name))?;
                        Ok(Cell::Nominal(grade as usize))
                    }
                    _ => Ok(*cell),
                })
                .collect::<Result<Vec<Cell>, String>>()?;
            Ok(crate::dataset::Instance::weighted(cells, inst.weight))
        })
        .collect::<Result<Vec<_>, String>>()?;
    Dataset::new(d.relation(), schema, d.class_index(), instances).map_err(|e| e.to_string())
}

fn read_text(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_text(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}
