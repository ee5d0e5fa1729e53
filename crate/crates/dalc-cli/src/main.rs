//! Command-line interface for the domain adaptation toolkit.
//!
//! Subcommands: `train`, `predict`, `bounds`, `reverse-cv`, `moons`.
//! Exit codes: 0 success, 1 runtime failure, 2 usage error.
//! Every run writes a JSON run report alongside its primary outputs.

use std::collections::BTreeMap;
use std::io::BufRead;
use std::path::{Path, PathBuf};
use std::process::exit;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use dalc::bounds::{da_generalization_bound, sweep_bound, BoundInputs, BoundReport, BoundSweep};
use dalc::data::{self, Dataset, FeatureVector, MoonsConfig};
use dalc::estimators::{
    empirical_disagreement, empirical_gibbs_risk, empirical_joint_error, empirical_vote_risk,
};
use dalc::kernels::KernelSpec;
use dalc::model::{train, train_primal, DalcModel};
use dalc::objective::DalcHyperparams;
use dalc::optimizer::OptimizerConfig;
use dalc::validation::{grid_search, log_spaced, GridSpec};
use dalc::Result;

#[derive(Parser)]
#[command(
    name = "dalc",
    version,
    about = "Domain adaptation for linear and kernelized classifiers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a classifier from a labeled source sample and an unlabeled
    /// target sample.
    Train(TrainArgs),
    /// Apply a saved model to a data file.
    Predict(PredictArgs),
    /// Compute generalization-bound certificates for a saved model.
    Bounds(BoundsArgs),
    /// Select hyperparameters by reverse cross-validation over a grid.
    ReverseCv(ReverseCvArgs),
    /// Generate the two-moons synthetic adaptation problem.
    Moons(MoonsArgs),
}

#[derive(Copy, Clone, ValueEnum)]
enum KernelArg {
    Linear,
    Rbf,
}

#[derive(Args)]
struct TrainArgs {
    /// Labeled source data (.csv with a label column, or sparse text).
    #[arg(long)]
    source: PathBuf,
    /// Unlabeled target data (labels, if present, are ignored).
    #[arg(long)]
    target: PathBuf,
    #[arg(long, value_enum)]
    kernel: KernelArg,
    /// RBF kernel width (required with --kernel rbf).
    #[arg(long)]
    gamma: Option<f64>,
    /// Weight of the source joint-error term.
    #[arg(long = "B")]
    b: f64,
    /// Weight of the target disagreement term (0 drops it: source-only baseline).
    #[arg(long = "C")]
    c: f64,
    /// Optimize weights directly instead of the kernelized dual (linear only).
    #[arg(long)]
    primal: bool,
    #[arg(long, default_value_t = 1000)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Where to write the model JSON.
    #[arg(long)]
    out: PathBuf,
    /// Name of the CSV label column, when the file has one.
    #[arg(long, default_value = "label")]
    label_column: String,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Where to write predictions, one ±1 per line.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "label")]
    label_column: String,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    model: PathBuf,
    /// Labeled source data.
    #[arg(long)]
    source: PathBuf,
    /// Target data (labels ignored).
    #[arg(long)]
    target: PathBuf,
    /// Source-side concentration parameter.
    #[arg(long)]
    b: f64,
    /// Target-side concentration parameter.
    #[arg(long)]
    c: f64,
    /// The certificates hold with probability at least 1 - delta.
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Worst-case domain divergence.
    #[arg(long, default_value_t = 1.0)]
    beta_inf: f64,
    /// Non-adaptable mass.
    #[arg(long, default_value_t = 0.0)]
    eta: f64,
    /// Divergence order used by the population-level bound (number or "inf").
    #[arg(long)]
    q: Option<String>,
    /// Sweep grid for b, as lo:hi:count (log-spaced; requires --sweep-c).
    #[arg(long)]
    sweep_b: Option<String>,
    /// Sweep grid for c, as lo:hi:count (log-spaced; requires --sweep-b).
    #[arg(long)]
    sweep_c: Option<String>,
    /// Where to write the certificate JSON.
    #[arg(long, default_value = "bounds.json")]
    out: PathBuf,
    #[arg(long, default_value = "label")]
    label_column: String,
}

#[derive(Args)]
struct ReverseCvArgs {
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    target: PathBuf,
    #[arg(long, value_enum)]
    kernel: KernelArg,
    #[arg(long)]
    gamma: Option<f64>,
    /// C grid as lo:hi:count, log-spaced (default 0.01:1e6:20).
    #[arg(long)]
    grid_c: Option<String>,
    /// B grid as lo:hi:count, log-spaced (default 1:1e8:20).
    #[arg(long)]
    grid_b: Option<String>,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Directory for the risk matrix, selection JSON, and retrained model.
    #[arg(long, default_value = "reverse_cv_out")]
    out_dir: PathBuf,
    #[arg(long, default_value = "label")]
    label_column: String,
}

#[derive(Args)]
struct MoonsArgs {
    /// Points per domain.
    #[arg(long, default_value_t = 300)]
    n: usize,
    /// Isotropic Gaussian noise standard deviation.
    #[arg(long, default_value_t = 0.1)]
    noise: f64,
    /// Rotation of the target sample, in degrees.
    #[arg(long, default_value_t = 30.0)]
    rotation: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for the generated CSV files.
    #[arg(long, default_value = "moons_out")]
    out_dir: PathBuf,
    /// Also train an adaptive model and a source-only baseline and report
    /// their target errors against the oracle labels.
    #[arg(long)]
    run_experiment: bool,
}

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Train(args) => run_train(args, &argv),
        Command::Predict(args) => run_predict(args, &argv),
        Command::Bounds(args) => run_bounds(args, &argv),
        Command::ReverseCv(args) => run_reverse_cv(args, &argv),
        Command::Moons(args) => run_moons(args, &argv),
    };
    if let Err(e) = outcome {
        eprintln!("error: {e}");
        exit(1);
    }
}

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

/// Report a bad flag combination or value and exit with the usage code.
fn usage_error(message: &str) -> ! {
    eprintln!("error: {message}");
    exit(2);
}

fn resolve_kernel(kernel: KernelArg, gamma: Option<f64>) -> KernelSpec {
    match kernel {
        KernelArg::Linear => {
            if gamma.is_some() {
                usage_error("--gamma only applies to the rbf kernel");
            }
            KernelSpec::Linear
        }
        KernelArg::Rbf => {
            let gamma =
                gamma.unwrap_or_else(|| usage_error("the rbf kernel requires --gamma"));
            if !gamma.is_finite() || gamma <= 0.0 {
                usage_error("--gamma must be a positive finite number");
            }
            KernelSpec::Rbf { gamma }
        }
    }
}

fn kernel_config_json(kernel: KernelSpec) -> Value {
    match kernel {
        KernelSpec::Linear => json!({ "kernel": "linear" }),
        KernelSpec::Rbf { gamma } => json!({ "kernel": "rbf", "gamma": gamma }),
    }
}

fn resolve_hyperparams(c: f64, b: f64) -> DalcHyperparams {
    if !c.is_finite() || c < 0.0 {
        usage_error("--C must be finite and >= 0 (0 drops the disagreement term)");
    }
    if !b.is_finite() || b <= 0.0 {
        usage_error("--B must be finite and > 0");
    }
    let built = if c == 0.0 {
        DalcHyperparams::source_only(b)
    } else {
        DalcHyperparams::new(c, b)
    };
    built.unwrap_or_else(|e| usage_error(&e.to_string()))
}

fn resolve_optimizer(max_iter: usize, tol: f64) -> OptimizerConfig {
    let opt = OptimizerConfig {
        max_iterations: max_iter,
        gradient_tolerance: tol,
        ..OptimizerConfig::default()
    };
    if let Err(e) = opt.validate() {
        usage_error(&e.to_string());
    }
    opt
}

fn csv_has_column(path: &Path, name: &str) -> Result<bool> {
    let file = std::fs::File::open(path)?;
    let mut header = String::new();
    std::io::BufReader::new(file).read_line(&mut header)?;
    Ok(header
        .trim_end()
        .split(',')
        .map(str::trim)
        .any(|c| c == name))
}

/// Load a data file: `.csv` as dense CSV (using `label_column` when the
/// header has it), anything else as the sparse text format.
fn load_dataset(path: &Path, label_column: &str) -> Result<Dataset> {
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        let labeled = csv_has_column(path, label_column)?;
        data::load_csv(path, labeled.then_some(label_column))
    } else {
        data::load_sparse(path)
    }
}

/// Parse a `lo:hi:count` flag into a log-spaced grid axis.
fn parse_grid_axis(spec: &str, flag: &str) -> Vec<f64> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || -> ! { usage_error(&format!("{flag} expects lo:hi:count, got `{spec}`")) };
    if parts.len() != 3 {
        bad();
    }
    let lo: f64 = parts[0].parse().unwrap_or_else(|_| bad());
    let hi: f64 = parts[1].parse().unwrap_or_else(|_| bad());
    let count: usize = parts[2].parse().unwrap_or_else(|_| bad());
    log_spaced(lo, hi, count).unwrap_or_else(|e| usage_error(&e.to_string()))
}

/// Format with 4 significant digits for console tables.
fn sig4(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let magnitude = v.abs().log10().floor() as i32;
    if !(-3..6).contains(&magnitude) {
        return format!("{v:.3e}");
    }
    let decimals = (3 - magnitude).max(0) as usize;
    format!("{v:.decimals$}")
}

#[derive(Serialize)]
struct RunReport {
    format_version: u32,
    command: String,
    argv: Vec<String>,
    config: Value,
    timings_ms: BTreeMap<String, f64>,
    outputs: Vec<String>,
    metrics: Value,
}

impl RunReport {
    fn new(command: &str, argv: &[String], config: Value) -> Self {
        RunReport {
            format_version: 1,
            command: command.to_string(),
            argv: argv.to_vec(),
            config,
            timings_ms: BTreeMap::new(),
            outputs: Vec::new(),
            metrics: Value::Null,
        }
    }

    fn time(&mut self, name: &str, since: Instant) {
        self.timings_ms
            .insert(name.to_string(), since.elapsed().as_secs_f64() * 1e3);
    }

    fn output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    fn write(mut self, path: &Path, started: Instant) -> Result<()> {
        self.time("total", started);
        self.output(path);
        let text = serde_json::to_string_pretty(&self).expect("report serializes");
        std::fs::write(path, text + "\n")?;
        Ok(())
    }
}

/// `model.json` → `model.report.json`.
fn report_path_for(primary: &Path) -> PathBuf {
    primary.with_extension("report.json")
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

fn run_train(args: TrainArgs, argv: &[String]) -> Result<()> {
    let started = Instant::now();
    let kernel = resolve_kernel(args.kernel, args.gamma);
    if args.primal && !matches!(kernel, KernelSpec::Linear) {
        usage_error("--primal requires the linear kernel");
    }
    let hp = resolve_hyperparams(args.c, args.b);
    let opt = resolve_optimizer(args.max_iter, args.tol);

    let mut config = kernel_config_json(kernel);
    let extra = json!({
        "source": args.source.display().to_string(),
        "target": args.target.display().to_string(),
        "B": hp.b(), "C": hp.c(), "primal": args.primal,
        "max_iter": args.max_iter, "tol": args.tol,
    });
    merge_json(&mut config, extra);
    let mut report = RunReport::new("train", argv, config);

    let source = load_dataset(&args.source, &args.label_column)?;
    let target = load_dataset(&args.target, &args.label_column)?.strip_labels();
    report.time("load", started);

    let train_started = Instant::now();
    let model = if args.primal {
        train_primal(&source, &target, hp, &opt)?
    } else {
        train(&source, &target, kernel, hp, &opt)?
    };
    report.time("train", train_started);

    let d_hat = empirical_disagreement(&model, &target)?;
    let e_hat = empirical_joint_error(&model, &source)?;
    let kl = model.kl_divergence()?;
    model.save(&args.out)?;
    report.output(&args.out);

    let trace = model.trace();
    let final_objective = *trace
        .objective_values
        .last()
        .expect("trace has at least the starting value");
    println!(
        "trained {} model in {} iterations ({}), final objective {}",
        if args.primal { "primal" } else { "dual" },
        trace.iterations,
        if trace.converged {
            "converged"
        } else {
            "iteration cap reached"
        },
        sig4(final_objective),
    );
    println!(
        "target disagreement {}   source joint error {}   KL {}",
        sig4(d_hat),
        sig4(e_hat),
        sig4(kl)
    );
    println!("model written to {}", args.out.display());

    report.metrics = json!({
        "final_objective": final_objective,
        "iterations": trace.iterations,
        "converged": trace.converged,
        "final_gradient_norm": trace.final_gradient_norm,
        "disagreement_target": d_hat,
        "joint_error_source": e_hat,
        "kl_divergence": kl,
        "m_s": source.len(),
        "m_t": target.len(),
    });
    report.write(&report_path_for(&args.out), started)
}

fn merge_json(base: &mut Value, extra: Value) {
    if let (Value::Object(base), Value::Object(extra)) = (base, extra) {
        base.extend(extra);
    }
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

fn run_predict(args: PredictArgs, argv: &[String]) -> Result<()> {
    let started = Instant::now();
    let config = json!({
        "model": args.model.display().to_string(),
        "data": args.data.display().to_string(),
    });
    let mut report = RunReport::new("predict", argv, config);

    let model = DalcModel::load(&args.model)?;
    let dataset = load_dataset(&args.data, &args.label_column)?;

    let mut lines = String::new();
    for i in 0..dataset.len() {
        let label = model.predict(dataset.point(i))?;
        lines.push_str(if label > 0.0 { "+1\n" } else { "-1\n" });
    }
    std::fs::write(&args.out, lines)?;
    report.output(&args.out);

    let error = if dataset.is_labeled() {
        let e = empirical_vote_risk(&model, &dataset)?;
        println!("zero-one error on {} labeled points: {}", dataset.len(), sig4(e));
        Some(e)
    } else {
        None
    };
    println!(
        "{} predictions written to {}",
        dataset.len(),
        args.out.display()
    );

    report.metrics = json!({ "n": dataset.len(), "zero_one_error": error });
    report.write(&report_path_for(&args.out), started)
}

// ---------------------------------------------------------------------------
// bounds
// ---------------------------------------------------------------------------

fn parse_exponent(raw: &str) -> f64 {
    if raw.eq_ignore_ascii_case("inf") || raw.eq_ignore_ascii_case("infinity") {
        return f64::INFINITY;
    }
    let q: f64 = raw
        .parse()
        .unwrap_or_else(|_| usage_error(&format!("--q expects a number or \"inf\", got `{raw}`")));
    if !(q >= 1.0) {
        usage_error("--q must be at least 1");
    }
    q
}

fn run_bounds(args: BoundsArgs, argv: &[String]) -> Result<()> {
    let started = Instant::now();
    if !args.b.is_finite() || args.b <= 0.0 {
        usage_error("--b must be finite and > 0");
    }
    if !args.c.is_finite() || args.c <= 0.0 {
        usage_error("--c must be finite and > 0");
    }
    if !args.delta.is_finite() || args.delta <= 0.0 || args.delta >= 1.0 {
        usage_error("--delta must lie strictly between 0 and 1");
    }
    if !args.eta.is_finite() || !(0.0..=1.0).contains(&args.eta) {
        usage_error("--eta must lie in [0, 1]");
    }
    if !args.beta_inf.is_finite() || args.beta_inf < 0.0 {
        usage_error("--beta-inf must be finite and >= 0");
    }
    let q = args.q.as_deref().map(parse_exponent);
    let sweep_grids = match (&args.sweep_b, &args.sweep_c) {
        (Some(b), Some(c)) => Some((
            parse_grid_axis(b, "--sweep-b"),
            parse_grid_axis(c, "--sweep-c"),
        )),
        (None, None) => None,
        _ => usage_error("--sweep-b and --sweep-c must be given together"),
    };

    let config = json!({
        "model": args.model.display().to_string(),
        "source": args.source.display().to_string(),
        "target": args.target.display().to_string(),
        "b": args.b, "c": args.c, "delta": args.delta,
        "beta_inf": args.beta_inf, "eta": args.eta,
        "q": args.q, "sweep_b": args.sweep_b, "sweep_c": args.sweep_c,
    });
    let mut report = RunReport::new("bounds", argv, config);

    let model = DalcModel::load(&args.model)?;
    let source = load_dataset(&args.source, &args.label_column)?;
    let target = load_dataset(&args.target, &args.label_column)?;
    if !source.is_labeled() {
        return Err(dalc::DalcError::InvalidParameter {
            name: "source",
            reason: "must be labeled".to_string(),
        });
    }

    let d_hat = empirical_disagreement(&model, &target)?;
    let e_hat = empirical_joint_error(&model, &source)?;
    let gibbs_hat = empirical_gibbs_risk(&model, &source)?;
    let kl = model.kl_divergence()?;

    let inputs = BoundInputs {
        d_hat,
        e_hat,
        kl,
        m_s: source.len(),
        m_t: target.len(),
        b: args.b,
        c: args.c,
        delta: args.delta,
        beta_inf: args.beta_inf,
        eta: args.eta,
        q,
    };
    let bounds = da_generalization_bound(&inputs, Some(gibbs_hat))?;
    let sweep = match sweep_grids {
        Some((b_grid, c_grid)) => Some(sweep_bound(&inputs, &b_grid, &c_grid)?),
        None => None,
    };

    print_bounds_table(&bounds, gibbs_hat, sweep.as_ref());

    let payload = json!({ "bounds": bounds, "sweep": sweep });
    std::fs::write(
        &args.out,
        serde_json::to_string_pretty(&payload).expect("bounds serialize") + "\n",
    )?;
    report.output(&args.out);
    println!("certificates written to {}", args.out.display());

    report.metrics = payload;
    report.write(&report_path_for(&args.out), started)
}

fn print_bounds_table(bounds: &BoundReport, gibbs_hat: f64, sweep: Option<&BoundSweep>) {
    let row = |label: &str, value: String| println!("  {label:<38}{value}");
    println!("empirical estimates");
    row("target disagreement d_T", sig4(bounds.inputs.d_hat));
    row("source joint error e_S", sig4(bounds.inputs.e_hat));
    row("source Gibbs risk", sig4(gibbs_hat));
    row("KL divergence", sig4(bounds.inputs.kl));
    println!("certificates (hold with prob >= {})", sig4(1.0 - bounds.inputs.delta));
    row("population-level bound", sig4(bounds.ideal_da_bound));
    row("target disagreement bound", sig4(bounds.disagreement_bound));
    row("source joint error bound", sig4(bounds.joint_error_bound));
    if let Some(gb) = bounds.source_gibbs_bound {
        row("source Gibbs risk bound", sig4(gb));
    }
    row("target Gibbs risk bound", sig4(bounds.gibbs_da_bound));
    row("target majority vote bound", sig4(bounds.majority_vote_da_bound));
    if let Some(sweep) = sweep {
        println!(
            "sweep: best (b, c) = ({}, {}) with target Gibbs bound {}",
            sig4(sweep.best_b),
            sig4(sweep.best_c),
            sig4(sweep.best_report.gibbs_da_bound)
        );
        println!("note: {}", sweep.note);
    }
}

// ---------------------------------------------------------------------------
// reverse-cv
// ---------------------------------------------------------------------------

fn run_reverse_cv(args: ReverseCvArgs, argv: &[String]) -> Result<()> {
    let started = Instant::now();
    let kernel = resolve_kernel(args.kernel, args.gamma);
    let opt = resolve_optimizer(args.max_iter, args.tol);
    let defaults = GridSpec::default();
    let grid = GridSpec {
        c_values: args
            .grid_c
            .as_deref()
            .map(|s| parse_grid_axis(s, "--grid-c"))
            .unwrap_or(defaults.c_values),
        b_values: args
            .grid_b
            .as_deref()
            .map(|s| parse_grid_axis(s, "--grid-b"))
            .unwrap_or(defaults.b_values),
    };

    let mut config = kernel_config_json(kernel);
    merge_json(
        &mut config,
        json!({
            "source": args.source.display().to_string(),
            "target": args.target.display().to_string(),
            "c_values": grid.c_values, "b_values": grid.b_values,
            "folds": args.folds, "seed": args.seed,
            "max_iter": args.max_iter, "tol": args.tol,
        }),
    );
    let mut report = RunReport::new("reverse-cv", argv, config);

    let source = load_dataset(&args.source, &args.label_column)?;
    let target = load_dataset(&args.target, &args.label_column)?.strip_labels();
    std::fs::create_dir_all(&args.out_dir)?;

    let search_started = Instant::now();
    let selection = grid_search(
        &source,
        &target,
        kernel,
        &grid,
        &opt,
        args.folds,
        args.seed,
    )?;
    report.time("grid_search", search_started);

    let matrix_path = args.out_dir.join("risk_matrix.csv");
    write_risk_matrix(&selection.risks, &selection.c_values, &selection.b_values, &matrix_path)?;
    report.output(&matrix_path);

    let selection_path = args.out_dir.join("selection.json");
    std::fs::write(
        &selection_path,
        serde_json::to_string_pretty(&selection).expect("selection serializes") + "\n",
    )?;
    report.output(&selection_path);

    let retrain_started = Instant::now();
    let hp = selection.selected_hyperparams()?;
    let best_model = train(&source, &target, kernel, hp, &opt)?;
    report.time("retrain", retrain_started);
    let model_path = args.out_dir.join("best_model.json");
    best_model.save(&model_path)?;
    report.output(&model_path);

    let best_risk = selection
        .risks
        .iter()
        .flatten()
        .copied()
        .fold(f64::INFINITY, f64::min);
    println!(
        "selected C = {}, B = {} with estimated target risk {} ({} folds, seed {})",
        sig4(selection.selected_c),
        sig4(selection.selected_b),
        sig4(best_risk),
        args.folds,
        args.seed
    );
    println!("outputs written to {}", args.out_dir.display());

    report.metrics = json!({
        "selected_c": selection.selected_c,
        "selected_b": selection.selected_b,
        "estimated_risk": best_risk,
        "cells": selection.c_values.len() * selection.b_values.len(),
    });
    report.write(&args.out_dir.join("run_report.json"), started)
}

fn write_risk_matrix(
    risks: &[Vec<f64>],
    c_values: &[f64],
    b_values: &[f64],
    path: &Path,
) -> Result<()> {
    let mut out = String::from("c\\b");
    for b in b_values {
        out.push_str(&format!(",{b}"));
    }
    out.push('\n');
    for (i, c) in c_values.iter().enumerate() {
        out.push_str(&format!("{c}"));
        for r in &risks[i] {
            out.push_str(&format!(",{r}"));
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// moons
// ---------------------------------------------------------------------------

fn run_moons(args: MoonsArgs, argv: &[String]) -> Result<()> {
    let started = Instant::now();
    let config = MoonsConfig {
        n_per_domain: args.n,
        noise: args.noise,
        rotation_degrees: args.rotation,
        seed: args.seed,
    };
    let mut report = RunReport::new(
        "moons",
        argv,
        json!({
            "n_per_domain": args.n, "noise": args.noise,
            "rotation_degrees": args.rotation, "seed": args.seed,
            "run_experiment": args.run_experiment,
        }),
    );

    let (source, target, oracle) = data::make_moons(&config)?;
    std::fs::create_dir_all(&args.out_dir)?;

    let source_path = args.out_dir.join("source.csv");
    write_points_csv(&source, source.labels(), &source_path)?;
    let target_path = args.out_dir.join("target.csv");
    write_points_csv(&target, None, &target_path)?;
    let oracle_path = args.out_dir.join("target_oracle.csv");
    write_points_csv(&target, Some(&oracle), &oracle_path)?;
    for p in [&source_path, &target_path, &oracle_path] {
        report.output(p);
    }
    println!(
        "wrote {} source and {} target points to {}",
        source.len(),
        target.len(),
        args.out_dir.display()
    );

    let mut metrics = json!({ "m_s": source.len(), "m_t": target.len() });
    if args.run_experiment {
        let experiment_started = Instant::now();
        let kernel = KernelSpec::Rbf { gamma: 1.0 };
        let opt = OptimizerConfig::default();
        let adaptive = train(
            &source,
            &target,
            kernel,
            DalcHyperparams::new(1.0, 1.0)?,
            &opt,
        )?;
        let baseline = train(
            &source,
            &target,
            kernel,
            DalcHyperparams::source_only(1.0)?,
            &opt,
        )?;
        report.time("experiment_train", experiment_started);

        let oracle_target = target.with_labels(oracle.clone())?;
        let adaptive_error = empirical_vote_risk(&adaptive, &oracle_target)?;
        let baseline_error = empirical_vote_risk(&baseline, &oracle_target)?;
        println!(
            "target error vs oracle labels: adaptive {}, source-only baseline {}",
            sig4(adaptive_error),
            sig4(baseline_error)
        );

        let (x1_range, x2_range) = bounding_box(&[&source, &target], 0.3);
        let adaptive_grid = args.out_dir.join("decision_grid_adaptive.csv");
        data::export_decision_grid(&adaptive, x1_range, x2_range, 101, &adaptive_grid)?;
        let baseline_grid = args.out_dir.join("decision_grid_baseline.csv");
        data::export_decision_grid(&baseline, x1_range, x2_range, 101, &baseline_grid)?;
        report.output(&adaptive_grid);
        report.output(&baseline_grid);

        merge_json(
            &mut metrics,
            json!({
                "adaptive_target_error": adaptive_error,
                "baseline_target_error": baseline_error,
                "experiment": { "kernel": "rbf", "gamma": 1.0, "B": 1.0, "C": 1.0 },
            }),
        );
    }

    report.metrics = metrics;
    report.write(&args.out_dir.join("run_report.json"), started)
}

fn write_points_csv(ds: &Dataset, labels: Option<&[f64]>, path: &Path) -> Result<()> {
    let mut out = String::from(if labels.is_some() { "x1,x2,label\n" } else { "x1,x2\n" });
    for i in 0..ds.len() {
        let FeatureVector::Dense(v) = ds.point(i) else {
            unreachable!("generated moons data is dense");
        };
        out.push_str(&format!("{},{}", v[0], v[1]));
        if let Some(labels) = labels {
            out.push_str(&format!(",{}", labels[i]));
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn bounding_box(sets: &[&Dataset], margin: f64) -> ((f64, f64), (f64, f64)) {
    let (mut lo1, mut hi1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut lo2, mut hi2) = (f64::INFINITY, f64::NEG_INFINITY);
    for ds in sets {
        for i in 0..ds.len() {
            if let FeatureVector::Dense(v) = ds.point(i) {
                lo1 = lo1.min(v[0]);
                hi1 = hi1.max(v[0]);
                lo2 = lo2.min(v[1]);
                hi2 = hi2.max(v[1]);
            }
        }
    }
    ((lo1 - margin, hi1 + margin), (lo2 - margin, hi2 + margin))
}
