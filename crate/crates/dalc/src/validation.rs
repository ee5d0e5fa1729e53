//! Hyperparameter selection by reverse cross-validation.
//!
//! Without target labels, ordinary cross-validation cannot score a model.
//! The reverse protocol scores a hyperparameter cell (C, B) through a
//! round-trip instead. Per source fold:
//!
//! 1. train a forward model on the source training split plus the unlabeled
//!    target sample;
//! 2. label the target sample with that model's own predictions;
//! 3. train a reverse model that treats the self-labeled target as its
//!    labeled source and the source training split (labels removed) as its
//!    unlabeled target;
//! 4. score the reverse model's zero-one error on the held-out source fold.
//!
//! The cell's risk is the mean over folds. The intuition: hyperparameters
//! that adapt well in both directions transport label structure without
//! destroying it. The fold split is seeded and shared across grid cells, so
//! cells are directly comparable and the whole search is deterministic.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{DalcError, Result};
use crate::estimators::empirical_vote_risk;
use crate::kernels::KernelSpec;
use crate::model::train;
use crate::objective::DalcHyperparams;
use crate::optimizer::OptimizerConfig;

/// `n` logarithmically spaced values from `lo` to `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite()) || lo <= 0.0 || hi < lo {
        return Err(DalcError::invalid(
            "range",
            format!("need 0 < lo <= hi, got [{lo}, {hi}]"),
        ));
    }
    if n == 0 {
        return Err(DalcError::invalid("n", "need at least one grid value"));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let (l0, l1) = (lo.log10(), hi.log10());
    Ok((0..n)
        .map(|i| 10f64.powf(l0 + (l1 - l0) * i as f64 / (n - 1) as f64))
        .collect())
}

/// The hyperparameter grid for [`grid_search`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub c_values: Vec<f64>,
    pub b_values: Vec<f64>,
}

impl Default for GridSpec {
    /// 20 log-spaced values of C in [0.01, 10⁶] and of B in [1, 10⁸].
    fn default() -> Self {
        GridSpec {
            c_values: log_spaced(0.01, 1e6, 20).expect("static range is valid"),
            b_values: log_spaced(1.0, 1e8, 20).expect("static range is valid"),
        }
    }
}

impl GridSpec {
    /// The default ranges at a custom per-axis resolution.
    pub fn with_resolution(n: usize) -> Result<Self> {
        Ok(GridSpec {
            c_values: log_spaced(0.01, 1e6, n)?,
            b_values: log_spaced(1.0, 1e8, n)?,
        })
    }

    pub fn validate(&self) -> Result<()> {
        for (name, values) in [("c_values", &self.c_values), ("b_values", &self.b_values)] {
            if values.is_empty() {
                return Err(DalcError::EmptySample("hyperparameter grid"));
            }
            if values.iter().any(|v| !v.is_finite() || *v <= 0.0) {
                return Err(DalcError::invalid(name, "grid values must be positive"));
            }
        }
        Ok(())
    }
}

/// Seeded shuffled partition of `0..m` into `folds` chunks whose sizes
/// differ by at most one. Every index appears in exactly one chunk.
fn fold_partition(m: usize, folds: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut indices: Vec<usize> = (0..m).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    let base = m / folds;
    let extra = m % folds;
    let mut out = Vec::with_capacity(folds);
    let mut at = 0;
    for f in 0..folds {
        let size = base + usize::from(f < extra);
        out.push(indices[at..at + size].to_vec());
        at += size;
    }
    out
}

fn single_class(labels: &[f64]) -> bool {
    labels.windows(2).all(|w| w[0] == w[1])
}

/// Estimated target-domain risk of the hyperparameter pair by the reverse
/// protocol described in the module docs. Folds whose training split ends up
/// single-class are skipped with a warning on stderr; if every fold is
/// degenerate the call fails.
pub fn reverse_validation_risk(
    source: &Dataset,
    target: &Dataset,
    kernel: KernelSpec,
    hp: DalcHyperparams,
    opt: &OptimizerConfig,
    folds: usize,
    seed: u64,
) -> Result<f64> {
    if folds < 2 {
        return Err(DalcError::invalid("folds", "need at least 2"));
    }
    if source.len() < folds {
        return Err(DalcError::invalid(
            "folds",
            format!("{} folds but only {} source points", folds, source.len()),
        ));
    }
    if !source.is_labeled() {
        return Err(DalcError::invalid("source", "must be labeled"));
    }

    let partition = fold_partition(source.len(), folds, seed);
    let mut total = 0.0;
    let mut evaluated = 0usize;
    for (f, held_out_idx) in partition.iter().enumerate() {
        let train_idx: Vec<usize> = partition
            .iter()
            .enumerate()
            .filter(|(g, _)| g != &f)
            .flat_map(|(_, chunk)| chunk.iter().copied())
            .collect();
        let source_train = source.subset(&train_idx);
        if single_class(source_train.labels().expect("subset keeps labels")) {
            eprintln!(
                "warning: skipping fold {}/{folds}: training split has a single class",
                f + 1
            );
            continue;
        }

        let forward = train(&source_train, target, kernel, hp, opt)?;
        let mut self_labels = Vec::with_capacity(target.len());
        for i in 0..target.len() {
            self_labels.push(forward.predict(target.point(i))?);
        }
        let reverse_source = target.with_labels(self_labels)?;
        let reverse_target = source_train.strip_labels();
        let reverse = train(&reverse_source, &reverse_target, kernel, hp, opt)?;

        let held_out = source.subset(held_out_idx);
        total += empirical_vote_risk(&reverse, &held_out)?;
        evaluated += 1;
    }
    if evaluated == 0 {
        return Err(DalcError::AllFoldsDegenerate);
    }
    Ok(total / evaluated as f64)
}

/// Outcome of a reverse-validation grid search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReverseValidationReport {
    /// `risks[i][j]` is the estimated risk at `c_values[i]`, `b_values[j]`.
    pub risks: Vec<Vec<f64>>,
    pub c_values: Vec<f64>,
    pub b_values: Vec<f64>,
    pub selected_c: f64,
    pub selected_b: f64,
    pub folds: usize,
    pub seed: u64,
}

impl ReverseValidationReport {
    pub fn selected_hyperparams(&self) -> Result<DalcHyperparams> {
        DalcHyperparams::new(self.selected_c, self.selected_b)
    }
}

/// Score every (C, B) cell with [`reverse_validation_risk`] under a shared
/// fold split and select the minimum; ties resolve to the smallest B, then
/// the smallest C.
pub fn grid_search(
    source: &Dataset,
    target: &Dataset,
    kernel: KernelSpec,
    grid: &GridSpec,
    opt: &OptimizerConfig,
    folds: usize,
    seed: u64,
) -> Result<ReverseValidationReport> {
    grid.validate()?;
    let mut risks = Vec::with_capacity(grid.c_values.len());
    let mut best: Option<(f64, f64, f64)> = None; // (risk, b, c)
    for &c in &grid.c_values {
        let mut row = Vec::with_capacity(grid.b_values.len());
        for &b in &grid.b_values {
            let hp = DalcHyperparams::new(c, b)?;
            let risk = reverse_validation_risk(source, target, kernel, hp, opt, folds, seed)?;
            row.push(risk);
            let better = match best {
                None => true,
                Some((r, bb, bc)) => {
                    risk < r || (risk == r && (b < bb || (b == bb && c < bc)))
                }
            };
            if better {
                best = Some((risk, b, c));
            }
        }
        risks.push(row);
    }
    let (_, selected_b, selected_c) = best.expect("grid checked nonempty");
    Ok(ReverseValidationReport {
        risks,
        c_values: grid.c_values.clone(),
        b_values: grid.b_values.clone(),
        selected_c,
        selected_b,
        folds,
        seed,
    })
}
