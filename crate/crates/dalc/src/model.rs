//! Training, prediction, and serialization of domain-adapted classifiers.
//!
//! Training minimizes the objective from [`crate::objective`] over a labeled
//! source sample and an unlabeled target sample. The default form is the
//! dual (kernelized) one, started from the uniform weight vector
//! `α_i = 1/M`; the primal form over raw features is available for linear
//! classifiers, started from `w = 0`. Training itself is deterministic: no
//! randomness enters the iteration.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, FeatureVector};
use crate::error::{DalcError, Result};
use crate::kernels::{gram, kernel_eval, KernelSpec};
use crate::objective::{
    dual_gradient, dual_objective, primal_gradient, primal_objective, DalcHyperparams,
};
use crate::optimizer::{minimize, OptimizerConfig, OptimizerTrace};

/// Serialization format version written by [`DalcModel::save`].
pub const FORMAT_VERSION: u32 = 1;

/// The trained weights: a raw weight vector, or dual weights over the stored
/// training points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ModelForm {
    Primal {
        weights: Vec<f64>,
    },
    Dual {
        alpha: Vec<f64>,
        support_points: Vec<FeatureVector>,
        kernel: KernelSpec,
    },
}

/// A trained classifier plus the record of how it was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DalcModel {
    form: ModelForm,
    hyperparams: DalcHyperparams,
    trace: OptimizerTrace,
    m_s: usize,
    m_t: usize,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    model: DalcModel,
}

fn check_training_inputs(source: &Dataset, target: &Dataset) -> Result<()> {
    if source.is_empty() {
        return Err(DalcError::EmptySample("source sample"));
    }
    if target.is_empty() {
        return Err(DalcError::EmptySample("target sample"));
    }
    if !source.is_labeled() {
        return Err(DalcError::invalid("source", "must be labeled"));
    }
    if source.dim() != target.dim() {
        return Err(DalcError::DimensionMismatch {
            expected: source.dim(),
            got: target.dim(),
        });
    }
    Ok(())
}

/// Train the dual (kernelized) form from the uniform start `α_i = 1/M`.
pub fn train(
    source: &Dataset,
    target: &Dataset,
    kernel: KernelSpec,
    hp: DalcHyperparams,
    opt: &OptimizerConfig,
) -> Result<DalcModel> {
    check_training_inputs(source, target)?;
    let m = source.len() + target.len();
    let start = vec![1.0 / m as f64; m];
    train_dual_with_start(source, target, kernel, hp, opt, &start)
}

/// Train the dual form from an explicit starting point.
pub fn train_dual_with_start(
    source: &Dataset,
    target: &Dataset,
    kernel: KernelSpec,
    hp: DalcHyperparams,
    opt: &OptimizerConfig,
    start: &[f64],
) -> Result<DalcModel> {
    check_training_inputs(source, target)?;
    let k = gram(kernel, source, target)?;
    let labels = source.labels().expect("source checked labeled").to_vec();
    let (m_s, m_t) = (source.len(), target.len());

    // Surface structural errors (sizes, degenerate diagonal) before handing
    // plain closures to the optimizer; after this, a non-finite value can
    // only mean numeric overflow, which the optimizer handles itself.
    dual_objective(start, &k, &labels, m_s, m_t, &hp)?;

    let f = |a: &[f64]| dual_objective(a, &k, &labels, m_s, m_t, &hp).unwrap_or(f64::NAN);
    let g = |a: &[f64]| {
        dual_gradient(a, &k, &labels, m_s, m_t, &hp)
            .unwrap_or_else(|_| vec![f64::NAN; a.len()])
    };
    let (alpha, trace) = minimize(f, g, start, opt)?;

    let support_points: Vec<FeatureVector> = source
        .points()
        .iter()
        .chain(target.points())
        .cloned()
        .collect();
    Ok(DalcModel {
        form: ModelForm::Dual {
            alpha,
            support_points,
            kernel,
        },
        hyperparams: hp,
        trace,
        m_s,
        m_t,
    })
}

/// Train the primal linear form from `w = 0`.
pub fn train_primal(
    source: &Dataset,
    target: &Dataset,
    hp: DalcHyperparams,
    opt: &OptimizerConfig,
) -> Result<DalcModel> {
    check_training_inputs(source, target)?;
    let start = vec![0.0; source.dim()];
    train_primal_with_start(source, target, hp, opt, &start)
}

/// Train the primal form from an explicit starting point.
pub fn train_primal_with_start(
    source: &Dataset,
    target: &Dataset,
    hp: DalcHyperparams,
    opt: &OptimizerConfig,
    start: &[f64],
) -> Result<DalcModel> {
    check_training_inputs(source, target)?;
    primal_objective(start, source, target, &hp)?;

    let f = |w: &[f64]| primal_objective(w, source, target, &hp).unwrap_or(f64::NAN);
    let g = |w: &[f64]| {
        primal_gradient(w, source, target, &hp).unwrap_or_else(|_| vec![f64::NAN; w.len()])
    };
    let (weights, trace) = minimize(f, g, start, opt)?;

    Ok(DalcModel {
        form: ModelForm::Primal { weights },
        hyperparams: hp,
        trace,
        m_s: source.len(),
        m_t: target.len(),
    })
}

impl DalcModel {
    pub fn form(&self) -> &ModelForm {
        &self.form
    }

    pub fn hyperparams(&self) -> &DalcHyperparams {
        &self.hyperparams
    }

    pub fn trace(&self) -> &OptimizerTrace {
        &self.trace
    }

    pub fn m_s(&self) -> usize {
        self.m_s
    }

    pub fn m_t(&self) -> usize {
        self.m_t
    }

    /// Feature dimension the model expects.
    pub fn dim(&self) -> usize {
        match &self.form {
            ModelForm::Primal { weights } => weights.len(),
            ModelForm::Dual { support_points, .. } => {
                support_points.first().map(|p| p.dim()).unwrap_or(0)
            }
        }
    }

    /// The kernel of a dual model; a primal model is implicitly linear.
    pub fn kernel(&self) -> KernelSpec {
        match &self.form {
            ModelForm::Primal { .. } => KernelSpec::Linear,
            ModelForm::Dual { kernel, .. } => *kernel,
        }
    }

    /// Raw classifier output: `w·x` for the primal form,
    /// `Σ_i α_i k(x_i, x)` for the dual form. The predicted label is the
    /// sign of this value.
    pub fn decision_value(&self, x: &FeatureVector) -> Result<f64> {
        if x.dim() != self.dim() {
            return Err(DalcError::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        match &self.form {
            ModelForm::Primal { weights } => Ok(x.dot_slice(weights)),
            ModelForm::Dual {
                alpha,
                support_points,
                kernel,
            } => {
                let mut sum = 0.0;
                for (a, p) in alpha.iter().zip(support_points) {
                    sum += a * kernel_eval(*kernel, p, x)?;
                }
                Ok(sum)
            }
        }
    }

    /// Predicted label in {-1, +1}; sgn(0) = +1 by convention.
    pub fn predict(&self, x: &FeatureVector) -> Result<f64> {
        let v = self.decision_value(x)?;
        Ok(if v >= 0.0 { 1.0 } else { -1.0 })
    }

    /// The Kullback–Leibler surrogate of the trained weights: `½‖w‖²` for
    /// the primal form, `½αᵀKα` over the support points for the dual form.
    pub fn kl_divergence(&self) -> Result<f64> {
        match &self.form {
            ModelForm::Primal { weights } => {
                Ok(0.5 * weights.iter().map(|x| x * x).sum::<f64>())
            }
            ModelForm::Dual {
                alpha,
                support_points,
                kernel,
            } => {
                let mut quad = 0.0;
                for (i, pi) in support_points.iter().enumerate() {
                    for (j, pj) in support_points.iter().enumerate() {
                        quad += alpha[i] * alpha[j] * kernel_eval(*kernel, pi, pj)?;
                    }
                }
                Ok(0.5 * quad)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match &self.form {
            ModelForm::Primal { weights } => {
                if weights.is_empty() {
                    return Err(DalcError::EmptySample("model weights"));
                }
                if weights.iter().any(|x| !x.is_finite()) {
                    return Err(DalcError::NonFinite("model weights"));
                }
            }
            ModelForm::Dual {
                alpha,
                support_points,
                kernel,
            } => {
                kernel.validate()?;
                if alpha.iter().any(|x| !x.is_finite()) {
                    return Err(DalcError::NonFinite("dual weights"));
                }
                if alpha.len() != support_points.len() {
                    return Err(DalcError::DimensionMismatch {
                        expected: support_points.len(),
                        got: alpha.len(),
                    });
                }
                if support_points.len() != self.m_s + self.m_t {
                    return Err(DalcError::invalid(
                        "support_points",
                        format!(
                            "{} points stored but m_s + m_t = {}",
                            support_points.len(),
                            self.m_s + self.m_t
                        ),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Write the model as versioned JSON. Floating-point values use
    /// shortest round-trip formatting, so a reload is lossless.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = ModelFile {
            format_version: FORMAT_VERSION,
            model: self.clone(),
        };
        let json = serde_json::to_string_pretty(&file)
            .expect("model serialization cannot fail");
        std::fs::write(path, json)?;
        Ok(())
    }

    /// Read a model written by [`DalcModel::save`].
    pub fn load(path: impl AsRef<Path>) -> Result<DalcModel> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let parse_err = |e: &serde_json::Error| DalcError::Parse {
            path: path.display().to_string(),
            line: e.line(),
            message: e.to_string(),
        };
        let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| parse_err(&e))?;
        match value.get("format_version").and_then(|v| v.as_u64()) {
            Some(v) if v == FORMAT_VERSION as u64 => {}
            Some(v) => {
                return Err(DalcError::UnsupportedVersion {
                    found: v as u32,
                    supported: FORMAT_VERSION,
                })
            }
            None => {
                return Err(DalcError::Parse {
                    path: path.display().to_string(),
                    line: 1,
                    message: "missing or non-integer format_version field".to_string(),
                })
            }
        }
        let file: ModelFile = serde_json::from_str(&text).map_err(|e| parse_err(&e))?;
        file.model.validate()?;
        Ok(file.model)
    }
}
