//! Empirical estimators of the quantities the generalization bounds consume:
//! expected disagreement, joint error, Gibbs risk, domain disagreement,
//! zero-one vote risk, and the Monte-Carlo domain-divergence estimate β_q.
//!
//! All sample estimators return means (the bounds are stated over means);
//! the training objective in [`crate::objective`] deliberately uses raw sums
//! instead, with its trade-off weights absorbing sample sizes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, FeatureVector};
use crate::error::{DalcError, Result};
use crate::kernels::kernel_eval;
use crate::losses::{phi_dis_raw, phi_err_raw, phi_raw};
use crate::model::{DalcModel, ModelForm};

/// The model's normalized margin on a point: `w·x/‖x‖` for the primal form
/// and `Σᵢ αᵢ k(xᵢ,x) / √k(x,x)` for the dual form. This is the argument the
/// probit losses expect.
pub fn normalized_margin(model: &DalcModel, x: &FeatureVector) -> Result<f64> {
    match model.form() {
        ModelForm::Primal { weights } => {
            let norm = x.norm();
            if norm == 0.0 {
                return Err(DalcError::invalid("x", "zero-norm point has no margin"));
            }
            Ok(x.dot_slice(weights) / norm)
        }
        ModelForm::Dual { kernel, .. } => {
            let self_sim = kernel_eval(*kernel, x, x)?;
            if self_sim <= 0.0 {
                return Err(DalcError::invalid("x", "zero self-similarity under the kernel"));
            }
            Ok(model.decision_value(x)? / self_sim.sqrt())
        }
    }
}

fn mean_over_margins(
    model: &DalcModel,
    sample: &Dataset,
    term: impl Fn(f64, f64) -> f64,
    needs_labels: bool,
) -> Result<f64> {
    if sample.is_empty() {
        return Err(DalcError::EmptySample("estimator sample"));
    }
    if needs_labels && !sample.is_labeled() {
        return Err(DalcError::invalid("sample", "estimator needs labels"));
    }
    let mut sum = 0.0;
    for i in 0..sample.len() {
        let margin = normalized_margin(model, sample.point(i))?;
        let y = sample.label(i).unwrap_or(1.0);
        sum += term(margin, y);
    }
    Ok(sum / sample.len() as f64)
}

/// Mean disagreement `(1/m)·Σ phi_dis(margin_i)` over a sample; labels, if
/// present, are ignored.
pub fn empirical_disagreement(model: &DalcModel, sample: &Dataset) -> Result<f64> {
    mean_over_margins(model, sample, |m, _| phi_dis_raw(m), false)
}

/// Mean joint error `(1/m)·Σ phi_err(y_i·margin_i)` over a labeled sample.
pub fn empirical_joint_error(model: &DalcModel, sample: &Dataset) -> Result<f64> {
    mean_over_margins(model, sample, |m, y| phi_err_raw(y * m), true)
}

/// Mean Gibbs risk `(1/m)·Σ phi(y_i·margin_i)` over a labeled sample.
pub fn empirical_gibbs_risk(model: &DalcModel, sample: &Dataset) -> Result<f64> {
    mean_over_margins(model, sample, |m, y| phi_raw(y * m), true)
}

/// Zero-one error of the deterministic classifier `sgn(decision value)` on a
/// labeled sample.
pub fn empirical_vote_risk(model: &DalcModel, sample: &Dataset) -> Result<f64> {
    if sample.is_empty() {
        return Err(DalcError::EmptySample("estimator sample"));
    }
    let Some(labels) = sample.labels() else {
        return Err(DalcError::invalid("sample", "estimator needs labels"));
    };
    let mut errors = 0usize;
    for i in 0..sample.len() {
        if model.predict(sample.point(i))? != labels[i] {
            errors += 1;
        }
    }
    Ok(errors as f64 / sample.len() as f64)
}

/// Absolute difference of the mean disagreements on two samples,
/// `|d̂_source − d̂_target|`. A diagnostic for how differently the model's
/// random perturbations behave across domains.
pub fn empirical_domain_disagreement(
    model: &DalcModel,
    source: &Dataset,
    target: &Dataset,
) -> Result<f64> {
    let d_s = empirical_disagreement(model, source)?;
    let d_t = empirical_disagreement(model, target)?;
    Ok((d_s - d_t).abs())
}

/// The bundle of estimates on one labeled sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalEstimates {
    pub disagreement: f64,
    pub joint_error: f64,
    pub gibbs_risk: f64,
    pub vote_risk: f64,
    pub sample_size: usize,
}

impl EmpiricalEstimates {
    /// Compute all estimates on a labeled sample. The Gibbs risk always
    /// decomposes as `gibbs = ½·disagreement + joint_error` (up to float
    /// summation), since the identity holds pointwise for the losses.
    pub fn compute(model: &DalcModel, sample: &Dataset) -> Result<Self> {
        Ok(EmpiricalEstimates {
            disagreement: empirical_disagreement(model, sample)?,
            joint_error: empirical_joint_error(model, sample)?,
            gibbs_risk: empirical_gibbs_risk(model, sample)?,
            vote_risk: empirical_vote_risk(model, sample)?,
            sample_size: sample.len(),
        })
    }
}

/// Serialize the divergence exponent, which may be infinite, as a JSON
/// number when finite and the string `"inf"` otherwise (JSON numbers cannot
/// express infinity).
mod exponent_serde {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if q.is_finite() {
            s.serialize_f64(*q)
        } else {
            s.serialize_str("inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(q) => Ok(q),
            Raw::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Raw::Text(t) => Err(D::Error::custom(format!("bad exponent `{t}`"))),
        }
    }
}

/// A Monte-Carlo estimate of the domain divergence
/// `β_q = [E_source (target density / source density)^q]^(1/q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceEstimate {
    /// The exponent; `f64::INFINITY` selects the worst-case variant.
    #[serde(with = "exponent_serde")]
    pub q: f64,
    pub beta_q: f64,
    /// Mass of the target domain outside the source support (a user-supplied
    /// constant; no estimator exists). Defaults to 0.
    pub eta: f64,
    pub mc_samples: usize,
    /// True for `q = ∞`: the sampled maximum can only undershoot the true
    /// supremum over the source support.
    pub is_lower_bound: bool,
}

impl DivergenceEstimate {
    /// Attach a value for the unobservable target mass outside the source
    /// support. Must lie in [0, 1]; when an upper cap on that mass is known
    /// (the probability that a target draw falls outside the source
    /// support), callers should pass a value at or below the cap.
    pub fn with_eta(mut self, eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(DalcError::invalid("eta", format!("must be in [0, 1], got {eta}")));
        }
        self.eta = eta;
        Ok(self)
    }
}

/// Estimate `β_q` by drawing `n` points from the source domain and averaging
/// the supplied density ratio raised to the `q`-th power; `q = f64::INFINITY`
/// takes the maximum ratio over the draws instead (a lower bound on the true
/// supremum). The sampler sees a deterministic ChaCha8 stream for `seed`.
pub fn beta_q_monte_carlo<T>(
    mut source_sampler: impl FnMut(&mut ChaCha8Rng) -> T,
    ratio: impl Fn(&T) -> f64,
    q: f64,
    n: usize,
    seed: u64,
) -> Result<DivergenceEstimate> {
    if q.is_nan() || q <= 0.0 {
        return Err(DalcError::invalid("q", format!("must be > 0, got {q}")));
    }
    if n == 0 {
        return Err(DalcError::EmptySample("divergence sample"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc: f64 = 0.0;
    let mut max: f64 = 0.0;
    for _ in 0..n {
        let point = source_sampler(&mut rng);
        let r = ratio(&point);
        if !r.is_finite() {
            return Err(DalcError::NonFinite("density ratio"));
        }
        if r < 0.0 {
            return Err(DalcError::invalid("ratio", format!("negative density ratio {r}")));
        }
        if q.is_finite() {
            acc += r.powf(q);
        } else {
            max = max.max(r);
        }
    }
    let beta_q = if q.is_finite() {
        (acc / n as f64).powf(1.0 / q)
    } else {
        max
    };
    Ok(DivergenceEstimate {
        q,
        beta_q,
        eta: 0.0,
        mc_samples: n,
        is_lower_bound: !q.is_finite(),
    })
}
