//! The domain-adaptation training objective and its analytic gradients.
//!
//! The primal objective over a weight vector `w` is
//!
//! ```text
//! C · Σ_target phi_dis(w·x′/‖x′‖) + B · Σ_source phi_err(y·w·x/‖x‖) + ‖w‖²
//! ```
//!
//! i.e. a disagreement term on the unlabeled target sample, a joint-error
//! term on the labeled source sample, and a squared-norm regularizer. Sums
//! are raw sums, not means: the trade-off weights B and C absorb sample
//! sizes. The dual form rewrites the same objective in terms of a weight
//! vector `alpha` over the M = m_s + m_t training points through a kernel
//! matrix K, with `u_i = (Kα)_i/√K_ii` playing the role of the normalized
//! margin and `αᵀKα` the role of `‖w‖²`. With a linear kernel the two forms
//! take identical values under the correspondence `w = Σ_i α_i x_i`.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{DalcError, Result};
use crate::kernels::GramMatrix;
use crate::losses::{d_phi_dis_raw, d_phi_err_raw, phi_dis_raw, phi_err_raw};

/// Trade-off weights of the training objective.
///
/// `c` scales the target disagreement term, `b` the source joint-error term.
/// Both must be positive for domain adaptation; [`DalcHyperparams::source_only`]
/// allows `c = 0` to express the supervised no-adaptation baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DalcHyperparams {
    c: f64,
    b: f64,
}

impl DalcHyperparams {
    pub fn new(c: f64, b: f64) -> Result<Self> {
        if !c.is_finite() || c <= 0.0 {
            return Err(DalcError::invalid("C", format!("must be > 0, got {c}")));
        }
        Self::check_b(b)?;
        Ok(DalcHyperparams { c, b })
    }

    /// A source-only configuration: the disagreement term is switched off
    /// (`c = 0`), leaving a purely supervised objective. Used as the
    /// no-adaptation baseline.
    pub fn source_only(b: f64) -> Result<Self> {
        Self::check_b(b)?;
        Ok(DalcHyperparams { c: 0.0, b })
    }

    fn check_b(b: f64) -> Result<()> {
        if !b.is_finite() || b <= 0.0 {
            return Err(DalcError::invalid("B", format!("must be > 0, got {b}")));
        }
        Ok(())
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

fn check_finite(v: &[f64], what: &'static str) -> Result<()> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(DalcError::NonFinite(what));
    }
    Ok(())
}

fn check_primal_inputs(w: &[f64], source: &Dataset, target: &Dataset) -> Result<()> {
    check_finite(w, "weight vector")?;
    for data in [source, target] {
        if !data.is_empty() && data.dim() != w.len() {
            return Err(DalcError::DimensionMismatch {
                expected: w.len(),
                got: data.dim(),
            });
        }
    }
    if !source.is_empty() && !source.is_labeled() {
        return Err(DalcError::invalid("source", "must be labeled"));
    }
    Ok(())
}

/// Objective value at `w`. Nonnegative; at least `‖w‖²`.
pub fn primal_objective(
    w: &[f64],
    source: &Dataset,
    target: &Dataset,
    hp: &DalcHyperparams,
) -> Result<f64> {
    check_primal_inputs(w, source, target)?;
    let mut total = w.iter().map(|x| x * x).sum::<f64>();
    for i in 0..target.len() {
        let margin = target.point(i).dot_slice(w) / target.norm(i);
        total += hp.c * phi_dis_raw(margin);
    }
    if let Some(labels) = source.labels() {
        for i in 0..source.len() {
            let margin = source.point(i).dot_slice(w) / source.norm(i);
            total += hp.b * phi_err_raw(labels[i] * margin);
        }
    }
    Ok(total)
}

/// Gradient of [`primal_objective`] at `w`:
///
/// ```text
/// C · Σ d_phi_dis(m′_i)·x′_i/‖x′_i‖ + B · Σ y_i·d_phi_err(y_i·m_i)·x_i/‖x_i‖ + 2w
/// ```
pub fn primal_gradient(
    w: &[f64],
    source: &Dataset,
    target: &Dataset,
    hp: &DalcHyperparams,
) -> Result<Vec<f64>> {
    check_primal_inputs(w, source, target)?;
    let mut grad: Vec<f64> = w.iter().map(|x| 2.0 * x).collect();
    for i in 0..target.len() {
        let norm = target.norm(i);
        let margin = target.point(i).dot_slice(w) / norm;
        let coef = hp.c * d_phi_dis_raw(margin) / norm;
        target.point(i).add_scaled_into(coef, &mut grad);
    }
    if let Some(labels) = source.labels() {
        for i in 0..source.len() {
            let norm = source.norm(i);
            let y = labels[i];
            let margin = source.point(i).dot_slice(w) / norm;
            let coef = hp.b * y * d_phi_err_raw(y * margin) / norm;
            source.point(i).add_scaled_into(coef, &mut grad);
        }
    }
    Ok(grad)
}

/// Normalized kernel margins `u_i = (Kα)_i / √K_ii` plus the product `Kα`.
fn kernel_margins(
    alpha: &[f64],
    k: &GramMatrix,
    source_labels: &[f64],
    m_s: usize,
    m_t: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_finite(alpha, "dual weight vector")?;
    let m = k.size();
    if alpha.len() != m {
        return Err(DalcError::DimensionMismatch {
            expected: m,
            got: alpha.len(),
        });
    }
    if m_s + m_t != m {
        return Err(DalcError::invalid(
            "m_s/m_t",
            format!("{m_s} + {m_t} does not match kernel matrix size {m}"),
        ));
    }
    if source_labels.len() != m_s {
        return Err(DalcError::DimensionMismatch {
            expected: m_s,
            got: source_labels.len(),
        });
    }
    let k_alpha = k.mat_vec(alpha)?;
    let mut u = Vec::with_capacity(m);
    for i in 0..m {
        let kii = k.get(i, i);
        if kii <= 0.0 {
            return Err(DalcError::DegenerateKernel(i));
        }
        u.push(k_alpha[i] / kii.sqrt());
    }
    Ok((u, k_alpha))
}

/// Dual objective value at `alpha` over the concatenated sample
/// (source points first, then target points):
///
/// ```text
/// C · Σ_target 2·Φ(u_i)Φ(−u_i) + B · Σ_source Φ(y_i·u_i)² + αᵀKα
/// ```
pub fn dual_objective(
    alpha: &[f64],
    k: &GramMatrix,
    source_labels: &[f64],
    m_s: usize,
    m_t: usize,
    hp: &DalcHyperparams,
) -> Result<f64> {
    let (u, k_alpha) = kernel_margins(alpha, k, source_labels, m_s, m_t)?;
    let mut total = k_alpha.iter().zip(alpha).map(|(a, b)| a * b).sum::<f64>();
    for i in 0..m_s {
        total += hp.b * phi_err_raw(source_labels[i] * u[i]);
    }
    for &ui in &u[m_s..] {
        total += hp.c * phi_dis_raw(ui);
    }
    Ok(total)
}

/// Gradient of [`dual_objective`] at `alpha`: with per-point loss slopes
/// `g_i` taken at the normalized margins, the gradient is `K·(g + 2α)`.
pub fn dual_gradient(
    alpha: &[f64],
    k: &GramMatrix,
    source_labels: &[f64],
    m_s: usize,
    m_t: usize,
    hp: &DalcHyperparams,
) -> Result<Vec<f64>> {
    let (u, _) = kernel_margins(alpha, k, source_labels, m_s, m_t)?;
    let m = k.size();
    let mut inner = Vec::with_capacity(m);
    for i in 0..m {
        let sqrt_kii = k.get(i, i).sqrt();
        let slope = if i < m_s {
            let y = source_labels[i];
            hp.b * y * d_phi_err_raw(y * u[i]) / sqrt_kii
        } else {
            hp.c * d_phi_dis_raw(u[i]) / sqrt_kii
        };
        inner.push(slope + 2.0 * alpha[i]);
    }
    k.mat_vec(&inner)
}
