//! Numerical evaluation of the PAC-Bayesian domain-adaptation bounds.
//!
//! Three layers build on each other:
//!
//! * [`da_bound_ideal`] — the population-level bound on the target risk:
//!   `½·d_T + β_q·e_S^(1−1/q) + η`, where `β_q` measures how far the target
//!   domain deviates from the source and `η` is the target mass outside the
//!   source support.
//! * [`catoni_bound`] — the single-sample generalization bound
//!   `(c/(1−e^{−c}))·[mean + (multiplier·KL + ln(1/δ))/(m·c)]` that converts
//!   an empirical mean into a population guarantee.
//! * [`da_generalization_bound`] — the combination: a fully empirical bound
//!   on the target Gibbs risk from the target disagreement and source joint
//!   error estimates, and twice that value for the deterministic
//!   sign classifier.

use serde::{Deserialize, Serialize};

use crate::error::{DalcError, Result};

fn check_range(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if !value.is_finite() || value < lo || value > hi {
        return Err(DalcError::invalid(
            name,
            format!("must be in [{lo}, {hi}], got {value}"),
        ));
    }
    Ok(())
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() || value <= 0.0 {
        return Err(DalcError::invalid(name, format!("must be > 0, got {value}")));
    }
    Ok(())
}

/// The population-level domain-adaptation bound on the target Gibbs risk:
/// `½·d_T + β_q·e_S^(1−1/q) + η`. Passing `q = f64::INFINITY` gives the
/// worst-case variant with exponent 1. With `β_q = 1`, `q = ∞`, `η = 0`
/// (identical domains) the value is exactly the Gibbs risk decomposition
/// `½·d_T + e_S`.
pub fn da_bound_ideal(d_t: f64, e_s: f64, beta_q: f64, q: f64, eta: f64) -> Result<f64> {
    check_range("d_T", d_t, 0.0, 1.0)?;
    check_range("e_S", e_s, 0.0, 1.0)?;
    check_range("eta", eta, 0.0, 1.0)?;
    if beta_q.is_nan() || beta_q < 0.0 {
        return Err(DalcError::invalid("beta_q", format!("must be >= 0, got {beta_q}")));
    }
    if q.is_nan() || q <= 0.0 {
        return Err(DalcError::invalid("q", format!("must be > 0, got {q}")));
    }
    // 1 - 1/q evaluates to exactly 1.0 for q = +inf.
    let exponent = 1.0 - 1.0 / q;
    Ok(0.5 * d_t + beta_q * e_s.powf(exponent) + eta)
}

/// The factor `c/(1−e^{−c})`, computed stably for small `c`. Strictly
/// greater than 1 for every c > 0, approaching 1 as c → 0⁺.
pub fn catoni_factor(c: f64) -> f64 {
    // 1 - e^{-c} = -expm1(-c), accurate near zero.
    c / -(-c).exp_m1()
}

fn check_catoni_params(kl: f64, m: usize, c: f64, delta: f64, kl_multiplier: u32) -> Result<()> {
    if !kl.is_finite() || kl < 0.0 {
        return Err(DalcError::invalid("kl", format!("must be >= 0, got {kl}")));
    }
    if m < 1 {
        return Err(DalcError::invalid("m", "sample size must be at least 1"));
    }
    check_positive("c", c)?;
    if !delta.is_finite() || delta <= 0.0 || delta > 1.0 {
        return Err(DalcError::invalid("delta", format!("must be in (0, 1], got {delta}")));
    }
    if kl_multiplier < 1 {
        return Err(DalcError::invalid("kl_multiplier", "must be at least 1"));
    }
    Ok(())
}

/// The Catoni-style generalization bound on a [0, 1]-valued loss:
///
/// ```text
/// (c/(1−e^{−c})) · [mean + (kl_multiplier·KL + ln(1/δ))/(m·c)]
/// ```
///
/// `kl_multiplier` is 1 when the bounded quantity depends on a single
/// random voter and 2 when it depends on a pair (disagreement, joint error).
pub fn catoni_bound(
    empirical_mean: f64,
    kl: f64,
    m: usize,
    c: f64,
    delta: f64,
    kl_multiplier: u32,
) -> Result<f64> {
    check_range("empirical_mean", empirical_mean, 0.0, 1.0)?;
    check_catoni_params(kl, m, c, delta, kl_multiplier)?;
    let complexity = (kl_multiplier as f64 * kl + (1.0 / delta).ln()) / (m as f64 * c);
    Ok(catoni_factor(c) * (empirical_mean + complexity))
}

/// The looser but simpler variant of [`catoni_bound`] with the factor
/// `1/(1−c/2)`, valid only for `c ∈ (0, 2)`.
pub fn catoni_bound_simple(
    empirical_mean: f64,
    kl: f64,
    m: usize,
    c: f64,
    delta: f64,
    kl_multiplier: u32,
) -> Result<f64> {
    check_range("empirical_mean", empirical_mean, 0.0, 1.0)?;
    check_catoni_params(kl, m, c, delta, kl_multiplier)?;
    if c >= 2.0 {
        return Err(DalcError::invalid("c", format!("must be in (0, 2), got {c}")));
    }
    let complexity = (kl_multiplier as f64 * kl + (1.0 / delta).ln()) / (m as f64 * c);
    Ok((empirical_mean + complexity) / (1.0 - 0.5 * c))
}

/// Serde helper for the optional exponent `q`, which may be infinite; JSON
/// numbers cannot express infinity, so it travels as the string `"inf"`.
mod opt_exponent_serde {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        q: &Option<f64>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        match q {
            None => s.serialize_none(),
            Some(q) if q.is_finite() => s.serialize_f64(*q),
            Some(_) => s.serialize_str("inf"),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<f64>, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Option::<Raw>::deserialize(d)? {
            None => Ok(None),
            Some(Raw::Number(q)) => Ok(Some(q)),
            Some(Raw::Text(t)) if t == "inf" => Ok(Some(f64::INFINITY)),
            Some(Raw::Text(t)) => Err(D::Error::custom(format!("bad exponent `{t}`"))),
        }
    }
}

/// Everything the empirical domain-adaptation bound consumes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    /// Empirical disagreement on the target sample.
    pub d_hat: f64,
    /// Empirical joint error on the source sample.
    pub e_hat: f64,
    /// KL divergence of the posterior from the prior: `½‖w‖²` for a primal
    /// model, `½αᵀKα` for a dual model.
    pub kl: f64,
    pub m_s: usize,
    pub m_t: usize,
    /// Source-side Catoni parameter.
    pub b: f64,
    /// Target-side Catoni parameter.
    pub c: f64,
    /// Confidence level: the bound holds with probability at least 1 − δ.
    pub delta: f64,
    /// Worst-case domain divergence β_∞ (or β_q when `q` is supplied).
    pub beta_inf: f64,
    /// Target mass outside the source support.
    pub eta: f64,
    /// Optional exponent for the idealized bound; ∞ when absent.
    #[serde(default, with = "opt_exponent_serde")]
    pub q: Option<f64>,
}

impl BoundInputs {
    pub fn validate(&self) -> Result<()> {
        check_range("d_hat", self.d_hat, 0.0, 1.0)?;
        check_range("e_hat", self.e_hat, 0.0, 1.0)?;
        if !self.kl.is_finite() || self.kl < 0.0 {
            return Err(DalcError::invalid("kl", format!("must be >= 0, got {}", self.kl)));
        }
        if self.m_s < 1 || self.m_t < 1 {
            return Err(DalcError::invalid("m_s/m_t", "sample sizes must be at least 1"));
        }
        check_positive("b", self.b)?;
        check_positive("c", self.c)?;
        if !self.delta.is_finite() || self.delta <= 0.0 || self.delta > 1.0 {
            return Err(DalcError::invalid(
                "delta",
                format!("must be in (0, 1], got {}", self.delta),
            ));
        }
        if !self.beta_inf.is_finite() || self.beta_inf < 0.0 {
            return Err(DalcError::invalid(
                "beta_inf",
                format!("must be >= 0, got {}", self.beta_inf),
            ));
        }
        check_range("eta", self.eta, 0.0, 1.0)?;
        if let Some(q) = self.q {
            if q.is_nan() || q <= 0.0 {
                return Err(DalcError::invalid("q", format!("must be > 0, got {q}")));
            }
        }
        Ok(())
    }
}

/// All bound values computed from one set of inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub inputs: BoundInputs,
    /// Source-side combined factor `(b/(1−e^{−b}))·β`.
    pub b_prime: f64,
    /// Target-side factor `c/(1−e^{−c})`.
    pub c_prime: f64,
    /// Population-level bound evaluated on the empirical estimates.
    pub ideal_da_bound: f64,
    /// Single-sample bound on the source Gibbs risk, when its empirical
    /// value was supplied.
    pub source_gibbs_bound: Option<f64>,
    /// Single-sample bound on the target disagreement.
    pub disagreement_bound: f64,
    /// Single-sample bound on the source joint error.
    pub joint_error_bound: f64,
    /// The empirical domain-adaptation bound on the target Gibbs risk.
    pub gibbs_da_bound: f64,
    /// Bound on the target risk of the deterministic sign classifier:
    /// exactly twice `gibbs_da_bound`.
    pub majority_vote_da_bound: f64,
}

/// Evaluate every bound from empirical inputs. The headline value is
///
/// ```text
/// gibbs_da_bound = c′·½·d̂_T + b′·ê_S + η
///                + (c′/(m_t·c) + b′/(m_s·b)) · (2·KL + ln(2/δ))
/// ```
///
/// with `c′ = c/(1−e^{−c})` and `b′ = (b/(1−e^{−b}))·β_∞`; the bound for the
/// deterministic sign classifier is twice that. `source_gibbs`, when given,
/// additionally produces a plain single-domain bound on the source Gibbs
/// risk for comparison.
pub fn da_generalization_bound(
    inputs: &BoundInputs,
    source_gibbs: Option<f64>,
) -> Result<BoundReport> {
    inputs.validate()?;
    let b_prime = catoni_factor(inputs.b) * inputs.beta_inf;
    let c_prime = catoni_factor(inputs.c);

    let complexity = 2.0 * inputs.kl + (2.0 / inputs.delta).ln();
    let gibbs_da_bound = c_prime * 0.5 * inputs.d_hat
        + b_prime * inputs.e_hat
        + inputs.eta
        + (c_prime / (inputs.m_t as f64 * inputs.c) + b_prime / (inputs.m_s as f64 * inputs.b))
            * complexity;

    let ideal_da_bound = da_bound_ideal(
        inputs.d_hat,
        inputs.e_hat,
        inputs.beta_inf,
        inputs.q.unwrap_or(f64::INFINITY),
        inputs.eta,
    )?;
    let source_gibbs_bound = source_gibbs
        .map(|mean| catoni_bound(mean, inputs.kl, inputs.m_s, inputs.b, inputs.delta, 1))
        .transpose()?;
    let disagreement_bound =
        catoni_bound(inputs.d_hat, inputs.kl, inputs.m_t, inputs.c, inputs.delta, 2)?;
    let joint_error_bound =
        catoni_bound(inputs.e_hat, inputs.kl, inputs.m_s, inputs.b, inputs.delta, 2)?;

    Ok(BoundReport {
        inputs: *inputs,
        b_prime,
        c_prime,
        ideal_da_bound,
        source_gibbs_bound,
        disagreement_bound,
        joint_error_bound,
        gibbs_da_bound,
        majority_vote_da_bound: 2.0 * gibbs_da_bound,
    })
}

/// Result of minimizing the empirical bound over a (b, c) grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSweep {
    /// `values[i][j]` is `gibbs_da_bound` at `b_grid[i]`, `c_grid[j]`.
    pub values: Vec<Vec<f64>>,
    pub b_grid: Vec<f64>,
    pub c_grid: Vec<f64>,
    pub best_b: f64,
    pub best_c: f64,
    pub best_report: BoundReport,
    /// Statistical caveat attached to every sweep.
    pub note: String,
}

/// Caveat attached to sweep results: the per-cell confidence is not
/// corrected for trying many (b, c) cells.
pub const SWEEP_NOTE: &str = "bound minimized over the (b, c) grid with no union-bound \
     correction across cells; the certificate at the selected cell assumes b and c were \
     fixed before seeing the data";

/// Evaluate the empirical bound over all grid pairs and keep the smallest.
/// Ties resolve to the earliest (b, c) pair in grid order.
pub fn sweep_bound(inputs: &BoundInputs, b_grid: &[f64], c_grid: &[f64]) -> Result<BoundSweep> {
    if b_grid.is_empty() || c_grid.is_empty() {
        return Err(DalcError::EmptySample("bound sweep grid"));
    }
    let mut values = Vec::with_capacity(b_grid.len());
    let mut best: Option<(f64, f64, BoundReport)> = None;
    for &b in b_grid {
        let mut row = Vec::with_capacity(c_grid.len());
        for &c in c_grid {
            let cell = BoundInputs { b, c, ..*inputs };
            let report = da_generalization_bound(&cell, None)?;
            row.push(report.gibbs_da_bound);
            let better = match &best {
                None => true,
                Some((_, _, r)) => report.gibbs_da_bound < r.gibbs_da_bound,
            };
            if better {
                best = Some((b, c, report));
            }
        }
        values.push(row);
    }
    let (best_b, best_c, best_report) = best.expect("grids checked nonempty");
    Ok(BoundSweep {
        values,
        b_grid: b_grid.to_vec(),
        c_grid: c_grid.to_vec(),
        best_b,
        best_c,
        best_report,
        note: SWEEP_NOTE.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn base_inputs() -> BoundInputs {
        BoundInputs {
            d_hat: 0.3,
            e_hat: 0.1,
            kl: 2.0,
            m_s: 150,
            m_t: 200,
            b: 0.8,
            c: 1.2,
            delta: 0.05,
            beta_inf: 1.4,
            eta: 0.02,
            q: None,
        }
    }

    #[test]
    fn ideal_bound_hand_value() {
        // 0.5·0.4 + 1.2·0.09^(1/2) + 0.01 = 0.2 + 0.36 + 0.01.
        let v = da_bound_ideal(0.4, 0.09, 1.2, 2.0, 0.01).unwrap();
        assert!((v - 0.57).abs() < 1e-12);
    }

    #[test]
    fn ideal_bound_identical_domains_is_gibbs_decomposition() {
        for (d, e) in [(0.3, 0.1), (0.5, 0.25), (0.0, 0.0), (1.0, 1.0)] {
            let v = da_bound_ideal(d, e, 1.0, f64::INFINITY, 0.0).unwrap();
            assert_eq!(v, 0.5 * d + e);
        }
    }

    #[test]
    fn ideal_bound_zero_joint_error() {
        let v = da_bound_ideal(0.4, 0.0, 2.0, 3.0, 0.0).unwrap();
        assert_eq!(v, 0.2);
    }

    #[test]
    fn ideal_bound_range_validation() {
        assert!(da_bound_ideal(-0.1, 0.1, 1.0, 2.0, 0.0).is_err());
        assert!(da_bound_ideal(0.1, 1.5, 1.0, 2.0, 0.0).is_err());
        assert!(da_bound_ideal(0.1, 0.1, -1.0, 2.0, 0.0).is_err());
        assert!(da_bound_ideal(0.1, 0.1, 1.0, 0.0, 0.0).is_err());
        assert!(da_bound_ideal(0.1, 0.1, 1.0, 2.0, 1.1).is_err());
    }

    #[test]
    fn catoni_zero_inputs_give_zero() {
        assert_eq!(catoni_bound(0.0, 0.0, 50, 1.0, 1.0, 1).unwrap(), 0.0);
    }

    #[test]
    fn catoni_factor_limit_and_excess() {
        assert!((catoni_factor(1e-8) - 1.0).abs() <= 1e-6);
        for c in [1e-3, 0.1, 1.0, 5.0, 50.0] {
            assert!(catoni_factor(c) > 1.0, "factor({c}) not above 1");
        }
        // Frozen high-precision value of 1/(1 − e^{-1}).
        assert!((catoni_factor(1.0) - 1.5819767068693264).abs() < 1e-15);
    }

    #[test]
    fn catoni_bound_frozen_value() {
        // (1/(1−e^{−1}))·(0.2 + (2·1 + ln 20)/(100·1)), evaluated to full
        // precision with an arbitrary-precision calculator.
        let v = catoni_bound(0.2, 1.0, 100, 1.0, 0.05, 2).unwrap();
        assert!((v - 0.39542666227904284).abs() <= 1e-9, "{v}");
    }

    #[test]
    fn catoni_simple_frozen_value_and_domain() {
        let v = catoni_bound_simple(0.2, 1.0, 100, 1.0, 0.05, 2).unwrap();
        assert!((v - 0.4999146454710798).abs() <= 1e-9, "{v}");
        assert!(catoni_bound_simple(0.2, 1.0, 100, 2.0, 0.05, 2).is_err());
        assert!(catoni_bound_simple(0.2, 1.0, 100, 2.5, 0.05, 2).is_err());
        // The simple factor is never below the exact one on (0, 2), so the
        // simple bound is looser.
        for c in [0.1, 0.5, 1.0, 1.9] {
            let exact = catoni_bound(0.2, 1.0, 100, c, 0.05, 2).unwrap();
            let simple = catoni_bound_simple(0.2, 1.0, 100, c, 0.05, 2).unwrap();
            assert!(simple >= exact, "simple {simple} < exact {exact} at c={c}");
        }
    }

    #[test]
    fn catoni_dominates_scaled_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let mean = rng.gen_range(0.0..1.0);
            let kl = rng.gen_range(0.0..10.0);
            let m = rng.gen_range(1..1000);
            let c = rng.gen_range(0.01..10.0);
            let delta = rng.gen_range(0.001..1.0);
            let v = catoni_bound(mean, kl, m, c, delta, 1).unwrap();
            assert!(v >= mean * catoni_factor(c) - 1e-15);
        }
    }

    #[test]
    fn complexity_only_case() {
        // Everything zero except the confidence term: the bound reduces to
        // (c′/(m_t·c) + b′/(m_s·b))·ln 2. Frozen with b = c = 1, β = 1,
        // m_s = m_t = 10, δ = 1.
        let inputs = BoundInputs {
            d_hat: 0.0,
            e_hat: 0.0,
            kl: 0.0,
            m_s: 10,
            m_t: 10,
            b: 1.0,
            c: 1.0,
            delta: 1.0,
            beta_inf: 1.0,
            eta: 0.0,
            q: None,
        };
        let report = da_generalization_bound(&inputs, None).unwrap();
        assert!((report.gibbs_da_bound - 0.21930853881559613).abs() <= 1e-9);
    }

    #[test]
    fn symmetric_parameters_give_equal_factors() {
        let inputs = BoundInputs {
            b: 0.7,
            c: 0.7,
            beta_inf: 1.0,
            ..base_inputs()
        };
        let report = da_generalization_bound(&inputs, None).unwrap();
        assert_eq!(report.b_prime, report.c_prime);
    }

    #[test]
    fn sign_classifier_bound_is_twice_gibbs_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let inputs = BoundInputs {
                d_hat: rng.gen_range(0.0..0.5),
                e_hat: rng.gen_range(0.0..0.5),
                kl: rng.gen_range(0.0..20.0),
                m_s: rng.gen_range(1..500),
                m_t: rng.gen_range(1..500),
                b: rng.gen_range(0.01..5.0),
                c: rng.gen_range(0.01..5.0),
                delta: rng.gen_range(0.01..1.0),
                beta_inf: rng.gen_range(0.0..3.0),
                eta: rng.gen_range(0.0..0.5),
                q: None,
            };
            let report = da_generalization_bound(&inputs, None).unwrap();
            assert_eq!(report.majority_vote_da_bound, 2.0 * report.gibbs_da_bound);
        }
    }

    #[test]
    fn matches_independently_coded_formula() {
        // The same bound written out again, in a different style, as an
        // oracle against transcription slips.
        fn oracle(i: &BoundInputs) -> f64 {
            let bp = (i.b / (1.0 - (-i.b).exp())) * i.beta_inf;
            let cp = i.c / (1.0 - (-i.c).exp());
            let conf = 2.0 * i.kl + (2.0f64 / i.delta).ln();
            cp * i.d_hat / 2.0
                + bp * i.e_hat
                + i.eta
                + (cp / (i.c * i.m_t as f64)) * conf
                + (bp / (i.b * i.m_s as f64)) * conf
        }
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let inputs = BoundInputs {
                d_hat: rng.gen_range(0.0..0.5),
                e_hat: rng.gen_range(0.0..0.5),
                kl: rng.gen_range(0.0..20.0),
                m_s: rng.gen_range(1..500),
                m_t: rng.gen_range(1..500),
                b: rng.gen_range(0.1..5.0),
                c: rng.gen_range(0.1..5.0),
                delta: rng.gen_range(0.01..1.0),
                beta_inf: rng.gen_range(0.0..3.0),
                eta: rng.gen_range(0.0..0.5),
                q: None,
            };
            let report = da_generalization_bound(&inputs, None).unwrap();
            let expected = oracle(&inputs);
            assert!(
                (report.gibbs_da_bound - expected).abs() <= 1e-12 * (1.0 + expected.abs()),
                "{} vs {expected}",
                report.gibbs_da_bound
            );
        }
    }

    #[test]
    fn source_gibbs_slot_uses_single_voter_bound() {
        let inputs = base_inputs();
        let report = da_generalization_bound(&inputs, Some(0.22)).unwrap();
        let expected =
            catoni_bound(0.22, inputs.kl, inputs.m_s, inputs.b, inputs.delta, 1).unwrap();
        assert_eq!(report.source_gibbs_bound, Some(expected));
        assert_eq!(
            da_generalization_bound(&inputs, None).unwrap().source_gibbs_bound,
            None
        );
    }

    #[test]
    fn monotone_in_each_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let base = BoundInputs {
                d_hat: rng.gen_range(0.0..0.4),
                e_hat: rng.gen_range(0.0..0.4),
                kl: rng.gen_range(0.0..10.0),
                m_s: rng.gen_range(2..300),
                m_t: rng.gen_range(2..300),
                b: rng.gen_range(0.1..3.0),
                c: rng.gen_range(0.1..3.0),
                delta: rng.gen_range(0.01..0.9),
                beta_inf: rng.gen_range(0.1..2.0),
                eta: rng.gen_range(0.0..0.4),
                q: None,
            };
            let v = da_generalization_bound(&base, None).unwrap().gibbs_da_bound;
            let value = |i: &BoundInputs| da_generalization_bound(i, None).unwrap().gibbs_da_bound;
            // Non-decreasing in the risk estimates and divergences…
            assert!(value(&BoundInputs { d_hat: base.d_hat + 0.1, ..base }) >= v);
            assert!(value(&BoundInputs { e_hat: base.e_hat + 0.1, ..base }) >= v);
            assert!(value(&BoundInputs { kl: base.kl + 1.0, ..base }) >= v);
            assert!(value(&BoundInputs { eta: base.eta + 0.1, ..base }) >= v);
            assert!(value(&BoundInputs { beta_inf: base.beta_inf + 0.5, ..base }) >= v);
            // …and non-increasing in sample sizes and allowed failure mass.
            assert!(value(&BoundInputs { m_s: base.m_s * 2, ..base }) <= v);
            assert!(value(&BoundInputs { m_t: base.m_t * 2, ..base }) <= v);
            assert!(value(&BoundInputs { delta: (base.delta * 1.5).min(1.0), ..base }) <= v);
        }
    }

    #[test]
    fn sweep_finds_grid_minimum() {
        let inputs = base_inputs();
        let b_grid = [0.2, 0.5, 1.0, 2.0];
        let c_grid = [0.1, 0.6, 1.5];
        let sweep = sweep_bound(&inputs, &b_grid, &c_grid).unwrap();
        assert_eq!(sweep.values.len(), 4);
        assert!(sweep.values.iter().all(|row| row.len() == 3));
        let mut brute = f64::INFINITY;
        for &b in &b_grid {
            for &c in &c_grid {
                let v = da_generalization_bound(&BoundInputs { b, c, ..inputs }, None)
                    .unwrap()
                    .gibbs_da_bound;
                brute = brute.min(v);
            }
        }
        assert_eq!(sweep.best_report.gibbs_da_bound, brute);
        assert_eq!(sweep.best_report.inputs.b, sweep.best_b);
        assert_eq!(sweep.best_report.inputs.c, sweep.best_c);
        assert!(sweep.note.contains("union-bound"));
        assert!(sweep_bound(&inputs, &[], &c_grid).is_err());
    }

    #[test]
    fn inputs_validation_rejects_out_of_range() {
        let mut bad = base_inputs();
        bad.delta = 0.0;
        assert!(da_generalization_bound(&bad, None).is_err());
        let mut bad = base_inputs();
        bad.b = -1.0;
        assert!(da_generalization_bound(&bad, None).is_err());
        let mut bad = base_inputs();
        bad.m_s = 0;
        assert!(da_generalization_bound(&bad, None).is_err());
        let mut bad = base_inputs();
        bad.d_hat = f64::NAN;
        assert!(da_generalization_bound(&bad, None).is_err());
    }

    #[test]
    fn inputs_serde_handles_infinite_exponent() {
        let mut inputs = base_inputs();
        inputs.q = Some(f64::INFINITY);
        let json = serde_json::to_string(&inputs).unwrap();
        assert!(json.contains("\"q\":\"inf\""), "{json}");
        let back: BoundInputs = serde_json::from_str(&json).unwrap();
        assert_eq!(back, inputs);
    }
}
