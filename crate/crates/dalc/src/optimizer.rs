//! Unconstrained smooth minimization for the (non-convex) training objective.
//!
//! The default method is a limited-memory quasi-Newton iteration (inverse
//! Hessian approximated from the last few step/gradient-change pairs) with
//! Armijo backtracking; a plain gradient-descent method is available for
//! comparison. The minimizer is deterministic: identical inputs produce
//! identical iterates.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{DalcError, Result};

/// Iteration scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    QuasiNewton,
    GradientDescent,
}

/// Armijo backtracking parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LineSearchParams {
    /// Sufficient-decrease constant in (0, 1).
    pub sufficient_decrease: f64,
    /// Step shrink factor in (0, 1).
    pub backtrack_factor: f64,
}

impl Default for LineSearchParams {
    fn default() -> Self {
        LineSearchParams {
            sufficient_decrease: 1e-4,
            backtrack_factor: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub max_iterations: usize,
    /// Stop when the gradient infinity-norm falls to or below this.
    pub gradient_tolerance: f64,
    pub method: Method,
    pub line_search: LineSearchParams,
    /// Number of curvature pairs kept by the quasi-Newton approximation.
    pub memory: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_iterations: 1000,
            gradient_tolerance: 1e-6,
            method: Method::QuasiNewton,
            line_search: LineSearchParams::default(),
            memory: 10,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations < 1 {
            return Err(DalcError::invalid("max_iterations", "must be at least 1"));
        }
        if !self.gradient_tolerance.is_finite() || self.gradient_tolerance <= 0.0 {
            return Err(DalcError::invalid("gradient_tolerance", "must be > 0"));
        }
        let ls = &self.line_search;
        if !(ls.sufficient_decrease > 0.0 && ls.sufficient_decrease < 1.0) {
            return Err(DalcError::invalid("sufficient_decrease", "must be in (0, 1)"));
        }
        if !(ls.backtrack_factor > 0.0 && ls.backtrack_factor < 1.0) {
            return Err(DalcError::invalid("backtrack_factor", "must be in (0, 1)"));
        }
        if self.memory < 1 {
            return Err(DalcError::invalid("memory", "must be at least 1"));
        }
        Ok(())
    }
}

/// What the minimizer did: accepted objective values (non-increasing by the
/// line-search guarantee), final gradient infinity-norm, and whether the
/// tolerance was met before the iteration cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerTrace {
    pub iterations: usize,
    pub objective_values: Vec<f64>,
    pub final_gradient_norm: f64,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Stored curvature pair for the limited-memory inverse-Hessian model.
struct CurvaturePair {
    s: Vec<f64>,
    y: Vec<f64>,
    rho: f64, // 1 / (yᵀs)
}

/// Two-loop recursion: apply the limited-memory inverse-Hessian
/// approximation to the gradient, yielding the quasi-Newton direction -H·g.
fn quasi_newton_direction(g: &[f64], pairs: &VecDeque<CurvaturePair>) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut coeffs = Vec::with_capacity(pairs.len());
    for p in pairs.iter().rev() {
        let a = p.rho * dot(&p.s, &q);
        for (qj, yj) in q.iter_mut().zip(&p.y) {
            *qj -= a * yj;
        }
        coeffs.push(a);
    }
    if let Some(last) = pairs.back() {
        // Scale the initial approximation by the most recent curvature.
        let gamma = dot(&last.s, &last.y) / dot(&last.y, &last.y);
        for qj in &mut q {
            *qj *= gamma;
        }
    }
    for (p, a) in pairs.iter().zip(coeffs.iter().rev()) {
        let b = p.rho * dot(&p.y, &q);
        for (qj, sj) in q.iter_mut().zip(&p.s) {
            *qj += (a - b) * sj;
        }
    }
    for qj in &mut q {
        *qj = -*qj;
    }
    q
}

/// Minimize a smooth function from `start`.
///
/// Returns the final iterate and a trace. Reaching the iteration cap is not
/// an error (`converged` is simply false); a non-finite objective or
/// gradient at an accepted point is, with the last fully valid iterate
/// attached. Non-finite values at rejected line-search trials merely shrink
/// the step.
pub fn minimize(
    objective: impl Fn(&[f64]) -> f64,
    gradient: impl Fn(&[f64]) -> Vec<f64>,
    start: &[f64],
    config: &OptimizerConfig,
) -> Result<(Vec<f64>, OptimizerTrace)> {
    config.validate()?;

    let mut x = start.to_vec();
    let mut fx = objective(&x);
    if !fx.is_finite() {
        return Err(DalcError::NonFiniteEvaluation {
            iteration: 0,
            last_point: x,
        });
    }
    let mut g = gradient(&x);
    if !all_finite(&g) {
        return Err(DalcError::NonFiniteEvaluation {
            iteration: 0,
            last_point: x,
        });
    }

    let mut values = vec![fx];
    let mut pairs: VecDeque<CurvaturePair> = VecDeque::new();
    let mut iterations = 0;
    let mut converged = false;

    // Shrinking the step this many times underflows any reasonable scale;
    // treat it as a stall rather than looping forever.
    const MAX_BACKTRACKS: usize = 60;

    loop {
        if inf_norm(&g) <= config.gradient_tolerance {
            converged = true;
            break;
        }
        if iterations >= config.max_iterations {
            break;
        }

        let mut direction = match config.method {
            Method::QuasiNewton => quasi_newton_direction(&g, &pairs),
            Method::GradientDescent => g.iter().map(|x| -x).collect(),
        };
        let mut slope = dot(&direction, &g);
        if !all_finite(&direction) || slope >= 0.0 {
            // The curvature model failed to produce a descent direction;
            // fall back to steepest descent and drop the stale pairs.
            direction = g.iter().map(|x| -x).collect();
            slope = -dot(&g, &g);
            pairs.clear();
        }

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let trial: Vec<f64> = x
                .iter()
                .zip(&direction)
                .map(|(xi, di)| xi + step * di)
                .collect();
            let ft = objective(&trial);
            if ft.is_finite() && ft <= fx + config.line_search.sufficient_decrease * step * slope {
                accepted = Some((trial, ft));
                break;
            }
            step *= config.line_search.backtrack_factor;
        }
        let Some((x_next, f_next)) = accepted else {
            // No acceptable step at any scale: stalled, likely at the limit
            // of floating-point resolution. Return the best point found.
            break;
        };

        let g_next = gradient(&x_next);
        if !all_finite(&g_next) {
            return Err(DalcError::NonFiniteEvaluation {
                iteration: iterations + 1,
                last_point: x,
            });
        }

        if config.method == Method::QuasiNewton {
            let s: Vec<f64> = x_next.iter().zip(&x).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = g_next.iter().zip(&g).map(|(a, b)| a - b).collect();
            let sy = dot(&s, &y);
            // Only curvature pairs with sᵀy safely positive keep the
            // inverse-Hessian model positive definite.
            if sy > 1e-10 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
                if pairs.len() == config.memory {
                    pairs.pop_front();
                }
                let rho = 1.0 / sy;
                pairs.push_back(CurvaturePair { s, y, rho });
            }
        }

        x = x_next;
        fx = f_next;
        g = g_next;
        values.push(fx);
        iterations += 1;
    }

    let trace = OptimizerTrace {
        iterations,
        objective_values: values,
        final_gradient_norm: inf_norm(&g),
        converged,
    };
    Ok((x, trace))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic_about(a: &'static [f64]) -> (impl Fn(&[f64]) -> f64, impl Fn(&[f64]) -> Vec<f64>)
    {
        let f = move |x: &[f64]| x.iter().zip(a).map(|(xi, ai)| (xi - ai).powi(2)).sum();
        let g = move |x: &[f64]| x.iter().zip(a).map(|(xi, ai)| 2.0 * (xi - ai)).collect();
        (f, g)
    }

    fn rosenbrock(x: &[f64]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }

    fn rosenbrock_grad(x: &[f64]) -> Vec<f64> {
        vec![
            -2.0 * (1.0 - x[0]) - 400.0 * x[0] * (x[1] - x[0] * x[0]),
            200.0 * (x[1] - x[0] * x[0]),
        ]
    }

    #[test]
    fn quadratic_reaches_minimum() {
        let (f, g) = quadratic_about(&[1.0, -2.0, 3.0]);
        for method in [Method::QuasiNewton, Method::GradientDescent] {
            let config = OptimizerConfig {
                method,
                gradient_tolerance: 1e-10,
                ..OptimizerConfig::default()
            };
            let (x, trace) = minimize(&f, &g, &[0.0, 0.0, 0.0], &config).unwrap();
            assert!(trace.converged, "{method:?} did not converge");
            for (xi, ai) in x.iter().zip([1.0, -2.0, 3.0]) {
                assert!((xi - ai).abs() <= 1e-8, "{method:?}: {xi} vs {ai}");
            }
        }
    }

    #[test]
    fn rosenbrock_quasi_newton() {
        let config = OptimizerConfig::default();
        let (x, trace) = minimize(rosenbrock, rosenbrock_grad, &[-1.2, 1.0], &config).unwrap();
        assert!(trace.converged);
        assert!((x[0] - 1.0).abs() < 1e-4 && (x[1] - 1.0).abs() < 1e-4, "{x:?}");
    }

    #[test]
    fn trace_is_monotone_descent() {
        let config = OptimizerConfig::default();
        let (_, trace) = minimize(rosenbrock, rosenbrock_grad, &[-1.2, 1.0], &config).unwrap();
        assert!(trace.objective_values.len() >= 2);
        for pair in trace.objective_values.windows(2) {
            assert!(pair[1] <= pair[0], "ascent step: {} -> {}", pair[0], pair[1]);
        }
        assert!(trace.objective_values.last().unwrap() <= &trace.objective_values[0]);
        assert_eq!(trace.objective_values.len(), trace.iterations + 1);
    }

    #[test]
    fn iteration_cap_is_not_an_error() {
        let config = OptimizerConfig {
            max_iterations: 3,
            ..OptimizerConfig::default()
        };
        let (_, trace) = minimize(rosenbrock, rosenbrock_grad, &[-1.2, 1.0], &config).unwrap();
        assert!(!trace.converged);
        assert_eq!(trace.iterations, 3);
    }

    #[test]
    fn non_finite_start_is_an_error() {
        let config = OptimizerConfig::default();
        let e = minimize(|_| f64::NAN, |x| x.to_vec(), &[1.0], &config).unwrap_err();
        match e {
            DalcError::NonFiniteEvaluation { iteration, last_point } => {
                assert_eq!(iteration, 0);
                assert_eq!(last_point, vec![1.0]);
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn non_finite_trial_points_are_backtracked_over() {
        // Finite only on x < 1; the minimum sits at 0.9. Quasi-Newton trial
        // steps that jump past 1 must be rejected, not treated as fatal.
        let f = |x: &[f64]| {
            if x[0] >= 1.0 {
                f64::NAN
            } else {
                (x[0] - 0.9) * (x[0] - 0.9)
            }
        };
        let g = |x: &[f64]| vec![2.0 * (x[0] - 0.9)];
        let config = OptimizerConfig {
            gradient_tolerance: 1e-9,
            ..OptimizerConfig::default()
        };
        let (x, trace) = minimize(f, g, &[0.0], &config).unwrap();
        assert!(trace.converged);
        assert!((x[0] - 0.9).abs() < 1e-8);
    }

    #[test]
    fn deterministic_across_runs() {
        let config = OptimizerConfig::default();
        let run = || minimize(rosenbrock, rosenbrock_grad, &[-1.2, 1.0], &config).unwrap();
        let (x1, t1) = run();
        let (x2, t2) = run();
        assert_eq!(x1, x2);
        assert_eq!(t1, t2);
    }

    #[test]
    fn config_validation() {
        let bad_iter = OptimizerConfig {
            max_iterations: 0,
            ..OptimizerConfig::default()
        };
        assert!(bad_iter.validate().is_err());
        let bad_tol = OptimizerConfig {
            gradient_tolerance: 0.0,
            ..OptimizerConfig::default()
        };
        assert!(bad_tol.validate().is_err());
        let bad_ls = OptimizerConfig {
            line_search: LineSearchParams {
                sufficient_decrease: 1.0,
                backtrack_factor: 0.5,
            },
            ..OptimizerConfig::default()
        };
        assert!(bad_ls.validate().is_err());
    }

    #[test]
    fn converged_flag_matches_tolerance() {
        let (f, g) = quadratic_about(&[2.0]);
        let config = OptimizerConfig {
            gradient_tolerance: 1e-7,
            ..OptimizerConfig::default()
        };
        let (_, trace) = minimize(&f, &g, &[10.0], &config).unwrap();
        assert!(trace.converged);
        assert!(trace.final_gradient_norm <= 1e-7);
    }
}
