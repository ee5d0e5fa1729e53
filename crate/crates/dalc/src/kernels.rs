//! Kernel functions and Gram-matrix construction for the dual training form.

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, FeatureVector};
use crate::error::{DalcError, Result};

/// Kernel family and parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelSpec {
    Linear,
    Rbf { gamma: f64 },
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        if let KernelSpec::Rbf { gamma } = self {
            if !gamma.is_finite() || *gamma <= 0.0 {
                return Err(DalcError::invalid("gamma", format!("must be > 0, got {gamma}")));
            }
        }
        Ok(())
    }
}

/// Squared Euclidean distance from precomputed squared norms and a dot
/// product. Works for sparse vectors without densifying; clamped at zero
/// because rounding can push near-identical points slightly negative.
fn squared_distance(sq_x: f64, sq_y: f64, dot: f64) -> f64 {
    (sq_x + sq_y - 2.0 * dot).max(0.0)
}

/// Evaluate the kernel on two vectors of equal dimension.
pub fn kernel_eval(spec: KernelSpec, x: &FeatureVector, y: &FeatureVector) -> Result<f64> {
    spec.validate()?;
    if x.dim() != y.dim() {
        return Err(DalcError::DimensionMismatch {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    Ok(match spec {
        KernelSpec::Linear => x.dot(y),
        KernelSpec::Rbf { gamma } => {
            let d2 = squared_distance(x.squared_norm(), y.squared_norm(), x.dot(y));
            (-gamma * d2).exp()
        }
    })
}

/// Dense symmetric kernel matrix over the concatenated sample
/// (source points first, then target points), stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    size: usize,
    entries: Vec<f64>,
}

impl GramMatrix {
    /// Number of rows (= columns).
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.size..(i + 1) * self.size]
    }

    /// Matrix-vector product `K v`.
    pub fn mat_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.size {
            return Err(DalcError::DimensionMismatch {
                expected: self.size,
                got: v.len(),
            });
        }
        let mut out = vec![0.0; self.size];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).iter().zip(v).map(|(k, x)| k * x).sum();
        }
        Ok(out)
    }

    /// Quadratic form `vᵀ K v`.
    pub fn quad_form(&self, v: &[f64]) -> Result<f64> {
        let kv = self.mat_vec(v)?;
        Ok(kv.iter().zip(v).map(|(a, b)| a * b).sum())
    }
}

/// Build the Gram matrix over source-then-target points.
///
/// The upper triangle is computed once and mirrored, so the result is
/// exactly symmetric.
pub fn gram(spec: KernelSpec, source: &Dataset, target: &Dataset) -> Result<GramMatrix> {
    spec.validate()?;
    let m = source.len() + target.len();
    if m == 0 {
        return Err(DalcError::EmptySample("gram over empty combined sample"));
    }
    if !source.is_empty() && !target.is_empty() && source.dim() != target.dim() {
        return Err(DalcError::DimensionMismatch {
            expected: source.dim(),
            got: target.dim(),
        });
    }

    let points: Vec<&FeatureVector> = source.points().iter().chain(target.points()).collect();
    let sq_norms: Vec<f64> = match spec {
        KernelSpec::Rbf { .. } => points.iter().map(|p| p.squared_norm()).collect(),
        KernelSpec::Linear => Vec::new(),
    };

    let mut entries = vec![0.0; m * m];
    for i in 0..m {
        for j in i..m {
            let dot = points[i].dot(points[j]);
            let k = match spec {
                KernelSpec::Linear => dot,
                KernelSpec::Rbf { gamma } => {
                    (-gamma * squared_distance(sq_norms[i], sq_norms[j], dot)).exp()
                }
            };
            entries[i * m + j] = k;
            entries[j * m + i] = k;
        }
    }
    Ok(GramMatrix { size: m, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense(v: &[f64]) -> FeatureVector {
        FeatureVector::Dense(v.to_vec())
    }

    fn random_dataset(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Dataset {
        let rows = (0..n)
            .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        Dataset::from_rows(rows, None).unwrap()
    }

    #[test]
    fn rbf_zero_distance_is_one() {
        let x = dense(&[0.3, -0.7]);
        let k = kernel_eval(KernelSpec::Rbf { gamma: 1.0 }, &x, &x).unwrap();
        assert_eq!(k, 1.0);
    }

    #[test]
    fn linear_dot_product() {
        let k = kernel_eval(KernelSpec::Linear, &dense(&[1.0, 2.0]), &dense(&[3.0, -1.0])).unwrap();
        assert_eq!(k, 1.0);
    }

    #[test]
    fn rbf_unit_distance_closed_form() {
        let k = kernel_eval(
            KernelSpec::Rbf { gamma: 1.0 },
            &dense(&[0.0, 0.0]),
            &dense(&[1.0, 0.0]),
        )
        .unwrap();
        assert!((k - 0.36787944117144233).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let e = kernel_eval(KernelSpec::Linear, &dense(&[1.0]), &dense(&[1.0, 2.0])).unwrap_err();
        assert!(matches!(e, DalcError::DimensionMismatch { .. }));
    }

    #[test]
    fn nonpositive_gamma_rejected() {
        let x = dense(&[1.0]);
        assert!(kernel_eval(KernelSpec::Rbf { gamma: 0.0 }, &x, &x).is_err());
        assert!(kernel_eval(KernelSpec::Rbf { gamma: -2.0 }, &x, &x).is_err());
    }

    #[test]
    fn gram_same_point_rbf_all_ones() {
        let source = Dataset::from_rows(vec![vec![0.5, 0.5]], Some(vec![1.0])).unwrap();
        let target = Dataset::from_rows(vec![vec![0.5, 0.5]], None).unwrap();
        let k = gram(KernelSpec::Rbf { gamma: 1.0 }, &source, &target).unwrap();
        assert_eq!(k.size(), 2);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(k.get(i, j), 1.0);
            }
        }
    }

    #[test]
    fn gram_orthonormal_basis_is_identity() {
        let source = Dataset::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]], None).unwrap();
        let k = gram(KernelSpec::Linear, &source, &Dataset::empty(2)).unwrap();
        assert_eq!(k.get(0, 0), 1.0);
        assert_eq!(k.get(1, 1), 1.0);
        assert_eq!(k.get(0, 1), 0.0);
        assert_eq!(k.get(1, 0), 0.0);
    }

    #[test]
    fn gram_matches_pairwise_eval() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let source = random_dataset(&mut rng, 3, 4);
        let target = random_dataset(&mut rng, 2, 4);
        let all: Vec<&FeatureVector> = source.points().iter().chain(target.points()).collect();
        for spec in [KernelSpec::Linear, KernelSpec::Rbf { gamma: 0.7 }] {
            let k = gram(spec, &source, &target).unwrap();
            assert_eq!(k.size(), 5);
            for i in 0..5 {
                for j in 0..5 {
                    let direct = kernel_eval(spec, all[i], all[j]).unwrap();
                    assert!(
                        (k.get(i, j) - direct).abs() < 1e-12,
                        "mismatch at ({i},{j}) for {spec:?}"
                    );
                    assert_eq!(k.get(i, j), k.get(j, i), "asymmetry at ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn linear_gram_equals_naive_xxt() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let source = random_dataset(&mut rng, 4, 6);
        let target = random_dataset(&mut rng, 3, 6);
        let k = gram(KernelSpec::Linear, &source, &target).unwrap();
        let all: Vec<&FeatureVector> = source.points().iter().chain(target.points()).collect();
        for i in 0..7 {
            for j in 0..7 {
                let mut dot = 0.0;
                for c in 0..6 {
                    let get = |p: &FeatureVector| match p {
                        FeatureVector::Dense(v) => v[c],
                        _ => unreachable!(),
                    };
                    dot += get(all[i]) * get(all[j]);
                }
                assert!((k.get(i, j) - dot).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rbf_gram_entries_in_unit_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let source = random_dataset(&mut rng, 6, 3);
        let k = gram(KernelSpec::Rbf { gamma: 2.0 }, &source, &Dataset::empty(3)).unwrap();
        for i in 0..6 {
            assert_eq!(k.get(i, i), 1.0);
            for j in 0..6 {
                let v = k.get(i, j);
                assert!(v > 0.0 && v <= 1.0, "entry ({i},{j}) = {v} out of (0,1]");
            }
        }
    }

    #[test]
    fn sparse_and_dense_representations_agree() {
        let dense_rows = vec![vec![1.0, 0.0, 2.0], vec![0.0, 3.0, 0.0], vec![1.0, 1.0, 1.0]];
        let sparse_pts = vec![
            FeatureVector::Sparse {
                dim: 3,
                indices: vec![0, 2],
                values: vec![1.0, 2.0],
            },
            FeatureVector::Sparse {
                dim: 3,
                indices: vec![1],
                values: vec![3.0],
            },
            FeatureVector::Sparse {
                dim: 3,
                indices: vec![0, 1, 2],
                values: vec![1.0, 1.0, 1.0],
            },
        ];
        let as_dense = Dataset::from_rows(dense_rows, None).unwrap();
        let as_sparse = Dataset::unlabeled(sparse_pts).unwrap();
        for spec in [KernelSpec::Linear, KernelSpec::Rbf { gamma: 0.5 }] {
            let kd = gram(spec, &as_dense, &Dataset::empty(3)).unwrap();
            let ks = gram(spec, &as_sparse, &Dataset::empty(3)).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    assert!((kd.get(i, j) - ks.get(i, j)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn empty_combined_sample_rejected() {
        let e = gram(KernelSpec::Linear, &Dataset::empty(2), &Dataset::empty(2)).unwrap_err();
        assert!(matches!(e, DalcError::EmptySample(_)));
    }

    #[test]
    fn mat_vec_and_quad_form_match_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let source = random_dataset(&mut rng, 4, 3);
        let k = gram(KernelSpec::Rbf { gamma: 1.0 }, &source, &Dataset::empty(3)).unwrap();
        let v = [0.5, -1.0, 2.0, 0.25];
        let kv = k.mat_vec(&v).unwrap();
        let mut quad = 0.0;
        for i in 0..4 {
            let mut row = 0.0;
            for j in 0..4 {
                row += k.get(i, j) * v[j];
            }
            assert!((kv[i] - row).abs() < 1e-12);
            quad += v[i] * row;
        }
        assert!((k.quad_form(&v).unwrap() - quad).abs() < 1e-12);
        assert!(k.mat_vec(&v[..3]).is_err());
    }
}
