//! Dataset containers, file loaders, and synthetic generators.
//!
//! Feature vectors may be dense or sparse; both support the dot products the
//! kernels need. Zero-norm examples are rejected at load time because every
//! loss term divides the margin by the example norm.

use std::fmt::Write as _;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{DalcError, Result};

/// A single example's features, dense or sparse.
///
/// Sparse vectors keep strictly ascending zero-based indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureVector {
    Dense(Vec<f64>),
    Sparse {
        dim: usize,
        indices: Vec<u32>,
        values: Vec<f64>,
    },
}

impl FeatureVector {
    pub fn dim(&self) -> usize {
        match self {
            FeatureVector::Dense(v) => v.len(),
            FeatureVector::Sparse { dim, .. } => *dim,
        }
    }

    /// Dot product with another vector of the same dimension.
    pub fn dot(&self, other: &FeatureVector) -> f64 {
        match (self, other) {
            (FeatureVector::Dense(a), FeatureVector::Dense(b)) => {
                a.iter().zip(b).map(|(x, y)| x * y).sum()
            }
            (FeatureVector::Dense(d), FeatureVector::Sparse { indices, values, .. })
            | (FeatureVector::Sparse { indices, values, .. }, FeatureVector::Dense(d)) => indices
                .iter()
                .zip(values)
                .map(|(&i, &v)| d[i as usize] * v)
                .sum(),
            (
                FeatureVector::Sparse {
                    indices: ia,
                    values: va,
                    ..
                },
                FeatureVector::Sparse {
                    indices: ib,
                    values: vb,
                    ..
                },
            ) => {
                let mut sum = 0.0;
                let (mut p, mut q) = (0, 0);
                while p < ia.len() && q < ib.len() {
                    match ia[p].cmp(&ib[q]) {
                        std::cmp::Ordering::Less => p += 1,
                        std::cmp::Ordering::Greater => q += 1,
                        std::cmp::Ordering::Equal => {
                            sum += va[p] * vb[q];
                            p += 1;
                            q += 1;
                        }
                    }
                }
                sum
            }
        }
    }

    /// Dot product with a dense weight slice of the same dimension.
    pub fn dot_slice(&self, w: &[f64]) -> f64 {
        match self {
            FeatureVector::Dense(v) => v.iter().zip(w).map(|(x, y)| x * y).sum(),
            FeatureVector::Sparse { indices, values, .. } => indices
                .iter()
                .zip(values)
                .map(|(&i, &v)| w[i as usize] * v)
                .sum(),
        }
    }

    /// Accumulate `coef * self` into a dense buffer.
    pub fn add_scaled_into(&self, coef: f64, out: &mut [f64]) {
        match self {
            FeatureVector::Dense(v) => {
                for (o, x) in out.iter_mut().zip(v) {
                    *o += coef * x;
                }
            }
            FeatureVector::Sparse { indices, values, .. } => {
                for (&i, &v) in indices.iter().zip(values) {
                    out[i as usize] += coef * v;
                }
            }
        }
    }

    pub fn squared_norm(&self) -> f64 {
        match self {
            FeatureVector::Dense(v) => v.iter().map(|x| x * x).sum(),
            FeatureVector::Sparse { values, .. } => values.iter().map(|x| x * x).sum(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.squared_norm().sqrt()
    }

    fn validate(&self, index: usize) -> Result<()> {
        match self {
            FeatureVector::Dense(v) => {
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(DalcError::NonFinite("feature value"));
                }
            }
            FeatureVector::Sparse { dim, indices, values } => {
                if indices.len() != values.len() {
                    return Err(DalcError::invalid(
                        "sparse vector",
                        format!("{} indices but {} values", indices.len(), values.len()),
                    ));
                }
                if values.iter().any(|x| !x.is_finite()) {
                    return Err(DalcError::NonFinite("feature value"));
                }
                if indices.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(DalcError::invalid(
                        "sparse vector",
                        "indices must be strictly ascending",
                    ));
                }
                if let Some(&last) = indices.last() {
                    if last as usize >= *dim {
                        return Err(DalcError::DimensionMismatch {
                            expected: *dim,
                            got: last as usize + 1,
                        });
                    }
                }
            }
        }
        if self.squared_norm() == 0.0 {
            return Err(DalcError::ZeroNormExample(index));
        }
        Ok(())
    }
}

/// A sample of feature vectors with optional `{-1, +1}` labels.
///
/// Example norms are cached at construction; construction rejects zero-norm
/// vectors, non-finite values, and inconsistent dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Vec<FeatureVector>,
    labels: Option<Vec<f64>>,
    norms: Vec<f64>,
    dim: usize,
}

impl Dataset {
    pub fn labeled(points: Vec<FeatureVector>, labels: Vec<f64>) -> Result<Self> {
        if labels.len() != points.len() {
            return Err(DalcError::invalid(
                "labels",
                format!("{} labels for {} points", labels.len(), points.len()),
            ));
        }
        for &y in &labels {
            if y != 1.0 && y != -1.0 {
                return Err(DalcError::invalid("labels", format!("label {y} is not ±1")));
            }
        }
        Self::build(points, Some(labels))
    }

    pub fn unlabeled(points: Vec<FeatureVector>) -> Result<Self> {
        Self::build(points, None)
    }

    /// An empty unlabeled sample with an explicit dimension.
    pub fn empty(dim: usize) -> Self {
        Dataset {
            points: Vec::new(),
            labels: None,
            norms: Vec::new(),
            dim,
        }
    }

    fn build(points: Vec<FeatureVector>, labels: Option<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map(|p| p.dim()).unwrap_or(0);
        let mut norms = Vec::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if p.dim() != dim {
                return Err(DalcError::DimensionMismatch {
                    expected: dim,
                    got: p.dim(),
                });
            }
            p.validate(i)?;
            norms.push(p.norm());
        }
        Ok(Dataset {
            points,
            labels,
            norms,
            dim,
        })
    }

    /// Convenience constructor from dense rows.
    pub fn from_rows(rows: Vec<Vec<f64>>, labels: Option<Vec<f64>>) -> Result<Self> {
        let points = rows.into_iter().map(FeatureVector::Dense).collect();
        match labels {
            Some(l) => Self::labeled(points, l),
            None => Self::unlabeled(points),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_labeled(&self) -> bool {
        self.labels.is_some()
    }

    pub fn points(&self) -> &[FeatureVector] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &FeatureVector {
        &self.points[i]
    }

    pub fn labels(&self) -> Option<&[f64]> {
        self.labels.as_deref()
    }

    pub fn label(&self, i: usize) -> Option<f64> {
        self.labels.as_ref().map(|l| l[i])
    }

    /// Cached Euclidean norm of point `i` (always positive).
    pub fn norm(&self, i: usize) -> f64 {
        self.norms[i]
    }

    /// The same points without labels.
    pub fn strip_labels(&self) -> Dataset {
        Dataset {
            points: self.points.clone(),
            labels: None,
            norms: self.norms.clone(),
            dim: self.dim,
        }
    }

    /// Subset by index list, keeping labels when present.
    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            points: idx.iter().map(|&i| self.points[i].clone()).collect(),
            labels: self
                .labels
                .as_ref()
                .map(|l| idx.iter().map(|&i| l[i]).collect()),
            norms: idx.iter().map(|&i| self.norms[i]).collect(),
            dim: self.dim,
        }
    }

    /// Replace the labels (used by the reverse-validation self-labeling step).
    pub fn with_labels(&self, labels: Vec<f64>) -> Result<Dataset> {
        Dataset::labeled(self.points.clone(), labels)
    }
}

// ---------------------------------------------------------------------------
// Sparse text format
// ---------------------------------------------------------------------------

/// Load the sparse text format: one example per line,
/// `label idx:val idx:val ...` with 1-based strictly ascending indices.
/// Label `0` marks an unlabeled example; a file must be entirely labeled or
/// entirely unlabeled. The dimension is the largest index seen.
pub fn load_sparse(path: impl AsRef<Path>) -> Result<Dataset> {
    load_sparse_impl(path.as_ref(), None)
}

/// As [`load_sparse`] with an explicit dimension override; indices beyond the
/// override are rejected.
pub fn load_sparse_with_dim(path: impl AsRef<Path>, dim: usize) -> Result<Dataset> {
    load_sparse_impl(path.as_ref(), Some(dim))
}

fn load_sparse_impl(path: &Path, dim_override: Option<usize>) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)?;
    let path_str = path.display().to_string();
    let err = |line: usize, message: String| DalcError::Parse {
        path: path_str.clone(),
        line,
        message,
    };

    let mut rows: Vec<(f64, Vec<u32>, Vec<f64>)> = Vec::new();
    let mut max_index = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let label_tok = parts.next().unwrap();
        let label: f64 = label_tok
            .parse()
            .map_err(|_| err(lineno, format!("bad label `{label_tok}`")))?;
        if label != 1.0 && label != -1.0 && label != 0.0 {
            return Err(err(lineno, format!("label must be +1, -1 or 0, got `{label_tok}`")));
        }
        let mut indices = Vec::new();
        let mut values = Vec::new();
        let mut prev_index = 0usize;
        for tok in parts {
            let (idx_str, val_str) = tok
                .split_once(':')
                .ok_or_else(|| err(lineno, format!("expected `index:value`, got `{tok}`")))?;
            let idx: usize = idx_str
                .parse()
                .map_err(|_| err(lineno, format!("bad feature index `{idx_str}`")))?;
            if idx == 0 {
                return Err(err(lineno, "feature indices are 1-based".to_string()));
            }
            if idx <= prev_index {
                return Err(err(
                    lineno,
                    format!("feature indices must be strictly ascending (saw {idx} after {prev_index})"),
                ));
            }
            let val: f64 = val_str
                .parse()
                .map_err(|_| err(lineno, format!("bad feature value `{val_str}`")))?;
            if !val.is_finite() {
                return Err(err(lineno, format!("non-finite feature value `{val_str}`")));
            }
            prev_index = idx;
            indices.push((idx - 1) as u32);
            values.push(val);
        }
        if let Some(d) = dim_override {
            if prev_index > d {
                return Err(err(
                    lineno,
                    format!("feature index {prev_index} exceeds declared dimension {d}"),
                ));
            }
        }
        max_index = max_index.max(prev_index);
        rows.push((label, indices, values));
    }

    if rows.is_empty() {
        return Err(DalcError::EmptySample("no examples in file"));
    }
    let dim = dim_override.unwrap_or(max_index);
    let labeled = rows[0].0 != 0.0;
    if rows.iter().any(|(y, _, _)| (*y != 0.0) != labeled) {
        return Err(DalcError::invalid(
            "labels",
            "file mixes labeled and unlabeled examples",
        ));
    }

    let mut points = Vec::with_capacity(rows.len());
    let mut labels = Vec::with_capacity(rows.len());
    for (y, indices, values) in rows {
        points.push(FeatureVector::Sparse { dim, indices, values });
        labels.push(y);
    }
    if labeled {
        Dataset::labeled(points, labels)
    } else {
        Dataset::unlabeled(points)
    }
}

/// Write a dataset in the sparse text format. Unlabeled examples get label
/// `0`; values use Rust's shortest round-trip float formatting, so a reload
/// reproduces every value bit-exactly.
pub fn save_sparse(data: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    for i in 0..data.len() {
        let label = data.label(i).unwrap_or(0.0);
        if label >= 0.0 && label != 0.0 {
            out.push('+');
        }
        let _ = write!(out, "{}", label as i64);
        match data.point(i) {
            FeatureVector::Dense(v) => {
                for (j, &x) in v.iter().enumerate() {
                    if x != 0.0 {
                        let _ = write!(out, " {}:{}", j + 1, x);
                    }
                }
            }
            FeatureVector::Sparse { indices, values, .. } => {
                for (&j, &x) in indices.iter().zip(values) {
                    let _ = write!(out, " {}:{}", j + 1, x);
                }
            }
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// Load a rectangular numeric CSV with a header row. When `label_column`
/// names a column, that column holds the ±1 labels and the remaining columns
/// are features; otherwise every column is a feature and the set is unlabeled.
pub fn load_csv(path: impl AsRef<Path>, label_column: Option<&str>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let path_str = path.display().to_string();
    let err = |line: usize, message: String| DalcError::Parse {
        path: path_str.clone(),
        line,
        message,
    };

    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| DalcError::EmptySample("empty CSV file"))?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let label_idx = match label_column {
        Some(name) => Some(
            columns
                .iter()
                .position(|c| *c == name)
                .ok_or_else(|| err(1, format!("no column named `{name}` in header")))?,
        ),
        None => None,
    };

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (lineno, line) in lines {
        let lineno = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != columns.len() {
            return Err(err(
                lineno,
                format!("expected {} cells, got {}", columns.len(), cells.len()),
            ));
        }
        let mut features = Vec::with_capacity(cells.len());
        for (j, cell) in cells.iter().enumerate() {
            let v: f64 = cell
                .parse()
                .map_err(|_| err(lineno, format!("non-numeric cell `{cell}`")))?;
            if Some(j) == label_idx {
                labels.push(v);
            } else {
                features.push(v);
            }
        }
        rows.push(features);
    }
    if rows.is_empty() {
        return Err(DalcError::EmptySample("no data rows in CSV"));
    }
    let points = rows.into_iter().map(FeatureVector::Dense).collect();
    if label_idx.is_some() {
        Dataset::labeled(points, labels)
    } else {
        Dataset::unlabeled(points)
    }
}

// ---------------------------------------------------------------------------
// Intertwining moons
// ---------------------------------------------------------------------------

/// Configuration for the two-moons generator.
///
/// Each domain draws `n_per_domain` points from two interleaving half-circles
/// (class +1 on the upper arc of radius 1 centered at the origin, class -1 on
/// the reflected lower arc centered at (1, 0.5)) with isotropic Gaussian
/// noise. The target sample is rotated by `rotation_degrees` about its own
/// centroid. Generation uses a ChaCha8 stream, so outputs are identical for a
/// given seed on every platform.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MoonsConfig {
    pub n_per_domain: usize,
    pub noise: f64,
    pub rotation_degrees: f64,
    pub seed: u64,
}

impl MoonsConfig {
    fn validate(&self) -> Result<()> {
        if self.n_per_domain < 2 {
            return Err(DalcError::invalid("n_per_domain", "need at least 2 points"));
        }
        if !self.noise.is_finite() || self.noise < 0.0 {
            return Err(DalcError::invalid("noise", "must be finite and >= 0"));
        }
        if !self.rotation_degrees.is_finite() {
            return Err(DalcError::invalid("rotation_degrees", "must be finite"));
        }
        Ok(())
    }
}

fn moon_arcs(n: usize) -> (Vec<[f64; 2]>, Vec<f64>) {
    // Upper arc gets the extra point when n is odd.
    let n_pos = n.div_ceil(2);
    let n_neg = n - n_pos;
    let mut pts = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n_pos {
        let t = if n_pos == 1 {
            0.0
        } else {
            std::f64::consts::PI * i as f64 / (n_pos - 1) as f64
        };
        pts.push([t.cos(), t.sin()]);
        labels.push(1.0);
    }
    for i in 0..n_neg {
        let t = if n_neg == 1 {
            0.0
        } else {
            std::f64::consts::PI * i as f64 / (n_neg - 1) as f64
        };
        pts.push([1.0 - t.cos(), 0.5 - t.sin()]);
        labels.push(-1.0);
    }
    (pts, labels)
}

/// Generate a source/target pair of moons samples.
///
/// Returns the labeled source, the unlabeled target, and the target's true
/// labels. The oracle labels are for evaluation only and must never reach
/// training.
pub fn make_moons(config: &MoonsConfig) -> Result<(Dataset, Dataset, Vec<f64>)> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let sample = |rng: &mut ChaCha8Rng| -> Result<(Vec<[f64; 2]>, Vec<f64>)> {
        let (mut pts, labels) = moon_arcs(config.n_per_domain);
        if config.noise > 0.0 {
            let normal = Normal::new(0.0, config.noise)
                .map_err(|e| DalcError::invalid("noise", e.to_string()))?;
            for p in &mut pts {
                p[0] += normal.sample(rng);
                p[1] += normal.sample(rng);
            }
        }
        Ok((pts, labels))
    };

    let (source_pts, source_labels) = sample(&mut rng)?;
    let (mut target_pts, target_labels) = sample(&mut rng)?;

    if config.rotation_degrees != 0.0 {
        let n = target_pts.len() as f64;
        let cx = target_pts.iter().map(|p| p[0]).sum::<f64>() / n;
        let cy = target_pts.iter().map(|p| p[1]).sum::<f64>() / n;
        let theta = config.rotation_degrees.to_radians();
        let (sin, cos) = theta.sin_cos();
        for p in &mut target_pts {
            let (dx, dy) = (p[0] - cx, p[1] - cy);
            p[0] = cx + cos * dx - sin * dy;
            p[1] = cy + sin * dx + cos * dy;
        }
    }

    let to_rows = |pts: Vec<[f64; 2]>| pts.into_iter().map(|p| p.to_vec()).collect();
    let source = Dataset::from_rows(to_rows(source_pts), Some(source_labels))?;
    let target = Dataset::from_rows(to_rows(target_pts), None)?;
    Ok((source, target, target_labels))
}

// ---------------------------------------------------------------------------
// Decision-surface export
// ---------------------------------------------------------------------------

/// Evaluate a 2-d model over a `resolution × resolution` lattice covering
/// the given axis ranges (inclusive) and write the values as CSV with
/// columns `x1,x2,value`. The sign of each value is the predicted label.
pub fn export_decision_grid(
    model: &crate::model::DalcModel,
    x1_range: (f64, f64),
    x2_range: (f64, f64),
    resolution: usize,
    path: impl AsRef<Path>,
) -> Result<()> {
    if model.dim() != 2 {
        return Err(DalcError::DimensionMismatch {
            expected: 2,
            got: model.dim(),
        });
    }
    if resolution < 2 {
        return Err(DalcError::invalid("resolution", "need at least 2 points per axis"));
    }
    for (name, (lo, hi)) in [("x1_range", x1_range), ("x2_range", x2_range)] {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(DalcError::invalid(name, "need finite bounds with min < max"));
        }
    }
    let coord = |(lo, hi): (f64, f64), i: usize| {
        lo + (hi - lo) * i as f64 / (resolution - 1) as f64
    };
    let mut out = String::from("x1,x2,value\n");
    for i in 0..resolution {
        let x1 = coord(x1_range, i);
        for j in 0..resolution {
            let x2 = coord(x2_range, j);
            let v = model.decision_value(&FeatureVector::Dense(vec![x1, x2]))?;
            let _ = writeln!(out, "{x1},{x2},{v}");
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn tmpfile(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn sparse_basic_line() {
        let f = tmpfile("+1 1:0.5 3:2.0\n-1 2:1.0\n");
        let d = load_sparse(f.path()).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.dim(), 3);
        assert_eq!(d.labels(), Some(&[1.0, -1.0][..]));
        let dense = FeatureVector::Dense(vec![0.5, 0.0, 2.0]);
        assert_eq!(d.point(0).dot(&dense), 0.25 + 4.0);
    }

    #[test]
    fn sparse_unlabeled_convention() {
        let f = tmpfile("0 2:1.0\n0 1:3.0\n");
        let d = load_sparse(f.path()).unwrap();
        assert!(!d.is_labeled());
        assert_eq!(d.dim(), 2);
    }

    #[test]
    fn sparse_duplicate_index_rejected() {
        let f = tmpfile("+1 1:0.5 1:2.0\n");
        let e = load_sparse(f.path()).unwrap_err();
        assert!(e.to_string().contains("ascending"), "{e}");
    }

    #[test]
    fn sparse_non_ascending_rejected() {
        let f = tmpfile("+1 3:0.5 2:2.0\n");
        assert!(load_sparse(f.path()).is_err());
    }

    #[test]
    fn sparse_malformed_line_reports_line_number() {
        let f = tmpfile("+1 1:0.5\n-1 oops\n");
        let e = load_sparse(f.path()).unwrap_err();
        match e {
            DalcError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn sparse_mixed_labels_rejected() {
        let f = tmpfile("+1 1:1\n0 1:1\n");
        assert!(load_sparse(f.path()).is_err());
    }

    #[test]
    fn sparse_zero_based_index_rejected() {
        let f = tmpfile("+1 0:1.0\n");
        assert!(load_sparse(f.path()).is_err());
    }

    #[test]
    fn sparse_roundtrip_bit_exact() {
        let pts = vec![
            FeatureVector::Sparse {
                dim: 4,
                indices: vec![0, 2],
                values: vec![0.1, -2.5e-7],
            },
            FeatureVector::Sparse {
                dim: 4,
                indices: vec![3],
                values: vec![std::f64::consts::PI],
            },
        ];
        let data = Dataset::labeled(pts, vec![1.0, -1.0]).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        save_sparse(&data, f.path()).unwrap();
        let back = load_sparse_with_dim(f.path(), 4).unwrap();
        assert_eq!(data, back);
    }

    #[test]
    fn csv_load() {
        let f = tmpfile("x1,x2,label\n0.5,1.0,1\n-0.5,2.0,-1\n");
        let d = load_csv(f.path(), Some("label")).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.dim(), 2);
        assert_eq!(d.labels(), Some(&[1.0, -1.0][..]));
    }

    #[test]
    fn csv_ragged_row_rejected() {
        let f = tmpfile("x1,x2\n0.5,1.0\n2.0\n");
        assert!(load_csv(f.path(), None).is_err());
    }

    #[test]
    fn csv_non_numeric_cell_rejected() {
        let f = tmpfile("x1,x2\n0.5,apple\n");
        assert!(load_csv(f.path(), None).is_err());
    }

    #[test]
    fn zero_norm_rejected() {
        let rows = vec![vec![1.0, 0.0], vec![0.0, 0.0]];
        let e = Dataset::from_rows(rows, None).unwrap_err();
        match e {
            DalcError::ZeroNormExample(i) => assert_eq!(i, 1),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn bad_label_rejected() {
        let rows = vec![vec![1.0]];
        assert!(Dataset::from_rows(rows, Some(vec![2.0])).is_err());
    }

    #[test]
    fn sparse_dot_products_agree_with_dense() {
        let s1 = FeatureVector::Sparse {
            dim: 5,
            indices: vec![0, 2, 4],
            values: vec![1.0, 2.0, 3.0],
        };
        let s2 = FeatureVector::Sparse {
            dim: 5,
            indices: vec![2, 3],
            values: vec![5.0, 7.0],
        };
        let d1 = FeatureVector::Dense(vec![1.0, 0.0, 2.0, 0.0, 3.0]);
        let d2 = FeatureVector::Dense(vec![0.0, 0.0, 5.0, 7.0, 0.0]);
        assert_eq!(s1.dot(&s2), 10.0);
        assert_eq!(d1.dot(&d2), 10.0);
        assert_eq!(s1.dot(&d2), 10.0);
        assert_eq!(d1.dot(&s2), 10.0);
        assert_eq!(s1.squared_norm(), 14.0);
    }

    #[test]
    fn moons_deterministic_per_seed() {
        let cfg = MoonsConfig {
            n_per_domain: 20,
            noise: 0.1,
            rotation_degrees: 30.0,
            seed: 7,
        };
        let (s1, t1, o1) = make_moons(&cfg).unwrap();
        let (s2, t2, o2) = make_moons(&cfg).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(t1, t2);
        assert_eq!(o1, o2);
    }

    #[test]
    fn moons_balanced_and_sized() {
        let cfg = MoonsConfig {
            n_per_domain: 30,
            noise: 0.05,
            rotation_degrees: 0.0,
            seed: 3,
        };
        let (source, target, oracle) = make_moons(&cfg).unwrap();
        assert_eq!(source.len(), 30);
        assert_eq!(target.len(), 30);
        assert_eq!(oracle.len(), 30);
        let pos = source.labels().unwrap().iter().filter(|&&y| y == 1.0).count();
        assert_eq!(pos, 15);
        assert!(!target.is_labeled());
    }

    #[test]
    fn moons_zero_noise_arcs_identical_across_domains() {
        let cfg = MoonsConfig {
            n_per_domain: 10,
            noise: 0.0,
            rotation_degrees: 0.0,
            seed: 1,
        };
        let (source, target, oracle) = make_moons(&cfg).unwrap();
        // With no noise and no rotation both domains sit on the same arcs.
        assert_eq!(source.points(), target.points());
        assert_eq!(source.labels().unwrap(), &oracle[..]);
    }

    #[test]
    fn moons_half_turn_swaps_arcs() {
        // The two arcs are point-symmetric about the sample centroid, so a
        // 180° rotation maps each arc onto the other: the rotated +1 arc
        // lands on the -1 arc at the same parameter values.
        let cfg = MoonsConfig {
            n_per_domain: 12,
            noise: 0.0,
            rotation_degrees: 180.0,
            seed: 5,
        };
        let (source, target, _) = make_moons(&cfg).unwrap();
        let half = cfg.n_per_domain / 2;
        for i in 0..cfg.n_per_domain {
            let j = if i < half { i + half } else { i - half };
            let (FeatureVector::Dense(rot), FeatureVector::Dense(orig)) =
                (target.point(i), source.point(j))
            else {
                panic!("moons points are dense");
            };
            assert!((rot[0] - orig[0]).abs() < 1e-12, "x mismatch at {i}");
            assert!((rot[1] - orig[1]).abs() < 1e-12, "y mismatch at {i}");
        }
    }

    #[test]
    fn moons_rotation_preserves_centroid() {
        let base = MoonsConfig {
            n_per_domain: 40,
            noise: 0.1,
            rotation_degrees: 0.0,
            seed: 11,
        };
        let rotated = MoonsConfig {
            rotation_degrees: 50.0,
            ..base
        };
        let (_, t0, _) = make_moons(&base).unwrap();
        let (_, t50, _) = make_moons(&rotated).unwrap();
        let centroid = |d: &Dataset| {
            let mut c = [0.0, 0.0];
            for p in d.points() {
                if let FeatureVector::Dense(v) = p {
                    c[0] += v[0];
                    c[1] += v[1];
                }
            }
            [c[0] / d.len() as f64, c[1] / d.len() as f64]
        };
        let c0 = centroid(&t0);
        let c50 = centroid(&t50);
        assert!((c0[0] - c50[0]).abs() < 1e-9);
        assert!((c0[1] - c50[1]).abs() < 1e-9);
    }
}
