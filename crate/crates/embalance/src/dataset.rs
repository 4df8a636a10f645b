//! Labeled embedding datasets: data model, CSV/binary file formats,
//! imbalance profiles, subsampling, and synthetic Gaussian-mixture generation.
//!
//! Embedding rows are kept as `f64` in memory so downstream geometry
//! (interpolation, range envelopes, gradients) meets 1e-9 tolerances.
//! The binary file format stores 32-bit floats; loading widens exactly,
//! saving rounds to the nearest `f32`.

use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use ndarray::{Array2, ArrayView1};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::derive_seed;

/// Magic bytes opening the binary embedding format.
pub const BINARY_MAGIC: [u8; 4] = *b"EMB1";

/// On-disk representation of an embedding file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FileFormat {
    /// `label,f0,...,f{d-1}` header, one row per instance, 9 significant digits.
    Csv,
    /// `EMB1` magic, little-endian u32 n/d/C, u32 labels, f32 features row-major.
    Binary,
}

/// A dense feature-embedding matrix with one class label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledEmbeddingSet {
    features: Array2<f64>,
    labels: Vec<usize>,
    class_count: usize,
}

impl LabeledEmbeddingSet {
    /// Build a set, validating shape, label range, and finiteness.
    ///
    /// An empty (zero-row) set is constructible but is refused by [`save`]
    /// and by every operation that needs data.
    pub fn new(features: Array2<f64>, labels: Vec<usize>, class_count: usize) -> Result<Self> {
        if features.ncols() == 0 {
            return Err(Error::data("embedding dimension must be at least 1"));
        }
        if class_count < 2 {
            return Err(Error::data(format!(
                "class count must be at least 2, got {class_count}"
            )));
        }
        if features.nrows() != labels.len() {
            return Err(Error::data(format!(
                "feature rows ({}) do not match label count ({})",
                features.nrows(),
                labels.len()
            )));
        }
        for (row, &label) in labels.iter().enumerate() {
            if label >= class_count {
                return Err(Error::data(format!(
                    "label {label} out of range [0, {class_count}) at row {row}"
                )));
            }
        }
        for (row, r) in features.rows().into_iter().enumerate() {
            if r.iter().any(|v| !v.is_finite()) {
                return Err(Error::data(format!("non-finite feature value at row {row}")));
            }
        }
        Ok(Self {
            features,
            labels,
            class_count,
        })
    }

    /// Number of rows.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Embedding dimension d.
    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    /// Number of classes C.
    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn row(&self, index: usize) -> ArrayView1<'_, f64> {
        self.features.row(index)
    }

    /// Per-class row counts, indexed by class.
    pub fn histogram(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.class_count];
        for &label in &self.labels {
            counts[label] += 1;
        }
        counts
    }

    /// First class with no rows, if any.
    pub fn first_empty_class(&self) -> Option<usize> {
        self.histogram().iter().position(|&c| c == 0)
    }
}

/// Per-class lists of row indices into a [`LabeledEmbeddingSet`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassPartition {
    classes: Vec<Vec<usize>>,
}

impl ClassPartition {
    /// Row indices of one class, in ascending row order.
    pub fn class(&self, class: usize) -> &[usize] {
        &self.classes[class]
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// Per-class sizes (the label histogram).
    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }
}

/// Group row indices by class label.
pub fn partition_by_class(set: &LabeledEmbeddingSet) -> ClassPartition {
    let mut classes = vec![Vec::new(); set.class_count()];
    for (row, &label) in set.labels().iter().enumerate() {
        classes[label].push(row);
    }
    ClassPartition { classes }
}

/// Non-increasing per-class target counts, majority class first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImbalanceProfile {
    counts: Vec<usize>,
}

impl ImbalanceProfile {
    /// Validate and wrap explicit per-class counts.
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.len() < 2 {
            return Err(Error::config("profile needs at least 2 classes"));
        }
        if counts.iter().any(|&c| c == 0) {
            return Err(Error::config("profile counts must be positive"));
        }
        if counts.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::config("profile counts must be non-increasing"));
        }
        Ok(Self { counts })
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn class_count(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// Geometrically decaying class counts: `counts[c] = round(n_max * rho^(-c/(C-1)))`.
///
/// The endpoints are pinned to `n_max` and `round(n_max / rho)`. Parameters
/// that would round any class to zero rows are rejected.
pub fn exponential_profile(class_count: usize, n_max: usize, rho: f64) -> Result<ImbalanceProfile> {
    if class_count < 2 {
        return Err(Error::config(format!(
            "class count must be at least 2, got {class_count}"
        )));
    }
    if n_max < class_count {
        return Err(Error::config(format!(
            "n_max ({n_max}) must be at least the class count ({class_count})"
        )));
    }
    if !rho.is_finite() || rho < 1.0 {
        return Err(Error::config(format!("imbalance ratio must be >= 1, got {rho}")));
    }
    let denom = (class_count - 1) as f64;
    let counts: Vec<usize> = (0..class_count)
        .map(|c| {
            if c == 0 {
                n_max as f64
            } else if c == class_count - 1 {
                (n_max as f64 / rho).round()
            } else {
                (n_max as f64 * rho.powf(-(c as f64) / denom)).round()
            }
        })
        .map(|v| v as usize)
        .collect();
    if counts.iter().any(|&c| c == 0) {
        return Err(Error::config(format!(
            "imbalance ratio {rho} leaves a class with zero rows (n_max {n_max})"
        )));
    }
    ImbalanceProfile::new(counts)
}

/// Draw rows without replacement so the output histogram equals the profile.
///
/// Selection is per class with a deterministically derived sub-seed; within a
/// class the kept rows stay in ascending original order.
pub fn subsample_to_profile(
    set: &LabeledEmbeddingSet,
    profile: &ImbalanceProfile,
    seed: u64,
) -> Result<LabeledEmbeddingSet> {
    if profile.class_count() != set.class_count() {
        return Err(Error::config(format!(
            "profile has {} classes but set has {}",
            profile.class_count(),
            set.class_count()
        )));
    }
    let partition = partition_by_class(set);
    let mut keep = Vec::with_capacity(profile.total());
    for (class, &want) in profile.counts().iter().enumerate() {
        let rows = partition.class(class);
        if rows.len() < want {
            return Err(Error::data(format!(
                "class {class} has {} rows, profile needs {want}",
                rows.len()
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, class as u64));
        let mut chosen = rows.to_vec();
        chosen.shuffle(&mut rng);
        chosen.truncate(want);
        chosen.sort_unstable();
        keep.extend(chosen);
    }
    let mut features = Array2::zeros((keep.len(), set.dim()));
    let mut labels = Vec::with_capacity(keep.len());
    for (out, &row) in keep.iter().enumerate() {
        features.row_mut(out).assign(&set.row(row));
        labels.push(set.labels()[row]);
    }
    LabeledEmbeddingSet::new(features, labels, set.class_count())
}

/// Sample a labeled set from an isotropic Gaussian mixture.
///
/// Class means are drawn uniformly on the radius-`mean_radius` hypersphere
/// (stream 0 of the seed), then each class's rows add `sigma`-scaled
/// standard-normal noise (stream `1 + class`). Rows are grouped by class.
pub fn gaussian_mixture(
    class_count: usize,
    dim: usize,
    profile: &ImbalanceProfile,
    mean_radius: f64,
    sigma: f64,
    seed: u64,
) -> Result<LabeledEmbeddingSet> {
    if dim == 0 {
        return Err(Error::config("dimension must be at least 1"));
    }
    if profile.class_count() != class_count {
        return Err(Error::config(format!(
            "profile has {} classes, expected {class_count}",
            profile.class_count()
        )));
    }
    if !mean_radius.is_finite() || mean_radius <= 0.0 {
        return Err(Error::config(format!("mean radius must be > 0, got {mean_radius}")));
    }
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::config(format!("sigma must be >= 0, got {sigma}")));
    }

    let mut mean_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0));
    let means: Vec<Vec<f64>> = (0..class_count)
        .map(|_| random_sphere_point(&mut mean_rng, dim, mean_radius))
        .collect();

    let total = profile.total();
    let mut features = Array2::zeros((total, dim));
    let mut labels = Vec::with_capacity(total);
    let mut out = 0;
    for (class, &count) in profile.counts().iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 1 + class as u64));
        for _ in 0..count {
            for (f, &m) in means[class].iter().enumerate() {
                let noise: f64 = rng.sample(StandardNormal);
                features[(out, f)] = m + sigma * noise;
            }
            labels.push(class);
            out += 1;
        }
    }
    LabeledEmbeddingSet::new(features, labels, class_count)
}

fn random_sphere_point(rng: &mut ChaCha8Rng, dim: usize, radius: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.iter().map(|x| radius * x / norm).collect();
        }
    }
}

/// Read a labeled embedding set from disk.
pub fn load(path: impl AsRef<Path>, format: FileFormat) -> Result<LabeledEmbeddingSet> {
    let path = path.as_ref();
    match format {
        FileFormat::Csv => load_csv(path),
        FileFormat::Binary => load_binary(path),
    }
}

/// Write a labeled embedding set to disk.
///
/// Refuses empty sets and sets with an unrepresented class; parent
/// directories are created as needed.
pub fn save(set: &LabeledEmbeddingSet, path: impl AsRef<Path>, format: FileFormat) -> Result<()> {
    if set.is_empty() {
        return Err(Error::data("refusing to save a set with zero rows"));
    }
    if let Some(class) = set.first_empty_class() {
        return Err(Error::data(format!(
            "refusing to save: class {class} has no rows"
        )));
    }
    let path = path.as_ref();
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    match format {
        FileFormat::Csv => save_csv(set, path),
        FileFormat::Binary => {
            let file = File::create(path)?;
            let mut w = BufWriter::new(file);
            write_binary_raw(&mut w, set.features(), set.labels(), set.class_count())?;
            w.flush()?;
            Ok(())
        }
    }
}

fn save_csv(set: &LabeledEmbeddingSet, path: &Path) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    write!(w, "label")?;
    for f in 0..set.dim() {
        write!(w, ",f{f}")?;
    }
    w.write_all(b"\n")?;
    for (row, &label) in set.labels().iter().enumerate() {
        write!(w, "{label}")?;
        for v in set.row(row) {
            // 9 significant digits
            write!(w, ",{v:.8e}")?;
        }
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

fn load_csv(path: &Path) -> Result<LabeledEmbeddingSet> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::data(format!("{}: empty file", path.display())))?;
    let cols: Vec<&str> = header.trim_end_matches('\r').split(',').collect();
    if cols.len() < 2 || cols[0] != "label" {
        return Err(Error::data(format!(
            "{}: malformed header at line 1: expected `label,f0,...`",
            path.display()
        )));
    }
    for (i, col) in cols[1..].iter().enumerate() {
        if *col != format!("f{i}") {
            return Err(Error::data(format!(
                "{}: malformed header at line 1: expected column `f{i}`, got `{col}`",
                path.display()
            )));
        }
    }
    let dim = cols.len() - 1;

    let mut labels = Vec::new();
    let mut values = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != dim + 1 {
            return Err(Error::data(format!(
                "{}: row-length mismatch at line {line_no}: expected {} fields, got {}",
                path.display(),
                dim + 1,
                fields.len()
            )));
        }
        let label: usize = fields[0].parse().map_err(|_| {
            Error::data(format!(
                "{}: malformed label `{}` at line {line_no}",
                path.display(),
                fields[0]
            ))
        })?;
        for field in &fields[1..] {
            let v: f64 = field.parse().map_err(|_| {
                Error::data(format!(
                    "{}: malformed value `{field}` at line {line_no}",
                    path.display()
                ))
            })?;
            if !v.is_finite() {
                return Err(Error::data(format!(
                    "{}: non-finite value at line {line_no}",
                    path.display()
                )));
            }
            values.push(v);
        }
        labels.push(label);
    }
    if labels.is_empty() {
        return Err(Error::data(format!("{}: no data rows", path.display())));
    }
    let class_count = 1 + *labels.iter().max().expect("non-empty");
    let n = labels.len();
    let features = Array2::from_shape_vec((n, dim), values).expect("shape checked per row");
    LabeledEmbeddingSet::new(features, labels, class_count)
}

/// Write the raw binary layout. Shared with synthetic-batch serialization,
/// which stores only minority rows and so skips the full-set invariants.
pub(crate) fn write_binary_raw<W: Write>(
    w: &mut W,
    features: &Array2<f64>,
    labels: &[usize],
    class_count: usize,
) -> Result<()> {
    let n = labels.len();
    let dim = features.ncols();
    if n > u32::MAX as usize || dim > u32::MAX as usize || class_count > u32::MAX as usize {
        return Err(Error::data("set too large for the binary format"));
    }
    w.write_all(&BINARY_MAGIC)?;
    w.write_all(&(n as u32).to_le_bytes())?;
    w.write_all(&(dim as u32).to_le_bytes())?;
    w.write_all(&(class_count as u32).to_le_bytes())?;
    for &label in labels {
        w.write_all(&(label as u32).to_le_bytes())?;
    }
    for row in features.rows() {
        for &v in row {
            w.write_all(&(v as f32).to_le_bytes())?;
        }
    }
    Ok(())
}

fn load_binary(path: &Path) -> Result<LabeledEmbeddingSet> {
    let mut file = File::open(path)?;
    let mut bytes = Vec::new();
    file.read_to_end(&mut bytes)?;
    let name = path.display();

    if bytes.len() < 16 || bytes[..4] != BINARY_MAGIC {
        return Err(Error::data(format!("{name}: malformed header: missing EMB1 magic")));
    }
    let read_u32 = |off: usize| u32::from_le_bytes(bytes[off..off + 4].try_into().expect("in range"));
    let n = read_u32(4) as usize;
    let dim = read_u32(8) as usize;
    let class_count = read_u32(12) as usize;

    let labels_bytes = n
        .checked_mul(4)
        .ok_or_else(|| Error::data(format!("{name}: malformed header: size overflow")))?;
    let feature_bytes = n
        .checked_mul(dim)
        .and_then(|v| v.checked_mul(4))
        .ok_or_else(|| Error::data(format!("{name}: malformed header: size overflow")))?;
    let expected = 16 + labels_bytes + feature_bytes;
    if bytes.len() != expected {
        return Err(Error::data(format!(
            "{name}: file length {} does not match header (expected {expected})",
            bytes.len()
        )));
    }

    let mut labels = Vec::with_capacity(n);
    for row in 0..n {
        let label = read_u32(16 + 4 * row) as usize;
        if label >= class_count {
            return Err(Error::data(format!(
                "{name}: label {label} out of range [0, {class_count}) at row {row}"
            )));
        }
        labels.push(label);
    }
    let base = 16 + labels_bytes;
    let mut values = Vec::with_capacity(n * dim);
    for i in 0..n * dim {
        let off = base + 4 * i;
        let v = f32::from_le_bytes(bytes[off..off + 4].try_into().expect("length checked"));
        if !v.is_finite() {
            return Err(Error::data(format!(
                "{name}: non-finite value at row {}",
                i / dim.max(1)
            )));
        }
        values.push(f64::from(v));
    }
    let features = Array2::from_shape_vec((n, dim), values).expect("length checked");
    LabeledEmbeddingSet::new(features, labels, class_count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use tempfile::tempdir;

    fn tiny_set() -> LabeledEmbeddingSet {
        LabeledEmbeddingSet::new(
            array![[0.0, 1.0], [2.0, 3.0], [4.0, 5.0]],
            vec![0, 1, 0],
            2,
        )
        .unwrap()
    }

    #[test]
    fn new_rejects_bad_inputs() {
        assert!(LabeledEmbeddingSet::new(array![[1.0]], vec![0], 1).is_err());
        assert!(LabeledEmbeddingSet::new(array![[1.0]], vec![2], 2).is_err());
        assert!(LabeledEmbeddingSet::new(array![[f64::NAN]], vec![0], 2).is_err());
        assert!(LabeledEmbeddingSet::new(array![[1.0], [2.0]], vec![0], 2).is_err());
    }

    #[test]
    fn partition_matches_labels() {
        let p = partition_by_class(&tiny_set());
        assert_eq!(p.class(0), &[0, 2]);
        assert_eq!(p.class(1), &[1]);
    }

    #[test]
    fn partition_single_label_class() {
        let set = LabeledEmbeddingSet::new(
            array![[0.0], [1.0], [2.0], [3.0]],
            vec![0, 0, 0, 0],
            2,
        )
        .unwrap();
        let p = partition_by_class(&set);
        assert_eq!(p.class(0).len(), 4);
        assert!(p.class(1).is_empty());
    }

    #[test]
    fn partition_sizes_match_histogram() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 200;
        let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..5)).collect();
        let features = Array2::from_shape_fn((n, 3), |_| rng.gen::<f64>());
        let set = LabeledEmbeddingSet::new(features, labels.clone(), 5).unwrap();
        let p = partition_by_class(&set);
        // independent histogram
        let mut hist = vec![0usize; 5];
        for &l in &labels {
            hist[l] += 1;
        }
        assert_eq!(p.sizes(), hist);
        assert_eq!(p.sizes().iter().sum::<usize>(), n);
    }

    #[test]
    fn exponential_profile_frozen_values() {
        // frozen from the closed form round(n_max * rho^(-c/(C-1)))
        let p = exponential_profile(10, 5000, 100.0).unwrap();
        assert_eq!(
            p.counts(),
            &[5000, 2997, 1797, 1077, 646, 387, 232, 139, 83, 50]
        );
        let p = exponential_profile(2, 100, 4.0).unwrap();
        assert_eq!(p.counts(), &[100, 25]);
    }

    #[test]
    fn exponential_profile_rho_one_is_flat() {
        let p = exponential_profile(5, 70, 1.0).unwrap();
        assert_eq!(p.counts(), &[70; 5]);
    }

    #[test]
    fn exponential_profile_rejects_bad_params() {
        assert!(exponential_profile(1, 10, 2.0).is_err());
        assert!(exponential_profile(3, 2, 2.0).is_err());
        assert!(exponential_profile(3, 10, 0.5).is_err());
        // last class would round to zero rows
        assert!(exponential_profile(3, 10, 100.0).is_err());
    }

    #[test]
    fn exponential_profile_endpoint_ratio() {
        for &(c, n, rho) in &[(10usize, 5000usize, 100.0f64), (5, 800, 40.0), (7, 300, 8.0)] {
            let p = exponential_profile(c, n, rho).unwrap();
            let first = p.counts()[0] as f64;
            let last = p.counts()[c - 1] as f64;
            let ratio = first / last;
            assert!(ratio >= rho * (1.0 - 1.0 / last) - 1e-9);
            assert!(ratio <= rho * (1.0 + 1.0 / last) + 1e-9);
            assert!(p.counts().windows(2).all(|w| w[1] <= w[0]));
        }
    }

    #[test]
    fn subsample_matches_profile_and_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let labels: Vec<usize> = (0..40).map(|i| i % 2).collect();
        let features = Array2::from_shape_fn((40, 4), |_| rng.gen::<f64>());
        let set = LabeledEmbeddingSet::new(features, labels, 2).unwrap();
        let profile = ImbalanceProfile::new(vec![12, 5]).unwrap();
        let a = subsample_to_profile(&set, &profile, 11).unwrap();
        let b = subsample_to_profile(&set, &profile, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.histogram(), vec![12, 5]);
        let c = subsample_to_profile(&set, &profile, 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn subsample_full_profile_is_permutation() {
        let set = tiny_set();
        let profile = ImbalanceProfile::new(vec![2, 1]).unwrap();
        let out = subsample_to_profile(&set, &profile, 5).unwrap();
        assert_eq!(out.histogram(), vec![2, 1]);
        // rows come back grouped by class, ascending within a class
        assert_eq!(out.row(0).to_vec(), vec![0.0, 1.0]);
        assert_eq!(out.row(1).to_vec(), vec![4.0, 5.0]);
        assert_eq!(out.row(2).to_vec(), vec![2.0, 3.0]);
    }

    #[test]
    fn subsample_insufficient_rows_errors() {
        let set = tiny_set();
        let profile = ImbalanceProfile::new(vec![3, 2]).unwrap();
        assert!(subsample_to_profile(&set, &profile, 0).is_err());
    }

    #[test]
    fn mixture_sigma_zero_collapses_to_means() {
        let profile = ImbalanceProfile::new(vec![4, 3]).unwrap();
        let set = gaussian_mixture(2, 3, &profile, 2.0, 0.0, 7).unwrap();
        assert_eq!(set.histogram(), vec![4, 3]);
        for row in 1..4 {
            assert_eq!(set.row(row), set.row(0));
        }
        for row in 5..7 {
            assert_eq!(set.row(row), set.row(4));
        }
        // means sit on the radius-2 sphere
        let norm = set.row(0).iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - 2.0).abs() < 1e-9);
    }

    #[test]
    fn mixture_is_deterministic_per_seed() {
        let profile = ImbalanceProfile::new(vec![10, 6]).unwrap();
        let a = gaussian_mixture(2, 4, &profile, 3.0, 0.5, 99).unwrap();
        let b = gaussian_mixture(2, 4, &profile, 3.0, 0.5, 99).unwrap();
        assert_eq!(a, b);
        let c = gaussian_mixture(2, 4, &profile, 3.0, 0.5, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn mixture_sample_mean_near_class_mean() {
        // law of large numbers: sample mean within 5*sigma/sqrt(n) per feature
        let n = 10_000;
        let sigma = 0.8;
        let profile = ImbalanceProfile::new(vec![n, 2]).unwrap();
        let noisy = gaussian_mixture(2, 4, &profile, 3.0, sigma, 123).unwrap();
        let exact = gaussian_mixture(2, 4, &profile, 3.0, 0.0, 123).unwrap();
        let tol = 5.0 * sigma / (n as f64).sqrt();
        for f in 0..4 {
            let mean = (0..n).map(|r| noisy.features()[(r, f)]).sum::<f64>() / n as f64;
            assert!(
                (mean - exact.features()[(0, f)]).abs() < tol,
                "feature {f}: |{mean} - {}| >= {tol}",
                exact.features()[(0, f)]
            );
        }
    }

    #[test]
    fn csv_load_example() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("tiny.csv");
        fs::write(&path, "label,f0,f1\n0,1.0,2.0\n1,3.0,4.0\n").unwrap();
        let set = load(&path, FileFormat::Csv).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.dim(), 2);
        assert_eq!(set.class_count(), 2);
        assert_eq!(set.row(1).to_vec(), vec![3.0, 4.0]);
    }

    #[test]
    fn csv_nan_reports_line() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        fs::write(&path, "label,f0\n0,1.0\n1,nan\n").unwrap();
        let err = load(&path, FileFormat::Csv).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("non-finite"), "{msg}");
        assert!(msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn csv_malformed_header_and_rows() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("h.csv");
        fs::write(&path, "id,f0\n0,1.0\n").unwrap();
        assert!(load(&path, FileFormat::Csv).unwrap_err().to_string().contains("header"));
        fs::write(&path, "label,f0,f1\n0,1.0\n").unwrap();
        let msg = load(&path, FileFormat::Csv).unwrap_err().to_string();
        assert!(msg.contains("row-length mismatch") && msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn csv_roundtrip_nine_significant_digits() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("rt.csv");
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let features = Array2::from_shape_fn((30, 5), |_| rng.gen_range(-50.0..50.0));
        let labels: Vec<usize> = (0..30).map(|i| i % 3).collect();
        let set = LabeledEmbeddingSet::new(features, labels, 3).unwrap();
        save(&set, &path, FileFormat::Csv).unwrap();
        let back = load(&path, FileFormat::Csv).unwrap();
        assert_eq!(back.labels(), set.labels());
        for (a, b) in back.features().iter().zip(set.features().iter()) {
            let rel = (a - b).abs() / b.abs().max(1e-300);
            assert!(rel < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn binary_roundtrip_is_identity_on_f32_sets() {
        // round-trip oracle on randomly generated sets (f32-representable values)
        let dir = tempdir().unwrap();
        for seed in 0..5 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 100;
            let features = Array2::from_shape_fn((n, 8), |_| f64::from(rng.gen::<f32>() * 10.0 - 5.0));
            let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..4)).collect();
            let set = match LabeledEmbeddingSet::new(features, labels, 4) {
                Ok(s) if s.first_empty_class().is_none() => s,
                _ => continue,
            };
            let path = dir.path().join(format!("rt{seed}.bin"));
            save(&set, &path, FileFormat::Binary).unwrap();
            let back = load(&path, FileFormat::Binary).unwrap();
            assert_eq!(back, set);
            // save(load(f)) byte-compares equal
            let path2 = dir.path().join(format!("rt{seed}b.bin"));
            save(&back, &path2, FileFormat::Binary).unwrap();
            assert_eq!(fs::read(&path).unwrap(), fs::read(&path2).unwrap());
        }
    }

    #[test]
    fn save_refuses_degenerate_sets() {
        let dir = tempdir().unwrap();
        let empty = LabeledEmbeddingSet::new(Array2::zeros((0, 2)), vec![], 2).unwrap();
        assert!(save(&empty, dir.path().join("e.bin"), FileFormat::Binary).is_err());
        let gap = LabeledEmbeddingSet::new(array![[1.0], [2.0]], vec![0, 0], 2).unwrap();
        assert!(save(&gap, dir.path().join("g.bin"), FileFormat::Binary).is_err());
    }

    #[test]
    fn binary_rejects_corruption() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("c.bin");
        save(&tiny_set(), &path, FileFormat::Binary).unwrap();
        let mut bytes = fs::read(&path).unwrap();
        bytes[0] = b'X';
        fs::write(&path, &bytes).unwrap();
        assert!(load(&path, FileFormat::Binary).unwrap_err().to_string().contains("magic"));

        save(&tiny_set(), &path, FileFormat::Binary).unwrap();
        let mut bytes = fs::read(&path).unwrap();
        bytes.truncate(bytes.len() - 1);
        fs::write(&path, &bytes).unwrap();
        assert!(load(&path, FileFormat::Binary).is_err());

        // out-of-range label
        save(&tiny_set(), &path, FileFormat::Binary).unwrap();
        let mut bytes = fs::read(&path).unwrap();
        bytes[16..20].copy_from_slice(&7u32.to_le_bytes());
        fs::write(&path, &bytes).unwrap();
        let msg = load(&path, FileFormat::Binary).unwrap_err().to_string();
        assert!(msg.contains("out of range") && msg.contains("row 0"), "{msg}");
    }
}
