//! Per-class feature-range envelopes and the generalization gap.
//!
//! The gap for a class is the mean floored exceedance of the test set's
//! per-feature [min, max] envelope beyond the train set's: a test extremum
//! falling inside the training range contributes zero. The overall gap is
//! the mean over classes with data on both sides.

use serde::{Deserialize, Serialize};

use crate::dataset::{partition_by_class, LabeledEmbeddingSet};
use crate::error::{Error, Result};

/// Per-class, per-feature (min, max) envelopes. Classes with no rows carry
/// no envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRanges {
    per_class: Vec<Option<Vec<(f64, f64)>>>,
    dim: usize,
}

impl FeatureRanges {
    /// Wrap explicit envelopes, validating `min <= max` per feature.
    pub fn from_parts(per_class: Vec<Option<Vec<(f64, f64)>>>, dim: usize) -> Result<Self> {
        for (class, ranges) in per_class.iter().enumerate() {
            if let Some(ranges) = ranges {
                if ranges.len() != dim {
                    return Err(Error::data(format!(
                        "class {class} has {} feature ranges, expected {dim}",
                        ranges.len()
                    )));
                }
                for (f, &(lo, hi)) in ranges.iter().enumerate() {
                    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
                        return Err(Error::data(format!(
                            "invalid range [{lo}, {hi}] for class {class}, feature {f}"
                        )));
                    }
                }
            }
        }
        Ok(Self { per_class, dim })
    }

    pub fn class_count(&self) -> usize {
        self.per_class.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Envelope of one class, `None` when the class had no rows.
    pub fn class(&self, class: usize) -> Option<&[(f64, f64)]> {
        self.per_class[class].as_deref()
    }
}

/// Per-feature min/max over each class's rows. Errors if any class in
/// `[0, C)` has no rows.
pub fn feature_ranges(set: &LabeledEmbeddingSet) -> Result<FeatureRanges> {
    if let Some(class) = set.first_empty_class() {
        return Err(Error::data(format!(
            "cannot compute feature ranges: class {class} has no rows"
        )));
    }
    let partition = partition_by_class(set);
    let rows: Vec<Vec<usize>> = (0..set.class_count())
        .map(|c| partition.class(c).to_vec())
        .collect();
    Ok(ranges_of_rows(set, &rows))
}

/// Per-feature min/max over explicit per-class row subsets; empty subsets
/// yield `None` envelopes.
pub fn ranges_of_rows(set: &LabeledEmbeddingSet, rows_by_class: &[Vec<usize>]) -> FeatureRanges {
    let dim = set.dim();
    let per_class = rows_by_class
        .iter()
        .map(|rows| {
            if rows.is_empty() {
                return None;
            }
            let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); dim];
            for &row in rows {
                for (f, &v) in set.row(row).iter().enumerate() {
                    let (lo, hi) = &mut ranges[f];
                    *lo = lo.min(v);
                    *hi = hi.max(v);
                }
            }
            Some(ranges)
        })
        .collect();
    FeatureRanges { per_class, dim }
}

/// Per-class gaps plus their mean. Skipped classes (no envelope on one
/// side) carry `null` in `per_class` and are listed in `skipped`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub per_class: Vec<Option<f64>>,
    /// Mean of the non-skipped per-class gaps; 0 when every class is skipped.
    pub overall: f64,
    pub skipped: Vec<usize>,
}

/// Mean floored exceedance of test envelopes beyond train envelopes.
///
/// For class `c` and feature `f` the two boundary terms are
/// `max(0, train_min - test_min)` and `max(0, test_max - train_max)`;
/// the class gap is the mean of its `2d` terms.
pub fn generalization_gap(train: &FeatureRanges, test: &FeatureRanges) -> Result<GapReport> {
    if train.class_count() != test.class_count() {
        return Err(Error::data(format!(
            "range sets cover different class counts: {} vs {}",
            train.class_count(),
            test.class_count()
        )));
    }
    if train.dim() != test.dim() {
        return Err(Error::data(format!(
            "range sets have different dimensions: {} vs {}",
            train.dim(),
            test.dim()
        )));
    }
    let dim = train.dim();
    let mut per_class = Vec::with_capacity(train.class_count());
    let mut skipped = Vec::new();
    for class in 0..train.class_count() {
        match (train.class(class), test.class(class)) {
            (Some(tr), Some(te)) => {
                let mut total = 0.0;
                for f in 0..dim {
                    let (train_min, train_max) = tr[f];
                    let (test_min, test_max) = te[f];
                    total += (train_min - test_min).max(0.0);
                    total += (test_max - train_max).max(0.0);
                }
                per_class.push(Some(total / (2.0 * dim as f64)));
            }
            _ => {
                per_class.push(None);
                skipped.push(class);
            }
        }
    }
    let present: Vec<f64> = per_class.iter().filter_map(|g| *g).collect();
    let overall = if present.is_empty() {
        0.0
    } else {
        present.iter().sum::<f64>() / present.len() as f64
    };
    Ok(GapReport {
        per_class,
        overall,
        skipped,
    })
}

/// Gap reports split by prediction outcome on the test set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeGaps {
    /// Test rows of class c predicted as c, against class-c train ranges.
    pub tp: GapReport,
    /// Test rows predicted as c with a different true label, against
    /// class-c train ranges.
    pub fp: GapReport,
}

/// Compare true-positive and false-positive test envelopes against the
/// train envelopes, per predicted class. Empty outcome subsets are skipped.
pub fn gap_by_outcome(
    train: &LabeledEmbeddingSet,
    test: &LabeledEmbeddingSet,
    predictions: &[usize],
) -> Result<OutcomeGaps> {
    if predictions.len() != test.len() {
        return Err(Error::data(format!(
            "{} predictions for {} test rows",
            predictions.len(),
            test.len()
        )));
    }
    if train.dim() != test.dim() || train.class_count() != test.class_count() {
        return Err(Error::data(
            "train and test sets must share dimension and class count".to_string(),
        ));
    }
    let class_count = train.class_count();
    if let Some(&bad) = predictions.iter().find(|&&p| p >= class_count) {
        return Err(Error::data(format!(
            "prediction {bad} out of range [0, {class_count})"
        )));
    }

    let train_ranges = feature_ranges(train)?;
    let mut tp_rows = vec![Vec::new(); class_count];
    let mut fp_rows = vec![Vec::new(); class_count];
    for (row, (&label, &pred)) in test.labels().iter().zip(predictions).enumerate() {
        if label == pred {
            tp_rows[pred].push(row);
        } else {
            fp_rows[pred].push(row);
        }
    }
    let tp = generalization_gap(&train_ranges, &ranges_of_rows(test, &tp_rows))?;
    let fp = generalization_gap(&train_ranges, &ranges_of_rows(test, &fp_rows))?;
    Ok(OutcomeGaps { tp, fp })
}
