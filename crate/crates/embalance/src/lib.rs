//! Rebalancing toolkit for imbalanced classification in a learned embedding space.
//!
//! The library measures the per-class generalization gap between train and
//! test feature embeddings, synthesizes minority samples by interpolating
//! toward nearest enemies (and with classic same-class oversamplers),
//! fine-tunes a linear classifier head on the balanced embeddings, and
//! evaluates with skew-insensitive metrics.
//!
//! Module map:
//! - [`dataset`]: labeled embedding sets, file formats, imbalance profiles,
//!   synthetic mixtures
//! - [`gengap`]: per-class range envelopes and the generalization gap
//! - [`neighbors`]: exact K-nearest-neighbor tables and enemy extraction
//! - [`oversample`]: SMOTE, Borderline-SMOTE, Balanced-SVM, and
//!   enemy-interpolation oversampling
//! - [`head`]: linear softmax/SVM classifier head, training and diagnostics
//! - [`metrics`]: confusion matrix, balanced accuracy, G-mean, macro-F1
//! - [`pipeline`]: end-to-end runs, K sweeps, synthetic data generation,
//!   JSON reports

pub mod dataset;
pub mod error;
pub mod gengap;
pub mod head;
pub mod metrics;
pub mod neighbors;
pub mod oversample;
pub mod pipeline;
mod seed;

pub use error::{Error, Result};
