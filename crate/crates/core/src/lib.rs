//! Zero-shot model selection for unsupervised outlier detection.
//!
//! A new, unlabeled dataset is compared against a store of previously
//! meta-trained datasets. Each dataset is mapped to a point cloud (subsample,
//! standardize, FastICA), clouds are compared with the low-rank
//! Gromov-Wasserstein discrepancy, and the detector pipeline tuned on the
//! nearest stored dataset is recommended.
//!
//! - [`ot`]: discrete measures, Sinkhorn, entropic and low-rank Gromov-Wasserstein
//! - [`transform`]: the dataset-to-measure map
//! - [`detectors`]: KNN, HBOS, Isolation Forest, LODA, ABOD
//! - [`meta_trainer`]: label-aware evolutionary search over detector configs
//! - [`meta_store`]: on-disk registry of datasets and their tuned pipelines
//! - [`selector`]: nearest-dataset recommendation
//! - [`eval`]: ROC-AUC, leave-one-out evaluation, ranks, ROPE test, synthetic data
//! - [`cli`]: the `lotus` command-line surface

pub mod cli;
pub mod dataset;
pub mod detectors;
pub mod error;
pub mod eval;
pub mod meta_store;
pub mod meta_trainer;
pub mod ot;
pub mod selector;
pub mod transform;

pub use dataset::Dataset;
pub use detectors::{fit_score, Detector, PipelineConfig};
pub use error::{Error, Result};
pub use meta_store::{MetaEntry, MetaStore};
pub use meta_trainer::{search, SearchBudget, SearchResult};
pub use ot::{entropic_gw, gw_lowrank, DiscreteMeasure, GwResult, LowRankCoupling, SolverConfig};
pub use selector::{lotus_select, SelectionReport};
pub use transform::{phi, TransformConfig};
