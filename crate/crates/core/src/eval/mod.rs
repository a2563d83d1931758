//! Evaluation: ROC-AUC, score tables and average ranks, the Bayesian
//! signed-rank test, leave-one-out protocol and synthetic datasets.

mod auc;
mod loo;
mod rope;
mod synth;
mod table;

pub use auc::roc_auc;
pub use loo::{loo_evaluate, LooReport, LOTUS_COLUMN};
pub use rope::{
    rope_test, rope_test_samples, write_rope_samples, Region, RopeResult, RopeSample,
    DEFAULT_ROPE_SAMPLES,
};
pub use synth::{generate_synthetic, Family};
pub use table::{average_rank, ScoreRow, ScoreTable, MISSING};
