//! Evolutionary multitasking AUC optimization.
//!
//! A cheap AUC task built from a stratified subsample of the training data is
//! optimized together with the expensive full-data AUC task. Both tasks share
//! one cost budget measured in cheap-evaluation units, exchange genetic
//! material through a multitask solver, and the cheap task's sample is
//! periodically replaced by the instances that the best expensive-task
//! classifier finds hardest to rank.
//!
//! Module map:
//!
//! * [`data`]: LIBSVM parsing, scaling, stratified sampling and k-fold splits.
//! * [`auc`]: AUC metric, regularized pairwise objective and hardness scores.
//! * [`env`]: the two-task environment, cost ledger and dynamic adjustment.
//! * [`solvers`]: single-task GA, multifactorial GA and explicit-transfer GA.
//! * [`analysis`]: rank correlation, convergence traces and benchmark statistics.

pub mod analysis;
pub mod auc;
pub mod data;
pub mod env;
mod error;
pub mod rng;
pub mod solvers;

pub use error::{Error, Result};
