//! Per-user algorithm selection for recommender systems.
//!
//! The crate builds a users × algorithms ground-truth matrix of NDCG@10
//! scores over a portfolio of recommenders, engineers user and algorithm
//! meta-features, trains gradient-boosted meta-learners with and without
//! algorithm features, and evaluates them against the single-best and
//! virtual-best baselines under nested cross-validation.

pub mod algo_features;
pub mod data;
pub mod error;
pub mod experiment;
pub mod ground_truth;
pub mod meta;
pub mod pipeline;
pub mod recommenders;
pub mod synth;
pub mod user_features;
pub mod util;

pub use error::{Error, Result};
