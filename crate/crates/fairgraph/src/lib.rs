//! Fairness-aware graph augmentation toolkit.
//!
//! Quantifies how strongly mean-aggregated node representations correlate
//! with a binary sensitive attribute, bounds that correlation analytically,
//! and rebalances graphs with four adaptive augmentations: feature masking,
//! node sampling, edge deletion, and edge addition. A randomized
//! verification harness checks the balance guarantees end to end.
//!
//! Start with the runnable examples (`cargo run --example analyze_bias`),
//! or the [`cli`] module for the file-based workflow behind the
//! `fairgraph` binary.

#![forbid(unsafe_code)]

pub mod augment;
pub mod bias;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod rng;
pub mod verify;

pub use augment::{
    apply_feature_mask, edge_add, edge_delete, fairaug, masking_probs, node_sample,
    EdgeDeletionConfig, FairAugOutcome, MaskingConfig, NodeSamplingConfig, PipelineConfig,
};
pub use bias::{
    compute_bias_report, correlation_rho, epsilon_gap, gamma1, gamma2, group_stats,
    mean_aggregate, rho_via_group_gap, theorem1_bound, AggregationConfig, BiasReport,
};
pub use error::{Error, Result};
pub use graph::{
    induced_subgraph, FeatureMatrix, Graph, GroupPartition, InducedSubgraph, PartitionCounts,
    SensitiveAttrs,
};
pub use metrics::{
    accuracy, auc, delta_eo_link, delta_eo_node, delta_sp_link, delta_sp_node, nt_xent_loss,
    BinaryPredictions, ContrastiveInputs,
};
pub use verify::{run_verification, VerifyConfig, VerifyHooks, VerifyReport};
