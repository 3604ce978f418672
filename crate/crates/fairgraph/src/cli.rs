//! Library-level command implementations behind the `fairgraph` binary.
//!
//! Each command is an ordinary function over paths and parsed options so
//! integration tests and embedders can call them without spawning a
//! process.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::augment::{fairaug, PipelineConfig};
use crate::bias::{compute_bias_report, AggregationConfig, BiasReport};
use crate::error::{Error, Result};
use crate::graph::{FeatureMatrix, Graph, GroupPartition, PartitionCounts, SensitiveAttrs};
use crate::io;
use crate::metrics::{
    accuracy, auc, delta_eo_link, delta_eo_node, delta_sp_link, delta_sp_node,
};
use crate::verify::{run_verification, VerifyConfig, VerifyHooks, VerifyReport};

/// Input file triple shared by `analyze` and `augment`.
#[derive(Debug, Clone)]
pub struct DatasetPaths {
    pub graph: PathBuf,
    pub features: PathBuf,
    pub sensitive: PathBuf,
    /// One-vs-rest binarization for multi-class sensitive columns.
    pub positive_class: Option<i64>,
}

pub fn load_dataset(paths: &DatasetPaths) -> Result<(Graph, FeatureMatrix, SensitiveAttrs)> {
    let features = io::read_features_csv(&paths.features)?;
    let sensitive = io::read_sensitive_csv(&paths.sensitive, paths.positive_class)?;
    if sensitive.len() != features.rows() {
        return Err(Error::invalid(format!(
            "feature file has {} nodes but sensitive file has {}",
            features.rows(),
            sensitive.len()
        )));
    }
    let edges = io::read_edge_list(&paths.graph)?;
    let graph = Graph::from_edges(&edges, features.rows())?;
    Ok((graph, features, sensitive))
}

/// `analyze` output: the full bias report plus partition cardinalities.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalyzeReport {
    #[serde(flatten)]
    pub bias: BiasReport,
    #[serde(flatten)]
    pub partition: PartitionCounts,
}

pub fn cmd_analyze(paths: &DatasetPaths, config: Option<&Path>) -> Result<AnalyzeReport> {
    if let Some(cfg_path) = config {
        io::read_pipeline_config(cfg_path)?; // validate early; analysis itself is config-free
    }
    let (graph, features, sensitive) = load_dataset(paths)?;
    let bias = compute_bias_report(&graph, &features, &sensitive, &AggregationConfig::default())?;
    let partition = GroupPartition::compute(&graph, &sensitive)?.counts();
    Ok(AnalyzeReport { bias, partition })
}

/// Output file names written by `augment` into the target directory.
pub const OUT_GRAPH: &str = "graph.edges";
pub const OUT_FEATURES: &str = "features.csv";
pub const OUT_SENSITIVE: &str = "sensitive.csv";
pub const OUT_ID_MAP: &str = "id_map.csv";
pub const OUT_BIAS_BEFORE: &str = "bias_before.json";
pub const OUT_BIAS_AFTER: &str = "bias_after.json";
pub const OUT_MANIFEST: &str = "manifest.json";

/// Runs the augmentation pipeline and writes the augmented dataset,
/// before/after bias reports, and a manifest with input/output digests.
pub fn cmd_augment(
    paths: &DatasetPaths,
    config: Option<&Path>,
    out_dir: &Path,
    seed_override: Option<u64>,
) -> Result<io::RunManifest> {
    let started = Instant::now();
    let mut cfg = match config {
        Some(p) => io::read_pipeline_config(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = seed_override {
        cfg.seed = seed;
    }
    let (graph, features, sensitive) = load_dataset(paths)?;
    let outcome = fairaug(&graph, &features, &sensitive, &cfg)?;
    for warning in &outcome.warnings {
        eprintln!("warning: {warning}");
    }

    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let at = |name: &str| out_dir.join(name);
    io::write_edge_list(&at(OUT_GRAPH), &outcome.graph)?;
    io::write_features_csv(&at(OUT_FEATURES), &outcome.features)?;
    io::write_sensitive_csv(&at(OUT_SENSITIVE), &outcome.sensitive)?;
    io::write_id_map_csv(&at(OUT_ID_MAP), &outcome.id_map)?;
    io::write_report_json(&at(OUT_BIAS_BEFORE), &outcome.before)?;
    io::write_report_json(&at(OUT_BIAS_AFTER), &outcome.after)?;

    let mut inputs = BTreeMap::new();
    inputs.insert("graph".to_string(), io::sha256_hex(&paths.graph)?);
    inputs.insert("features".to_string(), io::sha256_hex(&paths.features)?);
    inputs.insert("sensitive".to_string(), io::sha256_hex(&paths.sensitive)?);
    let mut outputs = BTreeMap::new();
    for name in [
        OUT_GRAPH,
        OUT_FEATURES,
        OUT_SENSITIVE,
        OUT_ID_MAP,
        OUT_BIAS_BEFORE,
        OUT_BIAS_AFTER,
    ] {
        outputs.insert(name.to_string(), io::sha256_hex(&at(name))?);
    }
    let manifest = io::RunManifest {
        command: "augment".to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.seed,
        config: cfg,
        inputs,
        outputs,
        duration_ms: started.elapsed().as_millis() as u64,
    };
    io::write_report_json(&at(OUT_MANIFEST), &manifest)?;
    Ok(manifest)
}

pub fn cmd_verify(trials: usize, seed: u64, hooks: &VerifyHooks) -> Result<VerifyReport> {
    run_verification(&VerifyConfig { trials, seed }, hooks)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricsMode {
    Node,
    Link,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsReport {
    pub mode: MetricsMode,
    pub records: usize,
    pub accuracy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub auc: Option<f64>,
    pub delta_sp: f64,
    pub delta_eo: f64,
}

/// Fairness/utility metrics over a predictions file. Node mode aligns the
/// sensitive attribute by record id; link mode stratifies candidate edges
/// by their endpoints' groups and requires the graph file.
pub fn cmd_metrics(
    predictions: &Path,
    sensitive: &Path,
    graph: Option<&Path>,
    mode: MetricsMode,
    positive_class: Option<i64>,
) -> Result<MetricsReport> {
    let attrs = io::read_sensitive_csv(sensitive, positive_class)?;
    match mode {
        MetricsMode::Node => {
            let (ids, preds) = io::read_node_predictions(predictions)?;
            let mut aligned = Vec::with_capacity(ids.len());
            for id in ids {
                if id >= attrs.len() {
                    return Err(Error::invalid(format!(
                        "prediction id {id} exceeds the {}-node sensitive file",
                        attrs.len()
                    )));
                }
                aligned.push(attrs.get(id));
            }
            let aligned = SensitiveAttrs::new(aligned)?;
            let auc_value = preds.score.is_some().then(|| auc(&preds)).transpose()?;
            Ok(MetricsReport {
                mode,
                records: preds.len(),
                accuracy: accuracy(&preds)?,
                auc: auc_value,
                delta_sp: delta_sp_node(&preds, &aligned)?,
                delta_eo: delta_eo_node(&preds, &aligned)?,
            })
        }
        MetricsMode::Link => {
            let graph_path = graph.ok_or_else(|| {
                Error::invalid("link mode requires --graph to build the edge partition")
            })?;
            let edges = io::read_edge_list(graph_path)?;
            let g = Graph::from_edges(&edges, attrs.len())?;
            let part = GroupPartition::compute(&g, &attrs)?;
            let (candidates, preds) = io::read_edge_predictions(predictions)?;
            let auc_value = preds.score.is_some().then(|| auc(&preds)).transpose()?;
            Ok(MetricsReport {
                mode,
                records: preds.len(),
                accuracy: accuracy(&preds)?,
                auc: auc_value,
                delta_sp: delta_sp_link(&preds, &candidates, &part)?,
                delta_eo: delta_eo_link(&preds, &candidates, &part)?,
            })
        }
    }
}
