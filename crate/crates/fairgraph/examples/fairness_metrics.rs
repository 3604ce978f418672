//! Statistical parity and equal opportunity for node classification and
//! link prediction, plus accuracy and rank-statistic AUC.
//!
//! ```bash
//! cargo run --example fairness_metrics
//! ```

use fairgraph::fixtures;
use fairgraph::graph::{GroupPartition, SensitiveAttrs};
use fairgraph::metrics::{
    accuracy, auc, delta_eo_link, delta_eo_node, delta_sp_link, delta_sp_node, BinaryPredictions,
};

fn main() -> fairgraph::Result<()> {
    // node classification: groups [0,0,1,1], everyone ground-truth
    // positive, one miss in group 0
    let s = SensitiveAttrs::new(vec![0, 0, 1, 1])?;
    let preds = BinaryPredictions::new(vec![1, 1, 1, 1], vec![1, 0, 1, 1], None)?;
    println!(
        "node: accuracy {:.2}, delta_sp {:.2}, delta_eo {:.2}",
        accuracy(&preds)?,
        delta_sp_node(&preds, &s)?,
        delta_eo_node(&preds, &s)?
    );

    // scored predictions with both classes present enable AUC
    let scored = BinaryPredictions::new(
        vec![1, 0, 1, 1],
        vec![1, 0, 1, 1],
        Some(vec![0.8, 0.4, 0.7, 0.9]),
    )?;
    println!(
        "node (scored): accuracy {:.2}, AUC {:.2}, delta_sp {:.2}",
        accuracy(&scored)?,
        auc(&scored)?,
        delta_sp_node(&scored, &s)?
    );

    // link prediction over candidate pairs of the toy graph: candidates
    // are stratified inter/intra by their endpoints' groups
    let case = fixtures::case1();
    let part = GroupPartition::compute(&case.graph, &case.sensitive)?;
    let candidates = vec![(0, 5), (2, 6), (0, 1), (2, 3), (5, 6), (6, 7)];
    let link_preds = BinaryPredictions::new(
        vec![1, 1, 1, 1, 1, 1],
        vec![1, 0, 1, 1, 1, 0],
        None,
    )?;
    println!(
        "link: delta_sp {:.2}, delta_eo {:.2}",
        delta_sp_link(&link_preds, &candidates, &part)?,
        delta_eo_link(&link_preds, &candidates, &part)?
    );
    Ok(())
}
