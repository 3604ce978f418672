//! Fairness and utility metrics over supplied predictions, plus the
//! contrastive loss as a pure evaluation function.

use crate::error::{Error, Result};
use crate::graph::{FeatureMatrix, GroupPartition, SensitiveAttrs};

/// Binary labels with optional scores, for node- or edge-level records.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryPredictions {
    pub y: Vec<u8>,
    pub yhat: Vec<u8>,
    pub score: Option<Vec<f64>>,
}

impl BinaryPredictions {
    pub fn new(y: Vec<u8>, yhat: Vec<u8>, score: Option<Vec<f64>>) -> Result<BinaryPredictions> {
        if y.len() != yhat.len() {
            return Err(Error::invalid("y and yhat lengths differ"));
        }
        if y.iter().chain(&yhat).any(|&v| v > 1) {
            return Err(Error::invalid("labels must be 0 or 1"));
        }
        if let Some(s) = &score {
            if s.len() != y.len() {
                return Err(Error::invalid("score length differs from labels"));
            }
            if s.iter().any(|v| !v.is_finite() || !(0.0..=1.0).contains(v)) {
                return Err(Error::invalid("scores must be finite values in [0, 1]"));
            }
        }
        Ok(BinaryPredictions { y, yhat, score })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

fn positive_rate(values: impl Iterator<Item = u8>) -> Option<f64> {
    let mut total = 0usize;
    let mut positive = 0usize;
    for v in values {
        total += 1;
        positive += usize::from(v == 1);
    }
    (total > 0).then(|| positive as f64 / total as f64)
}

fn rate_gap(rate_a: Option<f64>, rate_b: Option<f64>, what: &str) -> Result<f64> {
    match (rate_a, rate_b) {
        (Some(a), Some(b)) => Ok((a - b).abs()),
        _ => Err(Error::degenerate(format!("{what} has an empty stratum"))),
    }
}

/// Statistical parity gap `|P(yhat=1 | s=0) - P(yhat=1 | s=1)|` over node
/// records; `s` is aligned per record.
pub fn delta_sp_node(preds: &BinaryPredictions, s: &SensitiveAttrs) -> Result<f64> {
    if s.len() != preds.len() {
        return Err(Error::invalid("sensitive length differs from predictions"));
    }
    let rate = |group: u8| {
        positive_rate(
            preds
                .yhat
                .iter()
                .zip(s.iter())
                .filter(|&(_, g)| g == group)
                .map(|(&p, _)| p),
        )
    };
    rate_gap(rate(0), rate(1), "statistical parity")
}

/// Equal opportunity gap: statistical parity restricted to records with
/// ground truth `y = 1`.
pub fn delta_eo_node(preds: &BinaryPredictions, s: &SensitiveAttrs) -> Result<f64> {
    if s.len() != preds.len() {
        return Err(Error::invalid("sensitive length differs from predictions"));
    }
    let rate = |group: u8| {
        positive_rate(
            preds
                .yhat
                .iter()
                .zip(preds.y.iter())
                .zip(s.iter())
                .filter(|&((_, &y), g)| y == 1 && g == group)
                .map(|((&p, _), _)| p),
        )
    };
    rate_gap(rate(0), rate(1), "equal opportunity")
}

/// Inter/intra stratum of candidate edges, from the endpoint groups.
pub fn edge_strata(edges: &[(usize, usize)], part: &GroupPartition) -> Result<Vec<bool>> {
    let n = part.num_nodes();
    edges
        .iter()
        .map(|&(u, v)| {
            if u >= n || v >= n {
                return Err(Error::invalid(format!(
                    "candidate edge ({u}, {v}) references a node id >= {n}"
                )));
            }
            Ok(part.group_of(u) != part.group_of(v))
        })
        .collect()
}

/// Link statistical parity `|P(yhat=1 | inter) - P(yhat=1 | intra)|` over
/// candidate edges stratified by their endpoints' sensitive attributes.
pub fn delta_sp_link(
    preds: &BinaryPredictions,
    edges: &[(usize, usize)],
    part: &GroupPartition,
) -> Result<f64> {
    if edges.len() != preds.len() {
        return Err(Error::invalid("edge count differs from predictions"));
    }
    let strata = edge_strata(edges, part)?;
    let rate = |inter: bool| {
        positive_rate(
            preds
                .yhat
                .iter()
                .zip(&strata)
                .filter(|&(_, &st)| st == inter)
                .map(|(&p, _)| p),
        )
    };
    rate_gap(rate(true), rate(false), "link statistical parity")
}

/// Link equal opportunity: the same gap restricted to `y = 1` candidates.
pub fn delta_eo_link(
    preds: &BinaryPredictions,
    edges: &[(usize, usize)],
    part: &GroupPartition,
) -> Result<f64> {
    if edges.len() != preds.len() {
        return Err(Error::invalid("edge count differs from predictions"));
    }
    let strata = edge_strata(edges, part)?;
    let rate = |inter: bool| {
        positive_rate(
            preds
                .yhat
                .iter()
                .zip(preds.y.iter())
                .zip(&strata)
                .filter(|&((_, &y), &st)| y == 1 && st == inter)
                .map(|((&p, _), _)| p),
        )
    };
    rate_gap(rate(true), rate(false), "link equal opportunity")
}

/// Fraction of records with `yhat == y`.
pub fn accuracy(preds: &BinaryPredictions) -> Result<f64> {
    if preds.is_empty() {
        return Err(Error::invalid("accuracy of an empty prediction set"));
    }
    let correct = preds
        .y
        .iter()
        .zip(&preds.yhat)
        .filter(|(y, p)| y == p)
        .count();
    Ok(correct as f64 / preds.len() as f64)
}

/// AUC via the rank-statistic formulation, with tied scores credited 1/2.
pub fn auc(preds: &BinaryPredictions) -> Result<f64> {
    let scores = preds
        .score
        .as_ref()
        .ok_or_else(|| Error::invalid("AUC requires scores"))?;
    let positives = preds.y.iter().filter(|&&y| y == 1).count();
    let negatives = preds.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::degenerate(
            "AUC needs at least one positive and one negative record",
        ));
    }
    let mut order: Vec<usize> = (0..preds.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // rank sum of positives with average ranks over tie groups
    let mut rank_sum = 0.0f64;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let avg_rank = (i + 1 + j) as f64 / 2.0; // mean of ranks i+1..=j
        for &k in &order[i..j] {
            if preds.y[k] == 1 {
                rank_sum += avg_rank;
            }
        }
        i = j;
    }
    let p = positives as f64;
    let n = negatives as f64;
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}

/// Two aligned embedding views and the softmax temperature for the
/// contrastive objective. The projection head is the identity.
#[derive(Debug, Clone)]
pub struct ContrastiveInputs {
    pub h1: FeatureMatrix,
    pub h2: FeatureMatrix,
    pub tau: f64,
}

impl ContrastiveInputs {
    pub fn new(h1: FeatureMatrix, h2: FeatureMatrix, tau: f64) -> Result<ContrastiveInputs> {
        if h1.rows() != h2.rows() || h1.cols() != h2.cols() {
            return Err(Error::invalid("embedding views must have matching shapes"));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::invalid("temperature must be positive"));
        }
        for (name, m) in [("h1", &h1), ("h2", &h2)] {
            for i in 0..m.rows() {
                if m.row(i).iter().all(|&v| v == 0.0) {
                    return Err(Error::invalid(format!(
                        "{name} row {i} is all-zero; cosine similarity is undefined"
                    )));
                }
            }
        }
        Ok(ContrastiveInputs { h1, h2, tau })
    }
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

/// Per-anchor loss: the positive pair against both inter-view and
/// intra-view negatives, computed through a log-sum-exp shift.
fn anchor_loss(anchor_view: &FeatureMatrix, other_view: &FeatureMatrix, i: usize, tau: f64) -> f64 {
    let anchor = anchor_view.row(i);
    let mut logits = Vec::with_capacity(2 * anchor_view.rows() - 1);
    let positive = cosine(anchor, other_view.row(i)) / tau;
    logits.push(positive);
    for k in 0..anchor_view.rows() {
        if k != i {
            logits.push(cosine(anchor, other_view.row(k)) / tau);
            logits.push(cosine(anchor, anchor_view.row(k)) / tau);
        }
    }
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + logits.iter().map(|l| (l - max).exp()).sum::<f64>().ln();
    lse - positive
}

/// Symmetric contrastive objective
/// `J = 1/(2N) sum_i [l(h1_i, h2_i) + l(h2_i, h1_i)]`.
pub fn nt_xent_loss(inputs: &ContrastiveInputs) -> f64 {
    let n = inputs.h1.rows();
    let mut total = 0.0;
    for i in 0..n {
        total += anchor_loss(&inputs.h1, &inputs.h2, i, inputs.tau)
            + anchor_loss(&inputs.h2, &inputs.h1, i, inputs.tau);
    }
    total / (2.0 * n as f64)
}
