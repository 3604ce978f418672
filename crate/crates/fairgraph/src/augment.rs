//! The four fairness-aware augmentations and their sequential pipeline.
//!
//! Each step targets one term of the correlation bound: feature masking
//! shrinks `||delta||_1` by preferentially zeroing columns that differ
//! across groups, node sampling drives `gamma1` to zero by balancing the
//! chi/omega populations, and edge deletion/addition equalize the inter
//! and intra edge counts that control `gamma2`. The pipeline applies the
//! enabled steps in the fixed order NS -> ED -> EA -> FM, recomputing the
//! partition after every topology change.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bias::{compute_bias_report, group_stats, AggregationConfig, BiasReport};
use crate::error::{Error, Result};
use crate::graph::{
    induced_subgraph, FeatureMatrix, Graph, GroupPartition, InducedSubgraph, SensitiveAttrs,
};
use crate::rng::{
    substream, STREAM_EDGE_ADDITION, STREAM_EDGE_DELETION, STREAM_FEATURE_MASKING,
    STREAM_NODE_SAMPLING,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaskingConfig {
    /// Masking budget: the unclipped masking probabilities average to
    /// `alpha`.
    pub alpha: f64,
}

impl Default for MaskingConfig {
    fn default() -> Self {
        MaskingConfig { alpha: 0.1 }
    }
}

impl MaskingConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() || self.alpha < 0.0 {
            return Err(Error::invalid("alpha must be a finite value >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeSamplingConfig {
    /// Budget floor when sampling from the chi sets (chi-dominant branch):
    /// at least this fraction of each `S_a^chi` is kept.
    pub min_fraction_chi: f64,
    /// Budget floor when sampling from the omega sets (omega-dominant
    /// branch).
    pub min_fraction_omega: f64,
    /// Shifts the target chi ratios to `1/2 + phi` (group 0) and
    /// `1/2 - phi` (group 1) in the omega-dominant branch; both choices
    /// leave `gamma1 = 0`.
    pub phi: f64,
}

impl Default for NodeSamplingConfig {
    fn default() -> Self {
        NodeSamplingConfig {
            min_fraction_chi: 0.5,
            min_fraction_omega: 0.25,
            phi: 0.0,
        }
    }
}

impl NodeSamplingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.min_fraction_chi)
            || !(0.0..=1.0).contains(&self.min_fraction_omega)
        {
            return Err(Error::invalid("sampling budget fractions must be in [0, 1]"));
        }
        if !self.phi.is_finite() || self.phi <= -0.5 || self.phi >= 0.5 {
            return Err(Error::invalid("phi must lie in (-1/2, 1/2)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeDeletionConfig {
    /// Inter-edge keep probability; intra removal probabilities are scaled
    /// so the expected strata sizes balance at `pi |E_chi|`.
    pub pi: f64,
    /// Upper clamp on the intra removal probabilities, protecting sparse
    /// graphs from losing most of their structure. `1.0` disables it.
    pub removal_cap: f64,
}

impl Default for EdgeDeletionConfig {
    fn default() -> Self {
        EdgeDeletionConfig {
            pi: 1.0,
            removal_cap: 0.5,
        }
    }
}

impl EdgeDeletionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.pi) {
            return Err(Error::invalid("pi must be in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.removal_cap) {
            return Err(Error::invalid("removal_cap must be in [0, 1]"));
        }
        Ok(())
    }
}

/// Which steps run and with which hyperparameters; `seed` feeds every
/// random draw through per-step substreams.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub enable_ns: bool,
    pub enable_ed: bool,
    pub enable_ea: bool,
    pub enable_fm: bool,
    #[serde(flatten)]
    pub masking: MaskingConfig,
    #[serde(flatten)]
    pub sampling: NodeSamplingConfig,
    #[serde(flatten)]
    pub deletion: EdgeDeletionConfig,
    pub seed: u64,
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.masking.validate()?;
        self.sampling.validate()?;
        self.deletion.validate()
    }
}

/// Masking probabilities `p_i = min(alpha * delta_bar_i / mean(delta_bar), 1)`.
/// A zero-mean `delta_bar` yields all zeros.
pub fn masking_probs(delta_bar: &[f64], alpha: f64) -> Result<Vec<f64>> {
    MaskingConfig { alpha }.validate()?;
    if delta_bar.iter().any(|&d| !(0.0..=1.0).contains(&d)) {
        return Err(Error::invalid("delta_bar entries must lie in [0, 1]"));
    }
    if delta_bar.is_empty() {
        return Ok(Vec::new());
    }
    let mean = delta_bar.iter().sum::<f64>() / delta_bar.len() as f64;
    if mean == 0.0 {
        return Ok(vec![0.0; delta_bar.len()]);
    }
    Ok(delta_bar
        .iter()
        .map(|&d| (alpha * d / mean).min(1.0))
        .collect())
}

/// Draws one Bernoulli mask bit per feature (shared across all nodes) and
/// zeroes the masked columns. Returns the masked matrix and the keep mask
/// (`1` = column kept).
pub fn apply_feature_mask<R: Rng + ?Sized>(
    x: &FeatureMatrix,
    p_mask: &[f64],
    rng: &mut R,
) -> Result<(FeatureMatrix, Vec<u8>)> {
    if p_mask.len() != x.cols() {
        return Err(Error::invalid(format!(
            "p_mask length {} does not match feature count {}",
            p_mask.len(),
            x.cols()
        )));
    }
    if p_mask.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::invalid("masking probabilities must lie in [0, 1]"));
    }
    let mask: Vec<u8> = p_mask
        .iter()
        .map(|&p| u8::from(rng.random::<f64>() >= p))
        .collect();
    let mut data = Vec::with_capacity(x.rows() * x.cols());
    for i in 0..x.rows() {
        for (j, &v) in x.row(i).iter().enumerate() {
            data.push(if mask[j] == 1 { v } else { 0.0 });
        }
    }
    Ok((FeatureMatrix::from_vec(x.rows(), x.cols(), data)?, mask))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingBranch {
    /// `|S^omega| >= |S^chi|`: keep all chi nodes, subsample omega.
    OmegaDominant,
    /// `|S^chi| > |S^omega|`: keep all omega nodes, subsample chi.
    ChiDominant,
}

/// Per-group sample sizes for [`node_sample`], already clamped to the
/// source-set sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplingTargets {
    pub branch: SamplingBranch,
    /// Nodes to draw from `S_0^omega` (omega-dominant) or `S_0^chi`.
    pub s0_take: usize,
    /// Same for group 1.
    pub s1_take: usize,
}

/// Computes the sampling targets: in the omega-dominant branch the chi
/// population is kept whole and each omega set is cut to its group's chi
/// size (ratio-shifted by `phi`), which zeroes `gamma1` when the budget
/// floors do not bind.
pub fn sampling_targets(part: &GroupPartition, cfg: &NodeSamplingConfig) -> Result<SamplingTargets> {
    cfg.validate()?;
    part.require_both_groups()?;
    let ceil_frac = |frac: f64, len: usize| ((frac * len as f64).ceil()) as usize;
    if part.num_omega() >= part.num_chi() {
        let ratio0 = (0.5 - cfg.phi) / (0.5 + cfg.phi);
        let ratio1 = (0.5 + cfg.phi) / (0.5 - cfg.phi);
        let base0 = (part.s0_chi.len() as f64 * ratio0).round() as usize;
        let base1 = (part.s1_chi.len() as f64 * ratio1).round() as usize;
        Ok(SamplingTargets {
            branch: SamplingBranch::OmegaDominant,
            s0_take: base0
                .max(ceil_frac(cfg.min_fraction_omega, part.s0_omega.len()))
                .min(part.s0_omega.len()),
            s1_take: base1
                .max(ceil_frac(cfg.min_fraction_omega, part.s1_omega.len()))
                .min(part.s1_omega.len()),
        })
    } else {
        Ok(SamplingTargets {
            branch: SamplingBranch::ChiDominant,
            s0_take: part
                .s0_omega
                .len()
                .max(ceil_frac(cfg.min_fraction_chi, part.s0_chi.len()))
                .min(part.s0_chi.len()),
            s1_take: part
                .s1_omega
                .len()
                .max(ceil_frac(cfg.min_fraction_chi, part.s1_chi.len()))
                .min(part.s1_chi.len()),
        })
    }
}

fn sample_from<R: Rng + ?Sized>(pool: &[usize], take: usize, rng: &mut R) -> Vec<usize> {
    rand::seq::index::sample(rng, pool.len(), take)
        .iter()
        .map(|i| pool[i])
        .collect()
}

/// Population-balancing node sampling; returns the induced subgraph with
/// consistently sliced features/attributes and the id map back to the
/// input graph.
pub fn node_sample<R: Rng + ?Sized>(
    graph: &Graph,
    x: &FeatureMatrix,
    s: &SensitiveAttrs,
    part: &GroupPartition,
    cfg: &NodeSamplingConfig,
    rng: &mut R,
) -> Result<InducedSubgraph> {
    let targets = sampling_targets(part, cfg)?;
    let mut keep: Vec<usize> = Vec::new();
    match targets.branch {
        SamplingBranch::OmegaDominant => {
            keep.extend_from_slice(&part.s0_chi);
            keep.extend_from_slice(&part.s1_chi);
            keep.extend(sample_from(&part.s0_omega, targets.s0_take, rng));
            keep.extend(sample_from(&part.s1_omega, targets.s1_take, rng));
        }
        SamplingBranch::ChiDominant => {
            keep.extend_from_slice(&part.s0_omega);
            keep.extend_from_slice(&part.s1_omega);
            keep.extend(sample_from(&part.s0_chi, targets.s0_take, rng));
            keep.extend(sample_from(&part.s1_chi, targets.s1_take, rng));
        }
    }
    induced_subgraph(graph, &keep, x, s)
}

/// Removal probability per edge stratum under the balance-seeking deletion
/// scheme. With the cap disabled the expected surviving strata sizes are
/// `pi |E_chi|` (inter) and `pi |E_chi| / 2` (each intra stratum).
#[derive(Debug, Clone, PartialEq)]
pub struct DeletionProbs {
    pub inter: f64,
    pub intra_s0: f64,
    pub intra_s1: f64,
    pub warnings: Vec<String>,
}

pub fn deletion_probs(part: &GroupPartition, cfg: &EdgeDeletionConfig) -> Result<DeletionProbs> {
    cfg.validate()?;
    let e_chi = part.e_chi.len() as f64;
    let mut warnings = Vec::new();
    let mut intra = |own: usize, other: usize, label: &str| -> f64 {
        if own == 0 {
            if !part.e_chi.is_empty() && other > 0 {
                warnings.push(format!(
                    "no intra-edges in {label}; skipping its deletion stratum"
                ));
            }
            return 0.0;
        }
        (1.0 - cfg.pi * e_chi / (2.0 * own as f64))
            .min(cfg.removal_cap)
            .max(0.0)
    };
    let intra_s0 = intra(part.e_omega_s0.len(), part.e_omega_s1.len(), "S0");
    let intra_s1 = intra(part.e_omega_s1.len(), part.e_omega_s0.len(), "S1");
    Ok(DeletionProbs {
        inter: 1.0 - cfg.pi,
        intra_s0,
        intra_s1,
        warnings,
    })
}

#[derive(Debug, Clone)]
pub struct EdgeDeleteOutcome {
    pub graph: Graph,
    pub probs: DeletionProbs,
}

/// Independently removes each edge with its stratum probability.
pub fn edge_delete<R: Rng + ?Sized>(
    graph: &Graph,
    part: &GroupPartition,
    cfg: &EdgeDeletionConfig,
    rng: &mut R,
) -> Result<EdgeDeleteOutcome> {
    if part.num_nodes() != graph.num_nodes() {
        return Err(Error::invalid("partition does not match the graph"));
    }
    let probs = deletion_probs(part, cfg)?;
    let mut kept = Vec::with_capacity(graph.num_edges());
    for (u, v) in graph.edges() {
        let p = if part.group_of(u) != part.group_of(v) {
            probs.inter
        } else if part.group_of(u) == 0 {
            probs.intra_s0
        } else {
            probs.intra_s1
        };
        if rng.random::<f64>() >= p {
            kept.push((u, v));
        }
    }
    Ok(EdgeDeleteOutcome {
        graph: Graph::from_edges(&kept, graph.num_nodes())?,
        probs,
    })
}

#[derive(Debug, Clone)]
pub struct EdgeAddOutcome {
    pub graph: Graph,
    /// New inter-edges, as `(u, v)` with `u < v`.
    pub added: Vec<(usize, usize)>,
    /// How many of the requested pairs could not be placed because the
    /// graph ran out of absent inter-pairs.
    pub shortfall: usize,
}

/// Draws `take` absent inter-pairs between `pool0` and `pool1`, skipping
/// edges already present in the graph or in `chosen`. Switches from
/// rejection sampling to enumeration when the absent pairs get scarce.
fn draw_absent_pairs<R: Rng + ?Sized>(
    graph: &Graph,
    pool0: &[usize],
    pool1: &[usize],
    chosen: &mut std::collections::HashSet<(usize, usize)>,
    take: usize,
    rng: &mut R,
) -> Vec<(usize, usize)> {
    let mut added = Vec::with_capacity(take);
    let absent_estimate = pool0.len() * pool1.len();
    if take * 10 > absent_estimate {
        let mut absent = Vec::new();
        for &a in pool0 {
            for &b in pool1 {
                let pair = (a.min(b), a.max(b));
                if !graph.has_edge(pair.0, pair.1) && !chosen.contains(&pair) {
                    absent.push(pair);
                }
            }
        }
        absent.sort_unstable();
        absent.dedup();
        if take >= absent.len() {
            added = absent;
        } else {
            added = rand::seq::index::sample(rng, absent.len(), take)
                .iter()
                .map(|i| absent[i])
                .collect();
        }
    } else {
        while added.len() < take {
            let a = pool0[rng.random_range(0..pool0.len())];
            let b = pool1[rng.random_range(0..pool1.len())];
            let pair = (a.min(b), a.max(b));
            if graph.has_edge(pair.0, pair.1) || chosen.contains(&pair) {
                continue;
            }
            chosen.insert(pair);
            added.push(pair);
        }
    }
    for &pair in &added {
        chosen.insert(pair);
    }
    added
}

/// Adds exactly `|E_omega| - |E_chi|` new distinct inter-edges, resampling
/// collisions, so that `|E_chi| = |E_omega|` holds in the result. Pairs
/// are drawn between the chi sets first; once those are exhausted (or a
/// chi set is empty) the remainder comes from the whole groups. If the
/// graph runs out of absent inter-pairs entirely, all of them are added
/// and the shortfall is reported.
pub fn edge_add<R: Rng + ?Sized>(
    graph: &Graph,
    part: &GroupPartition,
    rng: &mut R,
) -> Result<EdgeAddOutcome> {
    if part.num_nodes() != graph.num_nodes() {
        return Err(Error::invalid("partition does not match the graph"));
    }
    let needed = part.num_intra_edges() as i64 - part.e_chi.len() as i64;
    if needed < 0 {
        return Err(Error::invalid(
            "edge addition requires |E_omega| >= |E_chi|",
        ));
    }
    let needed = needed as usize;
    let mut added: Vec<(usize, usize)> = Vec::new();
    let mut shortfall = 0usize;
    if needed > 0 {
        let mut chosen = std::collections::HashSet::new();
        // every existing inter-edge lies inside the chi sets
        let chi_absent = part.s0_chi.len() * part.s1_chi.len() - part.e_chi.len();
        let from_chi = needed.min(chi_absent);
        if from_chi > 0 {
            added.extend(draw_absent_pairs(
                graph,
                &part.s0_chi,
                &part.s1_chi,
                &mut chosen,
                from_chi,
                rng,
            ));
        }
        let remainder = needed - added.len();
        if remainder > 0 {
            let group_absent =
                part.s0.len() * part.s1.len() - part.e_chi.len() - added.len();
            let take = remainder.min(group_absent);
            added.extend(draw_absent_pairs(
                graph,
                &part.s0,
                &part.s1,
                &mut chosen,
                take,
                rng,
            ));
            shortfall = needed - added.len();
        }
    }
    let mut all: Vec<(usize, usize)> = graph.edges().collect();
    all.extend_from_slice(&added);
    Ok(EdgeAddOutcome {
        graph: Graph::from_edges(&all, graph.num_nodes())?,
        added,
        shortfall,
    })
}

/// Output of the sequential augmentation pipeline.
#[derive(Debug, Clone)]
pub struct FairAugOutcome {
    pub graph: Graph,
    pub features: FeatureMatrix,
    pub sensitive: SensitiveAttrs,
    /// Maps the output node ids back to the input graph's ids (identity
    /// when node sampling is disabled).
    pub id_map: Vec<usize>,
    pub before: BiasReport,
    pub after: BiasReport,
    pub warnings: Vec<String>,
}

/// Runs the enabled steps in the fixed order node sampling -> edge
/// deletion -> edge addition -> feature masking, recomputing the partition
/// after every topology-changing step. Deterministic for a given
/// `cfg.seed`: each step draws from its own substream, so toggling one
/// step leaves the others' draws unchanged.
pub fn fairaug(
    graph: &Graph,
    x: &FeatureMatrix,
    s: &SensitiveAttrs,
    cfg: &PipelineConfig,
) -> Result<FairAugOutcome> {
    cfg.validate()?;
    let agg = AggregationConfig::default();
    let before = compute_bias_report(graph, x, s, &agg)?;

    let mut g = graph.clone();
    let mut features = x.clone();
    let mut sensitive = s.clone();
    let mut id_map: Vec<usize> = (0..graph.num_nodes()).collect();
    let mut part = GroupPartition::compute(&g, &sensitive)?;
    let mut warnings = Vec::new();

    if cfg.enable_ns {
        let mut rng = substream(cfg.seed, STREAM_NODE_SAMPLING);
        let sub = node_sample(&g, &features, &sensitive, &part, &cfg.sampling, &mut rng)?;
        g = sub.graph;
        features = sub.features;
        sensitive = sub.sensitive;
        id_map = sub.id_map;
        part = GroupPartition::compute(&g, &sensitive)?;
    }
    if cfg.enable_ed {
        let mut rng = substream(cfg.seed, STREAM_EDGE_DELETION);
        let out = edge_delete(&g, &part, &cfg.deletion, &mut rng)?;
        g = out.graph;
        warnings.extend(out.probs.warnings);
        part = GroupPartition::compute(&g, &sensitive)?;
    }
    if cfg.enable_ea {
        let mut rng = substream(cfg.seed, STREAM_EDGE_ADDITION);
        let out = edge_add(&g, &part, &mut rng)?;
        if out.shortfall > 0 {
            warnings.push(format!(
                "edge addition fell short by {} pairs: all absent inter-pairs were added",
                out.shortfall
            ));
        }
        g = out.graph;
        part = GroupPartition::compute(&g, &sensitive)?;
    }
    if cfg.enable_fm {
        let stats = group_stats(&features, &part)?;
        let probs = masking_probs(&stats.delta_bar, cfg.masking.alpha)?;
        let mut rng = substream(cfg.seed, STREAM_FEATURE_MASKING);
        let (masked, _) = apply_feature_mask(&features, &probs, &mut rng)?;
        features = masked;
    }

    let after = compute_bias_report(&g, &features, &sensitive, &agg)?;
    Ok(FairAugOutcome {
        graph: g,
        features,
        sensitive,
        id_map,
        before,
        after,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bias::gamma1;
    use crate::fixtures;
    use approx::assert_abs_diff_eq;

    fn case1_part() -> (crate::fixtures::ToyCase, GroupPartition) {
        let case = fixtures::case1();
        let part = GroupPartition::compute(&case.graph, &case.sensitive).unwrap();
        (case, part)
    }

    #[test]
    fn masking_probs_zero_alpha_and_uniform() {
        assert_eq!(
            masking_probs(&[0.2, 0.8, 1.0], 0.0).unwrap(),
            vec![0.0, 0.0, 0.0]
        );
        // uniform delta_bar: every probability is min(alpha, 1)
        let p = masking_probs(&[0.4, 0.4, 0.4], 0.7).unwrap();
        for v in p {
            assert_abs_diff_eq!(v, 0.7, epsilon = 1e-12);
        }
        let p = masking_probs(&[0.4, 0.4], 1.5).unwrap();
        assert_eq!(p, vec![1.0, 1.0]);
    }

    #[test]
    fn masking_probs_toy_values() {
        let delta_bar = [0.744, 0.117, 1.0, 0.744, 0.0];
        let p = masking_probs(&delta_bar, 0.4).unwrap();
        let expected = [0.571, 0.090, 0.768, 0.571, 0.0];
        for (got, want) in p.iter().zip(expected) {
            assert_abs_diff_eq!(got, &want, epsilon = 5e-4);
        }
        // unclipped probabilities average exactly to alpha
        let mean = delta_bar.iter().sum::<f64>() / delta_bar.len() as f64;
        let unclipped_mean = delta_bar
            .iter()
            .map(|d| 0.4 * d / mean)
            .sum::<f64>()
            / delta_bar.len() as f64;
        assert_abs_diff_eq!(unclipped_mean, 0.4, epsilon = 1e-12);
    }

    #[test]
    fn masking_probs_guard_on_zero_mean() {
        assert_eq!(masking_probs(&[0.0, 0.0], 0.9).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn feature_mask_extremes() {
        let x = fixtures::toy_features();
        let mut rng = substream(1, 0);
        let (same, mask) = apply_feature_mask(&x, &[0.0; 5], &mut rng).unwrap();
        assert_eq!(same, x);
        assert_eq!(mask, vec![1; 5]);
        let (zeroed, mask) = apply_feature_mask(&x, &[1.0; 5], &mut rng).unwrap();
        assert!(zeroed.row(0).iter().all(|&v| v == 0.0));
        assert!(zeroed.row(7).iter().all(|&v| v == 0.0));
        assert_eq!(mask, vec![0; 5]);
    }

    #[test]
    fn masking_columns_zero_and_two_shrinks_the_gap() {
        // deterministic mask via probabilities 0/1: columns 0 and 2 zeroed
        let case = fixtures::case1();
        let part = GroupPartition::compute(&case.graph, &case.sensitive).unwrap();
        let mut rng = substream(0, 0);
        let (masked, mask) =
            apply_feature_mask(&case.features, &[1.0, 0.0, 1.0, 0.0, 0.0], &mut rng).unwrap();
        assert_eq!(mask, vec![0, 1, 0, 1, 1]);
        let stats = group_stats(&masked, &part).unwrap();
        let expected = [0.0, -0.05, 0.0, -0.32, 0.0];
        for ((m1, m0), want) in stats.mu1.iter().zip(&stats.mu0).zip(expected) {
            assert_abs_diff_eq!(m1 - m0, want, epsilon = 0.01);
        }
    }

    #[test]
    fn unmasked_columns_are_bitwise_identical() {
        let x = fixtures::toy_features();
        let mut rng = substream(42, 3);
        let (masked, mask) = apply_feature_mask(&x, &[0.5; 5], &mut rng).unwrap();
        for i in 0..x.rows() {
            for (j, &m) in mask.iter().enumerate() {
                if m == 1 {
                    assert_eq!(masked.get(i, j).to_bits(), x.get(i, j).to_bits());
                } else {
                    assert_eq!(masked.get(i, j), 0.0);
                }
            }
        }
    }

    #[test]
    fn sampling_targets_case1() {
        let (_, part) = case1_part();
        let cfg = NodeSamplingConfig {
            min_fraction_chi: 0.0,
            min_fraction_omega: 0.0,
            phi: 0.0,
        };
        let t = sampling_targets(&part, &cfg).unwrap();
        assert_eq!(t.branch, SamplingBranch::OmegaDominant);
        assert_eq!((t.s0_take, t.s1_take), (2, 1));
    }

    #[test]
    fn node_sampling_case1_realizes_zero_gamma1() {
        let (case, part) = case1_part();
        let cfg = NodeSamplingConfig {
            min_fraction_chi: 0.0,
            min_fraction_omega: 0.0,
            phi: 0.0,
        };
        for seed in 0..20 {
            let mut rng = substream(seed, STREAM_NODE_SAMPLING);
            let sub =
                node_sample(&case.graph, &case.features, &case.sensitive, &part, &cfg, &mut rng)
                    .unwrap();
            assert_eq!(sub.graph.num_nodes(), 6);
            let sub_part = GroupPartition::compute(&sub.graph, &sub.sensitive).unwrap();
            assert_eq!(gamma1(&sub_part).unwrap(), 0.0);
        }
    }

    #[test]
    fn node_sampling_already_balanced_keeps_gamma1_zero() {
        // both groups have one chi and one omega node
        let g = Graph::from_edges(&[(0, 2), (0, 1), (2, 3)], 4).unwrap();
        let s = SensitiveAttrs::new(vec![0, 0, 1, 1]).unwrap();
        let x = FeatureMatrix::from_rows(&vec![vec![0.0]; 4]).unwrap();
        let part = GroupPartition::compute(&g, &s).unwrap();
        assert_eq!(gamma1(&part).unwrap(), 0.0);
        let cfg = NodeSamplingConfig {
            min_fraction_chi: 0.0,
            min_fraction_omega: 0.0,
            phi: 0.0,
        };
        let mut rng = substream(5, STREAM_NODE_SAMPLING);
        let sub = node_sample(&g, &x, &s, &part, &cfg, &mut rng).unwrap();
        assert_eq!(sub.graph.num_nodes(), 4);
        let sub_part = GroupPartition::compute(&sub.graph, &sub.sensitive).unwrap();
        assert_eq!(gamma1(&sub_part).unwrap(), 0.0);
    }

    #[test]
    fn phi_shifts_target_ratios_but_keeps_gamma1_zero() {
        // group 0: chi {0..3}, omega {4..13}; group 1: chi {14..16},
        // omega {17..26}
        let mut edges = Vec::new();
        for i in 0..4usize {
            edges.push((i, 14 + (i % 3)));
        }
        edges.push((4, 5));
        edges.push((17, 18));
        let g = Graph::from_edges(&edges, 27).unwrap();
        let bits: Vec<u8> = (0..27).map(|i| u8::from(i >= 14)).collect();
        let s = SensitiveAttrs::new(bits).unwrap();
        let part = GroupPartition::compute(&g, &s).unwrap();
        assert_eq!(
            (part.s0_chi.len(), part.s0_omega.len(), part.s1_chi.len(), part.s1_omega.len()),
            (4, 10, 3, 10)
        );

        let phi = 1.0 / 6.0;
        let cfg = NodeSamplingConfig {
            min_fraction_chi: 0.0,
            min_fraction_omega: 0.0,
            phi,
        };
        let t = sampling_targets(&part, &cfg).unwrap();
        // ratios shift to 1/2 + phi = 2/3 and 1/2 - phi = 1/3
        assert_eq!((t.s0_take, t.s1_take), (2, 6));
        assert_abs_diff_eq!(4.0 / (4.0 + 2.0), 0.5 + phi, epsilon = 1e-12);
        assert_abs_diff_eq!(3.0 / (3.0 + 6.0), 0.5 - phi, epsilon = 1e-12);

        let x = FeatureMatrix::from_vec(27, 1, vec![0.0; 27]).unwrap();
        let mut rng = substream(3, STREAM_NODE_SAMPLING);
        let sub = node_sample(&g, &x, &s, &part, &cfg, &mut rng).unwrap();
        let sub_part = GroupPartition::compute(&sub.graph, &sub.sensitive).unwrap();
        // shifted ratios are not dyadic, so gamma1 vanishes only up to
        // round-off (phi = 0 gives exact zero)
        assert_abs_diff_eq!(gamma1(&sub_part).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn chi_dominant_branch_keeps_omega_and_subsamples_chi() {
        let case = fixtures::case2();
        let part = GroupPartition::compute(&case.graph, &case.sensitive).unwrap();
        let cfg = NodeSamplingConfig::default(); // 50% chi floor
        let t = sampling_targets(&part, &cfg).unwrap();
        assert_eq!(t.branch, SamplingBranch::ChiDominant);
        // max(|S0_omega|, ceil(0.5 * 4)) = 2, max(|S1_omega|, ceil(0.5 * 2)) = 1
        assert_eq!((t.s0_take, t.s1_take), (2, 1));
        let mut rng = substream(9, STREAM_NODE_SAMPLING);
        let sub = node_sample(&case.graph, &case.features, &case.sensitive, &part, &cfg, &mut rng)
            .unwrap();
        // omega nodes 4 and 7 always survive
        assert!(sub.id_map.contains(&4));
        assert!(sub.id_map.contains(&7));
        assert_eq!(sub.graph.num_nodes(), 5);
    }

    #[test]
    fn deletion_probs_match_case_studies() {
        let (_, part) = case1_part();
        let cfg = EdgeDeletionConfig {
            pi: 1.0,
            removal_cap: 0.5,
        };
        let p = deletion_probs(&part, &cfg).unwrap();
        assert_eq!((p.inter, p.intra_s0, p.intra_s1), (0.0, 0.5, 0.5));

        let case2 = fixtures::case2();
        let part2 = GroupPartition::compute(&case2.graph, &case2.sensitive).unwrap();
        let p = deletion_probs(&part2, &cfg).unwrap();
        assert_eq!((p.inter, p.intra_s0, p.intra_s1), (0.0, 0.5, 0.0));
    }

    #[test]
    fn deletion_noop_when_already_balanced() {
        // |E_chi| = 2, |E_omega_S0| = |E_omega_S1| = 1
        let g = Graph::from_edges(&[(0, 2), (1, 3), (0, 1), (2, 3)], 4).unwrap();
        let s = SensitiveAttrs::new(vec![0, 0, 1, 1]).unwrap();
        let part = GroupPartition::compute(&g, &s).unwrap();
        let cfg = EdgeDeletionConfig {
            pi: 1.0,
            removal_cap: 1.0,
        };
        let p = deletion_probs(&part, &cfg).unwrap();
        assert_eq!((p.inter, p.intra_s0, p.intra_s1), (0.0, 0.0, 0.0));
        let mut rng = substream(3, STREAM_EDGE_DELETION);
        let out = edge_delete(&g, &part, &cfg, &mut rng).unwrap();
        assert_eq!(out.graph, g);
    }

    #[test]
    fn deletion_skips_empty_stratum_with_warning() {
        // inter edge present, S1 intra present, S0 intra empty
        let g = Graph::from_edges(&[(0, 1), (1, 2)], 3).unwrap();
        let s = SensitiveAttrs::new(vec![0, 1, 1]).unwrap();
        let part = GroupPartition::compute(&g, &s).unwrap();
        let p = deletion_probs(&part, &EdgeDeletionConfig::default()).unwrap();
        assert_eq!(p.intra_s0, 0.0);
        assert_eq!(p.warnings.len(), 1);
    }

    #[test]
    fn edge_add_balances_case_fixtures() {
        let (case, part) = case1_part();
        let mut rng = substream(11, STREAM_EDGE_ADDITION);
        let out = edge_add(&case.graph, &part, &mut rng).unwrap();
        assert_eq!(out.added.len(), 7);
        assert_eq!(out.shortfall, 0);
        let after = GroupPartition::compute(&out.graph, &case.sensitive).unwrap();
        assert_eq!(after.e_chi.len(), 9);
        assert_eq!(after.num_intra_edges(), 9);

        let case2 = fixtures::case2();
        let part2 = GroupPartition::compute(&case2.graph, &case2.sensitive).unwrap();
        let out = edge_add(&case2.graph, &part2, &mut rng).unwrap();
        assert_eq!(out.added.len(), 2);
        let after = GroupPartition::compute(&out.graph, &case2.sensitive).unwrap();
        assert_eq!(after.e_chi.len(), after.num_intra_edges());
    }

    #[test]
    fn edge_add_noop_when_balanced() {
        let g = Graph::from_edges(&[(0, 2), (0, 1)], 3).unwrap();
        let s = SensitiveAttrs::new(vec![0, 0, 1]).unwrap();
        let part = GroupPartition::compute(&g, &s).unwrap();
        let mut rng = substream(0, STREAM_EDGE_ADDITION);
        let out = edge_add(&g, &part, &mut rng).unwrap();
        assert_eq!(out.graph, g);
        assert!(out.added.is_empty());
    }

    #[test]
    fn edge_add_reports_shortfall_and_uses_group_fallback() {
        // no inter-edges at all (chi sets empty); 6 intra edges vs only
        // 4 possible inter pairs
        let g = Graph::from_edges(
            &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
            5,
        )
        .unwrap();
        let s = SensitiveAttrs::new(vec![0, 0, 0, 0, 1]).unwrap();
        let part = GroupPartition::compute(&g, &s).unwrap();
        let mut rng = substream(1, STREAM_EDGE_ADDITION);
        let out = edge_add(&g, &part, &mut rng).unwrap();
        assert_eq!(out.added.len(), 4);
        assert_eq!(out.shortfall, 2);
        assert!(out.added.iter().all(|&(u, v)| s.get(u) != s.get(v)));
    }

    #[test]
    fn edge_add_rejects_inter_majority() {
        let g = Graph::from_edges(&[(0, 1)], 2).unwrap();
        let s = SensitiveAttrs::new(vec![0, 1]).unwrap();
        let part = GroupPartition::compute(&g, &s).unwrap();
        let mut rng = substream(0, STREAM_EDGE_ADDITION);
        assert!(edge_add(&g, &part, &mut rng).is_err());
    }

    #[test]
    fn fairaug_disabled_is_identity() {
        let case = fixtures::case1();
        let cfg = PipelineConfig::default();
        let out = fairaug(&case.graph, &case.features, &case.sensitive, &cfg).unwrap();
        assert_eq!(out.graph, case.graph);
        assert_eq!(out.features, case.features);
        assert_eq!(out.sensitive, case.sensitive);
        assert_eq!(out.id_map, (0..8).collect::<Vec<_>>());
        assert_eq!(out.before, out.after);
    }

    #[test]
    fn fairaug_is_deterministic_per_seed() {
        let case = fixtures::case1();
        let cfg = PipelineConfig {
            enable_ns: true,
            enable_ed: true,
            enable_ea: true,
            enable_fm: true,
            sampling: NodeSamplingConfig {
                min_fraction_chi: 0.0,
                min_fraction_omega: 0.0,
                phi: 0.0,
            },
            masking: MaskingConfig { alpha: 0.4 },
            seed: 20240605,
            ..PipelineConfig::default()
        };
        let a = fairaug(&case.graph, &case.features, &case.sensitive, &cfg).unwrap();
        let b = fairaug(&case.graph, &case.features, &case.sensitive, &cfg).unwrap();
        assert_eq!(a.graph, b.graph);
        assert_eq!(a.features, b.features);
        assert_eq!(a.id_map, b.id_map);
        assert_eq!(a.after, b.after);
    }

    #[test]
    fn fairaug_case1_chain_balances_edges() {
        let case = fixtures::case1();
        let cfg = PipelineConfig {
            enable_ns: true,
            enable_ed: true,
            enable_ea: true,
            enable_fm: true,
            sampling: NodeSamplingConfig {
                min_fraction_chi: 0.0,
                min_fraction_omega: 0.0,
                phi: 0.0,
            },
            masking: MaskingConfig { alpha: 0.4 },
            seed: 7,
            ..PipelineConfig::default()
        };
        let out = fairaug(&case.graph, &case.features, &case.sensitive, &cfg).unwrap();
        let part = GroupPartition::compute(&out.graph, &out.sensitive).unwrap();
        assert_eq!(part.e_chi.len(), part.num_intra_edges());
    }
}
