//! Randomized verification of the balance guarantees.
//!
//! Each property draws its instances from named per-trial substreams, so a
//! failure is replayable from the reported seed and trial index, and the
//! aggregate report does not depend on execution order. Margins are
//! normalized so that `>= 0` means the property held with that much slack;
//! the report tracks the worst margin seen anywhere.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::augment::{
    deletion_probs, edge_add, edge_delete, masking_probs, node_sample, EdgeDeletionConfig,
    NodeSamplingConfig,
};
use crate::bias::{
    compute_bias_report, correlation_rho, gamma1, mean_aggregate, rho_via_group_gap,
    sigma_s_closed_form, theorem1_bound, AggregationConfig,
};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::graph::{FeatureMatrix, Graph, GroupPartition, SensitiveAttrs};
use crate::rng::trial_stream;

pub const BOUND_TOL: f64 = 1e-12;
pub const RHO_IDENTITY_TOL: f64 = 1e-10;
pub const SIGMA_S_TOL: f64 = 1e-12;
pub const DELETION_REL_TOL: f64 = 0.02;
pub const MONTE_CARLO_DRAWS: usize = 100_000;
/// At the fixture's per-trial variance, 40k trials put the 2% tolerance
/// near five standard errors, so seed-dependent false alarms are gone.
pub const DELETION_TRIALS: usize = 40_000;

// property indexes, also used as substream namespaces
const P_BOUND: u64 = 0;
const P_PROP1_CF: u64 = 1;
const P_PROP1_MC: u64 = 2;
const P_ED_EXPECT: u64 = 3;
const P_NS_GAMMA1: u64 = 4;
const P_EA_BALANCE: u64 = 5;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub trials: usize,
    pub seed: u64,
}

/// Negative-control hooks: scaling `||c||_1` below 1 must make the bound
/// property fail, proving the harness can detect violations.
#[derive(Debug, Clone, Copy)]
pub struct VerifyHooks {
    pub c_l1_scale: f64,
}

impl Default for VerifyHooks {
    fn default() -> Self {
        VerifyHooks { c_l1_scale: 1.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PropertyOutcome {
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    /// Smallest slack observed; negative means the property was violated.
    pub worst_margin: f64,
    /// Trial indexes of the first few failures (replay with the same seed).
    pub failing_trials: Vec<u64>,
}

impl PropertyOutcome {
    fn new(name: &str) -> Self {
        PropertyOutcome {
            name: name.to_string(),
            trials: 0,
            failures: 0,
            worst_margin: f64::INFINITY,
            failing_trials: Vec::new(),
        }
    }

    fn record(&mut self, trial: u64, margin: f64, pass: bool) {
        self.trials += 1;
        self.worst_margin = self.worst_margin.min(margin);
        if !pass {
            self.failures += 1;
            if self.failing_trials.len() < 5 {
                self.failing_trials.push(trial);
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub trials: usize,
    pub passed: bool,
    pub worst_property: String,
    pub worst_margin: f64,
    pub properties: Vec<PropertyOutcome>,
}

/// A random attributed graph suitable for the bound properties: both
/// groups have at least two members and at least one non-isolated node.
pub fn random_bound_instance<R: Rng + ?Sized>(
    rng: &mut R,
) -> (Graph, FeatureMatrix, SensitiveAttrs) {
    loop {
        let n = rng.random_range(4..=50usize);
        let p = rng.random_range(0.1..0.5f64);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.random::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
        let bits: Vec<u8> = (0..n).map(|_| u8::from(rng.random_bool(0.5))).collect();
        let ones = bits.iter().filter(|&&b| b == 1).count();
        if ones < 2 || n - ones < 2 {
            continue;
        }
        let graph = Graph::from_edges(&edges, n).expect("generated ids are in range");
        let group_connected = |g: u8| {
            bits.iter()
                .enumerate()
                .any(|(i, &b)| b == g && graph.degree(i) > 0)
        };
        if !group_connected(0) || !group_connected(1) {
            continue;
        }
        let f = rng.random_range(1..=8usize);
        let data: Vec<f64> = (0..n * f).map(|_| rng.random_range(-1.0..1.0)).collect();
        let features = FeatureMatrix::from_vec(n, f, data).expect("finite draws");
        let sensitive = SensitiveAttrs::new(bits).expect("binary bits");
        return (graph, features, sensitive);
    }
}

/// A random graph whose omega sets dominate the chi sets in every group,
/// with at least one chi node per group.
pub fn random_omega_dominant_instance<R: Rng + ?Sized>(
    rng: &mut R,
) -> (Graph, FeatureMatrix, SensitiveAttrs) {
    let c0 = rng.random_range(1..=4usize);
    let w0 = rng.random_range(c0..=c0 + 6);
    let c1 = rng.random_range(1..=4usize);
    let w1 = rng.random_range(c1..=c1 + 6);
    let n0 = c0 + w0;
    let n = n0 + c1 + w1;
    // group 0 occupies ids 0..n0; the first c0 / c1 ids of each group are
    // the designated chi nodes
    let mut edges = Vec::new();
    for i in 0..c0 {
        edges.push((i, n0 + (i % c1)));
    }
    for j in 0..c1 {
        edges.push((j % c0, n0 + j));
    }
    let intra = |lo: usize, hi: usize, edges: &mut Vec<(usize, usize)>, rng: &mut R| {
        for u in lo..hi {
            for v in (u + 1)..hi {
                if rng.random::<f64>() < 0.3 {
                    edges.push((u, v));
                }
            }
        }
    };
    intra(0, n0, &mut edges, rng);
    intra(n0, n, &mut edges, rng);
    let graph = Graph::from_edges(&edges, n).expect("generated ids are in range");
    let bits: Vec<u8> = (0..n).map(|i| u8::from(i >= n0)).collect();
    let data: Vec<f64> = (0..n * 3).map(|_| rng.random_range(-1.0..1.0)).collect();
    (
        graph,
        FeatureMatrix::from_vec(n, 3, data).expect("finite draws"),
        SensitiveAttrs::new(bits).expect("binary bits"),
    )
}

/// A random instance where edge addition can balance exactly: intra edges
/// dominate and enough inter pairs are absent.
pub fn random_edge_addition_instance<R: Rng + ?Sized>(
    rng: &mut R,
) -> (Graph, SensitiveAttrs) {
    loop {
        let n = rng.random_range(6..=40usize);
        let p = rng.random_range(0.05..0.3f64);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.random::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
        let bits: Vec<u8> = (0..n).map(|_| u8::from(rng.random_bool(0.5))).collect();
        let ones = bits.iter().filter(|&&b| b == 1).count();
        if ones == 0 || ones == n {
            continue;
        }
        let graph = Graph::from_edges(&edges, n).expect("generated ids are in range");
        let s = SensitiveAttrs::new(bits).expect("binary bits");
        let part = GroupPartition::compute(&graph, &s).expect("lengths match");
        let inter = part.e_chi.len();
        let intra = part.num_intra_edges();
        if intra < inter {
            continue;
        }
        // exact balance needs enough absent inter pairs
        if part.s0.len() * part.s1.len() < intra {
            continue;
        }
        return (graph, s);
    }
}

/// The bound is tight here: a complete bipartite graph between the groups
/// with constant per-group features under open-neighborhood aggregation,
/// so any deflation of `||c||_1` must violate it.
fn tightness_witness() -> (Graph, FeatureMatrix, SensitiveAttrs, AggregationConfig) {
    let graph = Graph::from_edges(&[(0, 2), (0, 3), (1, 2), (1, 3)], 4).expect("static edges");
    let h = FeatureMatrix::from_rows(&[vec![1.0], vec![1.0], vec![0.0], vec![0.0]])
        .expect("static matrix");
    let s = SensitiveAttrs::new(vec![0, 0, 1, 1]).expect("static attrs");
    let cfg = AggregationConfig {
        num_layers: 1,
        include_self: false,
    };
    (graph, h, s, cfg)
}

fn check_bound_instance(
    graph: &Graph,
    h: &FeatureMatrix,
    s: &SensitiveAttrs,
    agg: &AggregationConfig,
    hooks: &VerifyHooks,
) -> Result<(f64, f64)> {
    let report = compute_bias_report(graph, h, s, agg)?;
    let c_l1: f64 = report.c.iter().sum();
    let delta_l1: f64 = report.delta.iter().map(|d| d.abs()).sum();
    let bound = theorem1_bound(
        c_l1 * hooks.c_l1_scale,
        delta_l1,
        report.gamma1,
        report.gamma2,
        graph.num_nodes(),
        report.delta_max,
    );
    let bound_margin = bound - report.rho_l1;

    let z = mean_aggregate(graph, h, agg)?;
    let (rho_a, _) = correlation_rho(&z, s)?;
    let part = GroupPartition::compute(graph, s)?;
    let rho_b = rho_via_group_gap(&z, &part)?;
    let max_diff = rho_a
        .iter()
        .zip(&rho_b)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    Ok((bound_margin, RHO_IDENTITY_TOL - max_diff))
}

fn run_bound_properties(
    cfg: &VerifyConfig,
    hooks: &VerifyHooks,
) -> Result<(PropertyOutcome, PropertyOutcome)> {
    let mut bound = PropertyOutcome::new("theorem1_bound");
    let mut identity = PropertyOutcome::new("rho_identity");

    let (g, h, s, agg) = tightness_witness();
    let (m_bound, m_id) = check_bound_instance(&g, &h, &s, &agg, hooks)?;
    bound.record(0, m_bound, m_bound >= -BOUND_TOL);
    identity.record(0, m_id, m_id >= 0.0);

    let agg = AggregationConfig::default();
    for t in 0..cfg.trials as u64 {
        let mut rng = trial_stream(cfg.seed, P_BOUND, t);
        let (g, h, s) = random_bound_instance(&mut rng);
        let (m_bound, m_id) = check_bound_instance(&g, &h, &s, &agg, hooks)?;
        bound.record(t + 1, m_bound, m_bound >= -BOUND_TOL);
        identity.record(t + 1, m_id, m_id >= 0.0);
    }
    Ok((bound, identity))
}

/// Keep probabilities `1 - p^(m)` for a random normalized gap vector.
fn random_keep_probs<R: Rng + ?Sized>(rng: &mut R) -> (Vec<f64>, Vec<f64>) {
    let f = rng.random_range(2..=12usize);
    let delta: Vec<f64> = (0..f).map(|_| rng.random_range(-1.0..1.0)).collect();
    let abs: Vec<f64> = delta.iter().map(|d| d.abs()).collect();
    let lo = abs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = abs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let delta_bar: Vec<f64> = if hi > lo {
        abs.iter().map(|a| (a - lo) / (hi - lo)).collect()
    } else {
        vec![0.0; f]
    };
    let alpha = rng.random_range(0.05..1.2f64);
    let p_mask = masking_probs(&delta_bar, alpha).expect("valid inputs");
    let keep: Vec<f64> = p_mask.iter().map(|p| 1.0 - p).collect();
    (delta, keep)
}

fn run_prop1_closed_form(cfg: &VerifyConfig) -> PropertyOutcome {
    let mut out = PropertyOutcome::new("prop1_closed_form");
    for t in 0..cfg.trials as u64 {
        let mut rng = trial_stream(cfg.seed, P_PROP1_CF, t);
        let (delta, keep) = random_keep_probs(&mut rng);
        let adaptive: f64 = keep.iter().zip(&delta).map(|(p, d)| p * d.abs()).sum();
        let p_bar = keep.iter().sum::<f64>() / keep.len() as f64;
        let uniform = p_bar * delta.iter().map(|d| d.abs()).sum::<f64>();
        let margin = uniform - adaptive;
        out.record(t, margin, margin >= -BOUND_TOL);
    }
    out
}

fn run_prop1_monte_carlo(cfg: &VerifyConfig) -> PropertyOutcome {
    let mut out = PropertyOutcome::new("prop1_monte_carlo");
    let mut rng = trial_stream(cfg.seed, P_PROP1_MC, 0);
    let (delta, keep) = random_keep_probs(&mut rng);
    let p_bar = keep.iter().sum::<f64>() / keep.len() as f64;

    let sample_norms = |probs: &dyn Fn(usize) -> f64, rng: &mut rand_chacha::ChaCha8Rng| {
        let mut sum = 0.0f64;
        let mut sum_sq = 0.0f64;
        for _ in 0..MONTE_CARLO_DRAWS {
            let mut norm = 0.0;
            for (i, d) in delta.iter().enumerate() {
                if rng.random::<f64>() < probs(i) {
                    norm += d.abs();
                }
            }
            sum += norm;
            sum_sq += norm * norm;
        }
        let n = MONTE_CARLO_DRAWS as f64;
        let mean = sum / n;
        let var = (sum_sq / n - mean * mean).max(0.0);
        (mean, (var / n).sqrt())
    };

    let mut rng_a = trial_stream(cfg.seed, P_PROP1_MC, 1);
    let (mean_adaptive, se_adaptive) = sample_norms(&|i| keep[i], &mut rng_a);
    let mut rng_u = trial_stream(cfg.seed, P_PROP1_MC, 2);
    let (mean_uniform, se_uniform) = sample_norms(&|_| p_bar, &mut rng_u);

    let se = (se_adaptive * se_adaptive + se_uniform * se_uniform).sqrt();
    let margin = (mean_uniform - mean_adaptive) + 3.0 * se;
    out.record(0, margin, margin >= 0.0);
    out
}

fn run_deletion_expectation(cfg: &VerifyConfig) -> Result<PropertyOutcome> {
    let mut out = PropertyOutcome::new("edge_deletion_expectation");
    let case = fixtures::case1();
    let part = GroupPartition::compute(&case.graph, &case.sensitive)?;
    let del = EdgeDeletionConfig {
        pi: 1.0,
        removal_cap: 1.0, // cap disabled
    };
    // reject silently-degenerate setups before sampling
    let probs = deletion_probs(&part, &del)?;
    debug_assert!(probs.warnings.is_empty());

    let expected_inter = del.pi * part.e_chi.len() as f64;
    let expected_intra = expected_inter / 2.0;
    let mut sums = [0.0f64; 3];
    for t in 0..DELETION_TRIALS as u64 {
        let mut rng = trial_stream(cfg.seed, P_ED_EXPECT, t);
        let outcome = edge_delete(&case.graph, &part, &del, &mut rng)?;
        let after = GroupPartition::compute(&outcome.graph, &case.sensitive)?;
        sums[0] += after.e_chi.len() as f64;
        sums[1] += after.e_omega_s0.len() as f64;
        sums[2] += after.e_omega_s1.len() as f64;
    }
    let n = DELETION_TRIALS as f64;
    let rel = |mean: f64, expect: f64| (mean - expect).abs() / expect;
    let worst = rel(sums[0] / n, expected_inter)
        .max(rel(sums[1] / n, expected_intra))
        .max(rel(sums[2] / n, expected_intra));
    let margin = DELETION_REL_TOL - worst;
    out.record(0, margin, margin >= 0.0);
    Ok(out)
}

fn run_node_sampling_gamma1(cfg: &VerifyConfig) -> Result<PropertyOutcome> {
    let mut out = PropertyOutcome::new("node_sampling_gamma1");
    let ns = NodeSamplingConfig {
        min_fraction_chi: 0.0,
        min_fraction_omega: 0.0,
        phi: 0.0,
    };
    for t in 0..cfg.trials as u64 {
        let mut rng = trial_stream(cfg.seed, P_NS_GAMMA1, t);
        let (g, x, s) = random_omega_dominant_instance(&mut rng);
        let part = GroupPartition::compute(&g, &s)?;
        let sub = node_sample(&g, &x, &s, &part, &ns, &mut rng)?;
        let sub_part = GroupPartition::compute(&sub.graph, &sub.sensitive)?;
        let g1 = gamma1(&sub_part)?;
        out.record(t, 0.0 - g1, g1 == 0.0);
    }
    Ok(out)
}

fn run_edge_addition_balance(cfg: &VerifyConfig) -> Result<PropertyOutcome> {
    let mut out = PropertyOutcome::new("edge_addition_balance");
    for t in 0..cfg.trials as u64 {
        let mut rng = trial_stream(cfg.seed, P_EA_BALANCE, t);
        let (g, s) = random_edge_addition_instance(&mut rng);
        let part = GroupPartition::compute(&g, &s)?;
        let added = edge_add(&g, &part, &mut rng)?;
        let after = GroupPartition::compute(&added.graph, &s)?;
        let structural_ok = added.shortfall == 0
            && added.added.iter().all(|&(u, v)| s.get(u) != s.get(v))
            && after.e_chi.len() == part.e_chi.len() + added.added.len()
            && added.graph.num_edges() == g.num_edges() + added.added.len();
        let imbalance = after.e_chi.len() as f64 - after.num_intra_edges() as f64;
        let margin = if structural_ok { 0.0 - imbalance.abs() } else { -1.0 };
        out.record(t, margin, structural_ok && imbalance == 0.0);
    }
    Ok(out)
}

/// Checks that the definitional and closed-form `sigma_s` agree; folded
/// into the identity property's instances.
fn sigma_s_definitional(s: &SensitiveAttrs) -> f64 {
    let n = s.len() as f64;
    let mean = s.iter().map(f64::from).sum::<f64>() / n;
    (s.iter().map(|v| (f64::from(v) - mean).powi(2)).sum::<f64>() / n).sqrt()
}

fn run_sigma_s_identity(cfg: &VerifyConfig) -> PropertyOutcome {
    let mut out = PropertyOutcome::new("sigma_s_identity");
    for t in 0..cfg.trials as u64 {
        let mut rng = trial_stream(cfg.seed, P_BOUND, t);
        let (_, _, s) = random_bound_instance(&mut rng);
        let (n0, n1) = s.group_sizes();
        let diff = (sigma_s_definitional(&s) - sigma_s_closed_form(n0, n1)).abs();
        let margin = SIGMA_S_TOL - diff;
        out.record(t, margin, margin >= 0.0);
    }
    out
}

/// Runs every property suite. `trials` scales the randomized suites; the
/// Monte-Carlo and deletion-expectation suites use their fixed draw
/// counts.
pub fn run_verification(cfg: &VerifyConfig, hooks: &VerifyHooks) -> Result<VerifyReport> {
    if cfg.trials == 0 {
        return Err(Error::invalid("verification needs trials >= 1"));
    }
    let (bound, identity) = run_bound_properties(cfg, hooks)?;
    let properties = vec![
        bound,
        identity,
        run_sigma_s_identity(cfg),
        run_prop1_closed_form(cfg),
        run_prop1_monte_carlo(cfg),
        run_deletion_expectation(cfg)?,
        run_node_sampling_gamma1(cfg)?,
        run_edge_addition_balance(cfg)?,
    ];
    let passed = properties.iter().all(PropertyOutcome::passed);
    let worst = properties
        .iter()
        .min_by(|a, b| a.worst_margin.total_cmp(&b.worst_margin))
        .expect("at least one property");
    Ok(VerifyReport {
        seed: cfg.seed,
        trials: cfg.trials,
        passed,
        worst_property: worst.name.clone(),
        worst_margin: worst.worst_margin,
        properties,
    })
}
