//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with its observed margin (visible with `--nocapture`).
//!
//! Run with `cargo test --test acceptance`.

mod common;

use std::time::{Duration, Instant};

use fairgraph::augment::{
    deletion_probs, edge_add, masking_probs, node_sample, EdgeDeletionConfig, NodeSamplingConfig,
    PipelineConfig,
};
use fairgraph::bias::{
    compute_bias_report, correlation_rho, gamma1, group_stats, mean_aggregate, rho_via_group_gap,
    AggregationConfig,
};
use fairgraph::cli::{cmd_augment, DatasetPaths};
use fairgraph::fixtures;
use fairgraph::graph::{FeatureMatrix, Graph, GroupPartition, SensitiveAttrs};
use fairgraph::io;
use fairgraph::metrics::{nt_xent_loss, ContrastiveInputs};
use fairgraph::rng::trial_stream;
use fairgraph::verify::{random_bound_instance, random_omega_dominant_instance};

use common::graph_with_cardinalities;

const ACCEPT_SEED: u64 = 0x5eed_acce;

fn assert_runtime(name: &str, elapsed: Duration, limit: Duration) {
    assert!(
        elapsed < limit,
        "{name} took {elapsed:?}, limit {limit:?}"
    );
}

#[test]
fn criterion_01_gamma1_from_published_statistics() {
    let started = Instant::now();
    let rows = [
        ("Pokec-z", (622, 4229, 582, 2226), 0.66),
        ("Pokec-n", (423, 3617, 479, 1666), 0.67),
        ("UCSD34", (2246, 118, 1697, 71), 0.91),
        ("Berkeley13", (1619, 80, 1488, 77), 0.90),
    ];
    let mut worst = 0.0f64;
    for (name, (chi0, omega0, chi1, omega1), expected) in rows {
        let (graph, s) = graph_with_cardinalities(chi0, omega0, chi1, omega1);
        let part = GroupPartition::compute(&graph, &s).unwrap();
        let counts = part.counts();
        assert_eq!(
            (counts.s0_chi, counts.s0_omega, counts.s1_chi, counts.s1_omega),
            (chi0, omega0, chi1, omega1),
            "{name}: constructed cardinalities drifted"
        );
        let g1 = gamma1(&part).unwrap();
        let err = (g1 - expected).abs();
        assert!(err <= 0.005, "{name}: gamma1 {g1:.6} vs {expected} (err {err:.6})");
        worst = worst.max(err);
    }
    assert_runtime("criterion 1", started.elapsed(), Duration::from_secs(1));
    println!("criterion 01 gamma1 from published statistics: PASS (worst err {worst:.4})");
}

#[test]
fn criterion_02_feature_fixture_group_stats() {
    let started = Instant::now();
    let x = fixtures::toy_features();
    let graph = Graph::from_edges(&[], 8).unwrap();
    let s = SensitiveAttrs::new(vec![0, 0, 0, 0, 0, 1, 1, 1]).unwrap();
    let part = GroupPartition::compute(&graph, &s).unwrap();
    let stats = group_stats(&x, &part).unwrap();

    let expected_gap = [-0.32, -0.05, 0.43, -0.32, 0.0];
    let mut worst_gap = 0.0f64;
    for ((m1, m0), want) in stats.mu1.iter().zip(&stats.mu0).zip(expected_gap) {
        let err = ((m1 - m0) - want).abs();
        assert!(err <= 0.01, "mu1-mu0 entry off by {err}");
        worst_gap = worst_gap.max(err);
    }
    let expected_bar = [0.74, 0.12, 1.00, 0.74, 0.00];
    let mut worst_bar = 0.0f64;
    for (got, want) in stats.delta_bar.iter().zip(expected_bar) {
        let err = (got - want).abs();
        assert!(err <= 0.02, "delta_bar entry off by {err}");
        worst_bar = worst_bar.max(err);
    }
    assert_runtime("criterion 2", started.elapsed(), Duration::from_secs(1));
    println!(
        "criterion 02 feature fixture group stats: PASS (gap err {worst_gap:.4}, delta_bar err {worst_bar:.4})"
    );
}

#[test]
fn criterion_03_deletion_probabilities_exact() {
    let cfg = EdgeDeletionConfig {
        pi: 1.0,
        removal_cap: 0.5,
    };
    let case1 = fixtures::case1();
    let part1 = GroupPartition::compute(&case1.graph, &case1.sensitive).unwrap();
    let p1 = deletion_probs(&part1, &cfg).unwrap();
    assert_eq!((p1.inter, p1.intra_s0, p1.intra_s1), (0.0, 0.5, 0.5));

    let case2 = fixtures::case2();
    let part2 = GroupPartition::compute(&case2.graph, &case2.sensitive).unwrap();
    let p2 = deletion_probs(&part2, &cfg).unwrap();
    assert_eq!((p2.inter, p2.intra_s0, p2.intra_s1), (0.0, 0.5, 0.0));
    println!("criterion 03 deletion probabilities exact: PASS (case1 (0, 0.5, 0.5), case2 (0, 0.5, 0))");
}

#[test]
fn criterion_04_theorem1_bound_and_rho_identity() {
    let started = Instant::now();
    let agg = AggregationConfig::default();
    let mut passes = 0;
    let mut worst_slack = f64::INFINITY;
    let mut worst_identity = 0.0f64;
    for t in 0..200u64 {
        let mut rng = trial_stream(ACCEPT_SEED, 40, t);
        let (g, h, s) = random_bound_instance(&mut rng);
        let report = compute_bias_report(&g, &h, &s, &agg).unwrap();
        let slack = report.bound - report.rho_l1;
        assert!(slack >= -1e-12, "trial {t}: bound violated by {slack}");
        worst_slack = worst_slack.min(slack);

        let z = mean_aggregate(&g, &h, &agg).unwrap();
        let (rho_a, _) = correlation_rho(&z, &s).unwrap();
        let part = GroupPartition::compute(&g, &s).unwrap();
        let rho_b = rho_via_group_gap(&z, &part).unwrap();
        let diff = rho_a
            .iter()
            .zip(&rho_b)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(diff <= 1e-10, "trial {t}: rho routes disagree by {diff}");
        worst_identity = worst_identity.max(diff);
        passes += 1;
    }
    assert_eq!(passes, 200);
    assert_runtime("criterion 4", started.elapsed(), Duration::from_secs(10));
    println!(
        "criterion 04 theorem1 bound suite: PASS (200/200, min slack {worst_slack:.3e}, max identity diff {worst_identity:.3e})"
    );
}

fn monte_carlo_norm_mean(
    delta: &[f64],
    keep: impl Fn(usize) -> f64,
    draws: usize,
    seed: u64,
    stream: u64,
) -> (f64, f64) {
    let mut rng = trial_stream(seed, 50, stream);
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    for _ in 0..draws {
        let mut norm = 0.0;
        for (i, d) in delta.iter().enumerate() {
            if rand::Rng::random::<f64>(&mut rng) < keep(i) {
                norm += d.abs();
            }
        }
        sum += norm;
        sum_sq += norm * norm;
    }
    let n = draws as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    (mean, (var / n).sqrt())
}

fn keep_probs_for(delta: &[f64], alpha: f64) -> Vec<f64> {
    let abs: Vec<f64> = delta.iter().map(|d| d.abs()).collect();
    let lo = abs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = abs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let delta_bar: Vec<f64> = if hi > lo {
        abs.iter().map(|a| (a - lo) / (hi - lo)).collect()
    } else {
        vec![0.0; abs.len()]
    };
    masking_probs(&delta_bar, alpha)
        .unwrap()
        .iter()
        .map(|p| 1.0 - p)
        .collect()
}

#[test]
fn criterion_05_masking_proposition() {
    let started = Instant::now();

    // closed form on 1000 random gap vectors
    let mut worst = f64::INFINITY;
    for t in 0..1000u64 {
        let mut rng = trial_stream(ACCEPT_SEED, 51, t);
        let f = rand::Rng::random_range(&mut rng, 2..=12usize);
        let delta: Vec<f64> = (0..f)
            .map(|_| rand::Rng::random_range(&mut rng, -1.0..1.0))
            .collect();
        let alpha = rand::Rng::random_range(&mut rng, 0.05..1.2f64);
        let keep = keep_probs_for(&delta, alpha);
        let adaptive: f64 = keep.iter().zip(&delta).map(|(p, d)| p * d.abs()).sum();
        let p_bar = keep.iter().sum::<f64>() / keep.len() as f64;
        let uniform = p_bar * delta.iter().map(|d| d.abs()).sum::<f64>();
        let margin = uniform - adaptive;
        assert!(margin >= -1e-12, "trial {t}: closed form violated by {margin}");
        worst = worst.min(margin);
    }

    // Monte Carlo on one fixed instance, 1e5 draws per scheme
    let delta = [0.9, -0.15, 0.05, 0.6, -0.3, 0.0, 0.45, -0.75];
    let keep = keep_probs_for(&delta, 0.5);
    let p_bar = keep.iter().sum::<f64>() / keep.len() as f64;
    let (mean_adaptive, se_a) = monte_carlo_norm_mean(&delta, |i| keep[i], 100_000, ACCEPT_SEED, 0);
    let (mean_uniform, se_u) = monte_carlo_norm_mean(&delta, |_| p_bar, 100_000, ACCEPT_SEED, 1);
    let se = (se_a * se_a + se_u * se_u).sqrt();
    let gap = mean_uniform - mean_adaptive;
    assert!(
        gap >= -3.0 * se,
        "Monte Carlo inequality violated: gap {gap}, 3se {}",
        3.0 * se
    );

    // equality when |delta| is constant: adaptive probabilities degrade to
    // keep-everything and both schemes coincide
    let flat = [0.4, -0.4, 0.4, 0.4];
    let keep_flat = keep_probs_for(&flat, 0.7);
    assert!(keep_flat.iter().all(|&p| p == 1.0));
    let adaptive: f64 = keep_flat.iter().zip(&flat).map(|(p, d)| p * d.abs()).sum();
    let q_bar = keep_flat.iter().sum::<f64>() / keep_flat.len() as f64;
    let uniform = q_bar * flat.iter().map(|d| d.abs()).sum::<f64>();
    assert!((adaptive - uniform).abs() <= 1e-12);
    let (m_a, _) = monte_carlo_norm_mean(&flat, |i| keep_flat[i], 10_000, ACCEPT_SEED, 2);
    let (m_u, _) = monte_carlo_norm_mean(&flat, |_| q_bar, 10_000, ACCEPT_SEED, 3);
    assert!((m_a - m_u).abs() <= 1e-12);

    assert_runtime("criterion 5", started.elapsed(), Duration::from_secs(30));
    println!(
        "criterion 05 masking proposition: PASS (min closed-form margin {worst:.3e}, MC gap {gap:.4} vs 3se {:.4})",
        3.0 * se
    );
}

#[test]
fn criterion_06_edge_deletion_expectations() {
    let started = Instant::now();
    let case = fixtures::case1();
    let part = GroupPartition::compute(&case.graph, &case.sensitive).unwrap();
    let cfg = EdgeDeletionConfig {
        pi: 1.0,
        removal_cap: 1.0, // cap disabled
    };
    let trials = 10_000u64;
    let mut sums = [0.0f64; 3];
    for t in 0..trials {
        let mut rng = trial_stream(ACCEPT_SEED, 60, t);
        let out = fairgraph::augment::edge_delete(&case.graph, &part, &cfg, &mut rng).unwrap();
        let after = GroupPartition::compute(&out.graph, &case.sensitive).unwrap();
        sums[0] += after.e_chi.len() as f64;
        sums[1] += after.e_omega_s0.len() as f64;
        sums[2] += after.e_omega_s1.len() as f64;
    }
    let n = trials as f64;
    let expected = [
        cfg.pi * part.e_chi.len() as f64,
        cfg.pi * part.e_chi.len() as f64 / 2.0,
        cfg.pi * part.e_chi.len() as f64 / 2.0,
    ];
    let mut worst = 0.0f64;
    for (sum, want) in sums.iter().zip(expected) {
        let rel = (sum / n - want).abs() / want;
        assert!(rel <= 0.02, "relative error {rel:.4} exceeds 2%");
        worst = worst.max(rel);
    }
    assert_runtime("criterion 6", started.elapsed(), Duration::from_secs(10));
    println!("criterion 06 edge deletion expectations: PASS (worst rel err {worst:.4})");
}

#[test]
fn criterion_07_edge_addition_exact_balance() {
    let case1 = fixtures::case1();
    let part1 = GroupPartition::compute(&case1.graph, &case1.sensitive).unwrap();
    for t in 0..10u64 {
        let mut rng = trial_stream(ACCEPT_SEED, 70, t);
        let out = edge_add(&case1.graph, &part1, &mut rng).unwrap();
        assert_eq!(out.added.len(), 7, "trial {t}");
        assert_eq!(out.shortfall, 0);
        let after = GroupPartition::compute(&out.graph, &case1.sensitive).unwrap();
        assert_eq!(after.e_chi.len(), 9);
        assert_eq!(after.num_intra_edges(), 9);
    }

    let case2 = fixtures::case2();
    let part2 = GroupPartition::compute(&case2.graph, &case2.sensitive).unwrap();
    for t in 0..10u64 {
        let mut rng = trial_stream(ACCEPT_SEED, 71, t);
        let out = edge_add(&case2.graph, &part2, &mut rng).unwrap();
        assert_eq!(out.added.len(), 2, "trial {t}");
        let after = GroupPartition::compute(&out.graph, &case2.sensitive).unwrap();
        assert_eq!(after.e_chi.len(), after.num_intra_edges());
    }
    println!("criterion 07 edge addition exact balance: PASS (case1 +7 -> 9=9, case2 +2)");
}

#[test]
fn criterion_08_node_sampling_zero_gamma1() {
    let cfg = NodeSamplingConfig {
        min_fraction_chi: 0.0,
        min_fraction_omega: 0.0,
        phi: 0.0,
    };
    let mut passes = 0;
    for t in 0..100u64 {
        let mut rng = trial_stream(ACCEPT_SEED, 80, t);
        let (g, x, s) = random_omega_dominant_instance(&mut rng);
        let part = GroupPartition::compute(&g, &s).unwrap();
        let sub = node_sample(&g, &x, &s, &part, &cfg, &mut rng).unwrap();
        let sub_part = GroupPartition::compute(&sub.graph, &sub.sensitive).unwrap();
        let g1 = gamma1(&sub_part).unwrap();
        assert_eq!(g1, 0.0, "trial {t}: realized gamma1 = {g1}");
        passes += 1;
    }
    assert_eq!(passes, 100);
    println!("criterion 08 node sampling zero gamma1: PASS (100/100 exact)");
}

#[test]
fn criterion_09_augment_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let case = fixtures::case1();
    let graph_path = dir.path().join("graph.edges");
    let features_path = dir.path().join("features.csv");
    let sensitive_path = dir.path().join("sensitive.csv");
    io::write_edge_list(&graph_path, &case.graph).unwrap();
    io::write_features_csv(&features_path, &case.features).unwrap();
    io::write_sensitive_csv(&sensitive_path, &case.sensitive).unwrap();
    let config_path = dir.path().join("pipeline.conf");
    std::fs::write(
        &config_path,
        "enable_ns=true\nenable_ed=true\nenable_ea=true\nenable_fm=true\nalpha=0.4\npi=1.0\nmin_fraction_chi=0\nmin_fraction_omega=0\nseed=12345\n",
    )
    .unwrap();

    let paths = DatasetPaths {
        graph: graph_path,
        features: features_path,
        sensitive: sensitive_path,
        positive_class: None,
    };
    let out_a = dir.path().join("run_a");
    let out_b = dir.path().join("run_b");
    let manifest_a = cmd_augment(&paths, Some(&config_path), &out_a, None).unwrap();
    let manifest_b = cmd_augment(&paths, Some(&config_path), &out_b, None).unwrap();

    assert_eq!(manifest_a.outputs, manifest_b.outputs);
    for name in [
        fairgraph::cli::OUT_GRAPH,
        fairgraph::cli::OUT_FEATURES,
        fairgraph::cli::OUT_SENSITIVE,
        fairgraph::cli::OUT_ID_MAP,
        fairgraph::cli::OUT_BIAS_BEFORE,
        fairgraph::cli::OUT_BIAS_AFTER,
    ] {
        let a = std::fs::read(out_a.join(name)).unwrap();
        let b = std::fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
        assert!(!a.is_empty());
    }
    println!("criterion 09 augment determinism: PASS (byte-identical outputs for equal seeds)");
}

#[test]
fn criterion_10_contrastive_loss() {
    // closed form for the two-node orthogonal case
    let h = FeatureMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let inputs = ContrastiveInputs::new(h.clone(), h, 1.0).unwrap();
    let expected = (1.0 + 2.0 * (-1.0f64).exp()).ln();
    let got = nt_xent_loss(&inputs);
    assert!(
        (got - expected).abs() <= 1e-9,
        "closed form off by {}",
        (got - expected).abs()
    );

    let mut worst_sym = 0.0f64;
    let mut worst_perm = 0.0f64;
    for t in 0..100u64 {
        let mut rng = trial_stream(ACCEPT_SEED, 100, t);
        let n = rand::Rng::random_range(&mut rng, 2..=12usize);
        let f = rand::Rng::random_range(&mut rng, 2..=6usize);
        let draw = |rng: &mut rand_chacha::ChaCha8Rng| -> FeatureMatrix {
            loop {
                let data: Vec<f64> = (0..n * f)
                    .map(|_| rand::Rng::random_range(rng, -1.0..1.0))
                    .collect();
                let m = FeatureMatrix::from_vec(n, f, data).unwrap();
                if (0..n).all(|i| m.row(i).iter().any(|&v| v != 0.0)) {
                    return m;
                }
            }
        };
        let h1 = draw(&mut rng);
        let h2 = draw(&mut rng);
        let tau = rand::Rng::random_range(&mut rng, 0.2..1.5f64);

        let forward = nt_xent_loss(&ContrastiveInputs::new(h1.clone(), h2.clone(), tau).unwrap());
        let backward = nt_xent_loss(&ContrastiveInputs::new(h2.clone(), h1.clone(), tau).unwrap());
        worst_sym = worst_sym.max((forward - backward).abs());
        assert!((forward - backward).abs() <= 1e-12, "trial {t}: symmetry broken");

        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rand::Rng::random_range(&mut rng, 0..=i);
            perm.swap(i, j);
        }
        let permuted = nt_xent_loss(
            &ContrastiveInputs::new(h1.select_rows(&perm), h2.select_rows(&perm), tau).unwrap(),
        );
        worst_perm = worst_perm.max((forward - permuted).abs());
        assert!(
            (forward - permuted).abs() <= 1e-12,
            "trial {t}: permutation variance {}",
            (forward - permuted).abs()
        );
    }
    println!(
        "criterion 10 contrastive loss: PASS (closed form, symmetry {worst_sym:.2e}, permutation {worst_perm:.2e})"
    );
}

/// The full pipeline on the case fixture also satisfies the chained
/// balance condition used throughout: after EA ran last among the edge
/// steps, inter and intra edge counts agree.
#[test]
fn pipeline_chain_balance_on_fixture() {
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
        seed: 20240101,
        ..PipelineConfig::default()
    };
    let out = fairgraph::augment::fairaug(&case.graph, &case.features, &case.sensitive, &cfg)
        .unwrap();
    let part = GroupPartition::compute(&out.graph, &out.sensitive).unwrap();
    assert_eq!(part.e_chi.len(), part.num_intra_edges());
}
