//! Population-balancing node sampling: keeps every node that has an
//! inter-group edge and subsamples the rest until the chi/omega ratio is
//! 1/2 in each group, which drives gamma1 to zero.
//!
//! ```bash
//! cargo run --example node_sampling
//! ```

use fairgraph::augment::{node_sample, sampling_targets, NodeSamplingConfig};
use fairgraph::bias::gamma1;
use fairgraph::fixtures;
use fairgraph::graph::GroupPartition;
use fairgraph::rng::substream;

fn main() -> fairgraph::Result<()> {
    let case = fixtures::case1();
    let part = GroupPartition::compute(&case.graph, &case.sensitive)?;
    let counts = part.counts();
    println!(
        "before: |S0_chi|={}, |S0_omega|={}, |S1_chi|={}, |S1_omega|={}, gamma1={:.4}",
        counts.s0_chi,
        counts.s0_omega,
        counts.s1_chi,
        counts.s1_omega,
        gamma1(&part)?
    );

    // unconstrained budgets reproduce the chi-sized targets exactly
    let cfg = NodeSamplingConfig {
        min_fraction_chi: 0.0,
        min_fraction_omega: 0.0,
        phi: 0.0,
    };
    let targets = sampling_targets(&part, &cfg)?;
    println!(
        "targets: draw {} from S0_omega, {} from S1_omega ({:?})",
        targets.s0_take, targets.s1_take, targets.branch
    );

    let mut rng = substream(7, 0);
    let sub = node_sample(&case.graph, &case.features, &case.sensitive, &part, &cfg, &mut rng)?;
    let sub_part = GroupPartition::compute(&sub.graph, &sub.sensitive)?;
    let after = sub_part.counts();
    println!(
        "after: {} nodes kept (original ids {:?}), gamma1={:.4}",
        after.num_nodes,
        sub.id_map,
        gamma1(&sub_part)?
    );

    // with the default 25% omega budget floor the subgraph keeps more
    // omega nodes and gamma1 stays above zero
    let floored = NodeSamplingConfig::default();
    let sub = node_sample(
        &case.graph,
        &case.features,
        &case.sensitive,
        &part,
        &floored,
        &mut rng,
    )?;
    let sub_part = GroupPartition::compute(&sub.graph, &sub.sensitive)?;
    println!(
        "with default budget floors: {} nodes kept, gamma1={:.4}",
        sub.graph.num_nodes(),
        gamma1(&sub_part)?
    );
    Ok(())
}
