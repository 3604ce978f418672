//! Quantify sensitive-attribute bias in aggregated representations.
//!
//! Builds the intra-heavy toy graph, runs the full analysis, and prints
//! the correlation vector, the balance terms, and the bound.
//!
//! ```bash
//! cargo run --example analyze_bias
//! ```

use fairgraph::bias::{compute_bias_report, AggregationConfig};
use fairgraph::fixtures;
use fairgraph::graph::GroupPartition;
use fairgraph::io::to_report_json;

fn main() -> fairgraph::Result<()> {
    let case = fixtures::case1();
    let part = GroupPartition::compute(&case.graph, &case.sensitive)?;
    let counts = part.counts();
    println!(
        "graph: {} nodes, {} edges ({} inter / {} intra-S0 / {} intra-S1)",
        counts.num_nodes, counts.num_edges, counts.e_chi, counts.e_omega_s0, counts.e_omega_s1
    );

    let report = compute_bias_report(
        &case.graph,
        &case.features,
        &case.sensitive,
        &AggregationConfig::default(),
    )?;
    println!("rho per feature: {:?}", report.rho);
    println!("||rho||_1 = {:.4}", report.rho_l1);
    println!(
        "gamma1 = {:.4}, gamma2 = {:.4}, Delta = {:.4}",
        report.gamma1, report.gamma2, report.delta_max
    );
    println!(
        "bound = {:.4} (slack over ||rho||_1: {:.4})",
        report.bound,
        report.bound - report.rho_l1
    );
    println!("exact group gap ||epsilon||_1 = {:.4}", report.epsilon_l1);

    println!("\nfull report as emitted by `fairgraph analyze`:");
    print!("{}", to_report_json(&report)?);
    Ok(())
}
