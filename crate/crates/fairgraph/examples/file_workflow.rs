//! The file-based workflow behind the CLI, driven through the library:
//! write a dataset, analyze it, augment it into an output directory, and
//! inspect the manifest digests.
//!
//! ```bash
//! cargo run --example file_workflow
//! ```

use fairgraph::cli::{cmd_analyze, cmd_augment, DatasetPaths};
use fairgraph::fixtures;
use fairgraph::io;

fn main() -> fairgraph::Result<()> {
    let dir = std::env::temp_dir().join("fairgraph_file_workflow");
    std::fs::create_dir_all(&dir).map_err(|e| fairgraph::Error::io(&dir, e))?;

    let case = fixtures::case1();
    let paths = DatasetPaths {
        graph: dir.join("graph.edges"),
        features: dir.join("features.csv"),
        sensitive: dir.join("sensitive.csv"),
        positive_class: None,
    };
    io::write_edge_list(&paths.graph, &case.graph)?;
    io::write_features_csv(&paths.features, &case.features)?;
    io::write_sensitive_csv(&paths.sensitive, &case.sensitive)?;

    let report = cmd_analyze(&paths, None)?;
    println!(
        "analyze: gamma1 {:.4}, gamma2 {:.4}, ||rho||_1 {:.4}, bound {:.4}",
        report.bias.gamma1, report.bias.gamma2, report.bias.rho_l1, report.bias.bound
    );

    let config_path = dir.join("pipeline.conf");
    std::fs::write(
        &config_path,
        "enable_ns=true\nenable_ed=true\nenable_ea=true\nenable_fm=true\n\
         alpha=0.4\npi=1.0\nmin_fraction_chi=0\nmin_fraction_omega=0\nseed=99\n",
    )
    .map_err(|e| fairgraph::Error::io(&config_path, e))?;

    let out_dir = dir.join("augmented");
    let manifest = cmd_augment(&paths, Some(&config_path), &out_dir, None)?;
    println!("augment wrote {} files to {}", manifest.outputs.len(), out_dir.display());
    for (name, digest) in &manifest.outputs {
        println!("  {name}: sha256 {}", &digest[..16]);
    }

    // re-running with the same seed reproduces every digest
    let again = cmd_augment(&paths, Some(&config_path), &dir.join("augmented_again"), None)?;
    assert_eq!(manifest.outputs, again.outputs);
    println!("second run with the same seed: identical digests");
    Ok(())
}
