//! The symmetric temperature-scaled contrastive objective over two
//! embedding views, evaluated as a pure function (identity projection).
//!
//! ```bash
//! cargo run --example contrastive_loss
//! ```

use fairgraph::graph::FeatureMatrix;
use fairgraph::metrics::{nt_xent_loss, ContrastiveInputs};
use fairgraph::rng::substream;
use rand::Rng;

fn main() -> fairgraph::Result<()> {
    // two orthogonal nodes with identical views: closed form log(1 + 2/e)
    let h = FeatureMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]])?;
    let loss = nt_xent_loss(&ContrastiveInputs::new(h.clone(), h, 1.0)?);
    println!(
        "orthogonal pair, tau=1: J = {loss:.6} (closed form {:.6})",
        (1.0 + 2.0 * (-1.0f64).exp()).ln()
    );

    // aligned views score low, shuffled views score high
    let mut rng = substream(17, 0);
    let n = 16;
    let f = 8;
    let base: Vec<f64> = (0..n * f).map(|_| rng.random_range(-1.0..1.0)).collect();
    let noisy: Vec<f64> = base
        .iter()
        .map(|v| v + 0.05 * rng.random_range(-1.0..1.0f64))
        .collect();
    let h1 = FeatureMatrix::from_vec(n, f, base)?;
    let h2 = FeatureMatrix::from_vec(n, f, noisy)?;
    for tau in [0.2, 0.4, 1.0] {
        let aligned = nt_xent_loss(&ContrastiveInputs::new(h1.clone(), h2.clone(), tau)?);
        let rotated: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        let misaligned =
            nt_xent_loss(&ContrastiveInputs::new(h1.clone(), h2.select_rows(&rotated), tau)?);
        println!("tau={tau}: aligned J = {aligned:.4}, misaligned J = {misaligned:.4}");
    }
    Ok(())
}
