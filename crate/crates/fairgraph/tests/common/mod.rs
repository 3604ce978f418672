//! Helpers shared by the integration test targets.
#![allow(dead_code)] // each test target uses its own subset

use fairgraph::graph::{FeatureMatrix, Graph, SensitiveAttrs};

/// Builds a graph realizing the given partition cardinalities
/// `(|S0_chi|, |S0_omega|, |S1_chi|, |S1_omega|)`: group 0 occupies the
/// low ids, designated chi nodes are wired across the groups cyclically,
/// omega nodes stay inter-edge-free.
pub fn graph_with_cardinalities(
    chi0: usize,
    omega0: usize,
    chi1: usize,
    omega1: usize,
) -> (Graph, SensitiveAttrs) {
    assert!(chi0 > 0 && chi1 > 0, "chi sets must be nonempty to wire inter-edges");
    let n0 = chi0 + omega0;
    let n = n0 + chi1 + omega1;
    let mut edges = Vec::new();
    for i in 0..chi0 {
        edges.push((i, n0 + (i % chi1)));
    }
    for j in 0..chi1 {
        edges.push((j % chi0, n0 + j));
    }
    let graph = Graph::from_edges(&edges, n).expect("constructed ids are valid");
    let bits: Vec<u8> = (0..n).map(|i| u8::from(i >= n0)).collect();
    (graph, SensitiveAttrs::new(bits).expect("binary"))
}

/// Dense reference for closed-neighborhood mean aggregation: builds the
/// row-normalized `(A + I)` explicitly and multiplies.
#[allow(clippy::needless_range_loop)] // indexed form mirrors the matrix algebra
pub fn dense_mean_aggregate(graph: &Graph, h: &FeatureMatrix) -> Vec<Vec<f64>> {
    let n = graph.num_nodes();
    let f = h.cols();
    let mut weights = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        weights[i][i] = 1.0;
        for &j in graph.neighbors(i) {
            weights[i][j] = 1.0;
        }
        let row_sum: f64 = weights[i].iter().sum();
        for w in weights[i].iter_mut() {
            *w /= row_sum;
        }
    }
    let mut out = vec![vec![0.0f64; f]; n];
    for i in 0..n {
        for k in 0..n {
            let w = weights[i][k];
            if w != 0.0 {
                for j in 0..f {
                    out[i][j] += w * h.get(k, j);
                }
            }
        }
    }
    out
}
