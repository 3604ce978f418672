//! Two small attributed toy graphs with known partition cardinalities.
//!
//! Both share an 8-node split `S_0 = {0..4}`, `S_1 = {5..7}` and the same
//! 5-column feature matrix. `case1` is intra-heavy with few inter-edges
//! and an omega-majority (`|E_chi| = 2`, `|E_omega_S0| = 6`,
//! `|E_omega_S1| = 3`); `case2` is chi-majority and closer to balanced
//! (`|E_chi| = 4`, `|E_omega_S0| = 4`, `|E_omega_S1| = 2`). They anchor
//! the deterministic checks of the verification suite and the examples.

use crate::graph::{FeatureMatrix, Graph, SensitiveAttrs};

#[derive(Debug, Clone)]
pub struct ToyCase {
    pub graph: Graph,
    pub features: FeatureMatrix,
    pub sensitive: SensitiveAttrs,
}

pub fn toy_features() -> FeatureMatrix {
    FeatureMatrix::from_rows(&[
        vec![0.0, 0.1, -0.3, 0.1, -0.1],
        vec![0.2, -0.2, -0.2, 0.1, 0.1],
        vec![0.1, 0.2, 0.0, 0.2, 0.0],
        vec![0.2, 0.1, -0.2, 0.1, 0.2],
        vec![0.1, -0.1, -0.1, 0.1, -0.2],
        vec![-0.1, -0.1, 0.3, -0.2, 0.3],
        vec![-0.2, 0.1, 0.4, -0.1, -0.1],
        vec![-0.3, -0.1, 0.1, -0.3, -0.2],
    ])
    .expect("static matrix is valid")
}

fn toy_sensitive() -> SensitiveAttrs {
    SensitiveAttrs::new(vec![0, 0, 0, 0, 0, 1, 1, 1]).expect("static attrs are valid")
}

/// `|S0_chi| = 2`, `|S0_omega| = 3`, `|S1_chi| = 1`, `|S1_omega| = 2`,
/// edge strata `(2, 6, 3)`.
pub fn case1() -> ToyCase {
    let edges = [
        (0, 5),
        (1, 5), // inter
        (0, 1),
        (0, 2),
        (0, 3),
        (0, 4),
        (1, 2),
        (3, 4), // intra S0
        (5, 6),
        (5, 7),
        (6, 7), // intra S1
    ];
    ToyCase {
        graph: Graph::from_edges(&edges, 8).expect("static edges are valid"),
        features: toy_features(),
        sensitive: toy_sensitive(),
    }
}

/// `|S0_chi| = 4`, `|S0_omega| = 1`, `|S1_chi| = 2`, `|S1_omega| = 1`,
/// edge strata `(4, 4, 2)`.
pub fn case2() -> ToyCase {
    let edges = [
        (0, 5),
        (1, 5),
        (2, 6),
        (3, 6), // inter
        (0, 1),
        (1, 2),
        (2, 3),
        (3, 4), // intra S0
        (5, 7),
        (6, 7), // intra S1
    ];
    ToyCase {
        graph: Graph::from_edges(&edges, 8).expect("static edges are valid"),
        features: toy_features(),
        sensitive: toy_sensitive(),
    }
}
