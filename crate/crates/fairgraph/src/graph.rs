//! Attributed-graph data model and the sensitive-attribute partition.
//!
//! All types here are immutable after construction: [`Graph`] stores a
//! symmetric CSR adjacency over dense node ids `0..N`, and
//! [`GroupPartition`] derives every group/edge subset the analysis and
//! augmentation layers read (`S_0`, `S_1`, their chi/omega splits,
//! per-node inter/intra degrees, and the three edge strata).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Undirected simple graph in compressed sparse form.
///
/// Neighbor lists are sorted ascending; no self-loops or duplicate edges
/// are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    num_nodes: usize,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
}

impl Graph {
    /// Builds a graph from an edge list that may contain duplicates, both
    /// orientations of the same pair, and self-loops (dropped).
    pub fn from_edges(edge_list: &[(usize, usize)], num_nodes: usize) -> Result<Graph> {
        let mut pairs = Vec::with_capacity(edge_list.len());
        for &(u, v) in edge_list {
            if u >= num_nodes || v >= num_nodes {
                return Err(Error::invalid(format!(
                    "edge ({u}, {v}) references a node id >= num_nodes ({num_nodes})"
                )));
            }
            if u == v {
                continue; // self-loops are not representable here
            }
            pairs.push((u.min(v), u.max(v)));
        }
        pairs.sort_unstable();
        pairs.dedup();
        Ok(Self::from_canonical_pairs(&pairs, num_nodes))
    }

    /// `pairs` must be deduplicated with `u < v`.
    fn from_canonical_pairs(pairs: &[(usize, usize)], num_nodes: usize) -> Graph {
        let mut degree = vec![0usize; num_nodes];
        for &(u, v) in pairs {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = vec![0usize; num_nodes + 1];
        for i in 0..num_nodes {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let mut neighbors = vec![0usize; offsets[num_nodes]];
        let mut cursor = offsets.clone();
        for &(u, v) in pairs {
            neighbors[cursor[u]] = v;
            cursor[u] += 1;
            neighbors[cursor[v]] = u;
            cursor[v] += 1;
        }
        for i in 0..num_nodes {
            neighbors[offsets[i]..offsets[i + 1]].sort_unstable();
        }
        Graph {
            num_nodes,
            offsets,
            neighbors,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// Number of undirected edges.
    pub fn num_edges(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.num_nodes && v < self.num_nodes && self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_nodes).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| u < v)
                .map(move |&v| (u, v))
        })
    }
}

/// Dense node feature matrix; also carries aggregated representations.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    /// Row-major construction. Every value must be finite.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<FeatureMatrix> {
        if data.len() != rows * cols {
            return Err(Error::invalid(format!(
                "feature matrix of shape {rows}x{cols} needs {} values, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(bad) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "feature matrix contains non-finite value at row {}, column {}",
                bad / cols.max(1),
                bad % cols.max(1)
            )));
        }
        Ok(FeatureMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<FeatureMatrix> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid("feature rows have inconsistent lengths"));
        }
        Self::from_vec(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.rows).map(move |i| self.get(i, j))
    }

    /// New matrix containing the listed rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> FeatureMatrix {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        FeatureMatrix {
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }
}

/// Binary sensitive attribute per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SensitiveAttrs {
    values: Vec<u8>,
}

impl SensitiveAttrs {
    pub fn new(values: Vec<u8>) -> Result<SensitiveAttrs> {
        if let Some(i) = values.iter().position(|&v| v > 1) {
            return Err(Error::invalid(format!(
                "sensitive attribute at node {i} is {}, expected 0 or 1",
                values[i]
            )));
        }
        Ok(SensitiveAttrs { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> u8 {
        self.values[i]
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.values.iter().copied()
    }

    /// `(|S_0|, |S_1|)`.
    pub fn group_sizes(&self) -> (usize, usize) {
        let ones = self.values.iter().filter(|&&v| v == 1).count();
        (self.values.len() - ones, ones)
    }

    pub fn select(&self, nodes: &[usize]) -> SensitiveAttrs {
        SensitiveAttrs {
            values: nodes.iter().map(|&n| self.values[n]).collect(),
        }
    }
}

/// Sensitive-group bookkeeping derived from a graph and its attributes.
///
/// `chi` marks nodes with at least one inter-group edge, `omega` nodes
/// with none; edges are stratified into inter (`e_chi`) and the two
/// intra strata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPartition {
    s: Vec<u8>,
    pub s0: Vec<usize>,
    pub s1: Vec<usize>,
    pub s0_chi: Vec<usize>,
    pub s0_omega: Vec<usize>,
    pub s1_chi: Vec<usize>,
    pub s1_omega: Vec<usize>,
    /// Per-node count of inter-group edges.
    pub d_chi: Vec<usize>,
    /// Per-node count of same-group edges.
    pub d_omega: Vec<usize>,
    pub e_chi: Vec<(usize, usize)>,
    pub e_omega_s0: Vec<(usize, usize)>,
    pub e_omega_s1: Vec<(usize, usize)>,
}

impl GroupPartition {
    pub fn compute(graph: &Graph, s: &SensitiveAttrs) -> Result<GroupPartition> {
        if s.len() != graph.num_nodes() {
            return Err(Error::invalid(format!(
                "sensitive attribute length {} does not match node count {}",
                s.len(),
                graph.num_nodes()
            )));
        }
        let n = graph.num_nodes();
        let mut d_chi = vec![0usize; n];
        let mut d_omega = vec![0usize; n];
        let mut e_chi = Vec::new();
        let mut e_omega_s0 = Vec::new();
        let mut e_omega_s1 = Vec::new();
        for (u, v) in graph.edges() {
            if s.get(u) != s.get(v) {
                d_chi[u] += 1;
                d_chi[v] += 1;
                e_chi.push((u, v));
            } else {
                d_omega[u] += 1;
                d_omega[v] += 1;
                if s.get(u) == 0 {
                    e_omega_s0.push((u, v));
                } else {
                    e_omega_s1.push((u, v));
                }
            }
        }
        let mut part = GroupPartition {
            s: s.values().to_vec(),
            s0: Vec::new(),
            s1: Vec::new(),
            s0_chi: Vec::new(),
            s0_omega: Vec::new(),
            s1_chi: Vec::new(),
            s1_omega: Vec::new(),
            d_chi,
            d_omega,
            e_chi,
            e_omega_s0,
            e_omega_s1,
        };
        for v in 0..n {
            let chi = part.d_chi[v] >= 1;
            match (s.get(v), chi) {
                (0, true) => part.s0_chi.push(v),
                (0, false) => part.s0_omega.push(v),
                (1, true) => part.s1_chi.push(v),
                (1, false) => part.s1_omega.push(v),
                _ => unreachable!(),
            }
            if s.get(v) == 0 {
                part.s0.push(v);
            } else {
                part.s1.push(v);
            }
        }
        Ok(part)
    }

    pub fn group_of(&self, node: usize) -> u8 {
        self.s[node]
    }

    pub fn num_nodes(&self) -> usize {
        self.s.len()
    }

    /// `|S^chi|`, nodes with at least one inter-edge.
    pub fn num_chi(&self) -> usize {
        self.s0_chi.len() + self.s1_chi.len()
    }

    /// `|S^omega|`, nodes with no inter-edge.
    pub fn num_omega(&self) -> usize {
        self.s0_omega.len() + self.s1_omega.len()
    }

    /// `|E^omega|`, intra-edges of both groups.
    pub fn num_intra_edges(&self) -> usize {
        self.e_omega_s0.len() + self.e_omega_s1.len()
    }

    pub fn counts(&self) -> PartitionCounts {
        PartitionCounts {
            num_nodes: self.s.len(),
            num_edges: self.e_chi.len() + self.num_intra_edges(),
            s0: self.s0.len(),
            s1: self.s1.len(),
            s0_chi: self.s0_chi.len(),
            s0_omega: self.s0_omega.len(),
            s1_chi: self.s1_chi.len(),
            s1_omega: self.s1_omega.len(),
            e_chi: self.e_chi.len(),
            e_omega_s0: self.e_omega_s0.len(),
            e_omega_s1: self.e_omega_s1.len(),
        }
    }

    pub(crate) fn require_both_groups(&self) -> Result<()> {
        if self.s0.is_empty() || self.s1.is_empty() {
            return Err(Error::degenerate(
                "both sensitive groups must be nonempty for this operation",
            ));
        }
        Ok(())
    }
}

/// Cardinality summary of a [`GroupPartition`], as reported by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionCounts {
    pub num_nodes: usize,
    pub num_edges: usize,
    pub s0: usize,
    pub s1: usize,
    pub s0_chi: usize,
    pub s0_omega: usize,
    pub s1_chi: usize,
    pub s1_omega: usize,
    pub e_chi: usize,
    pub e_omega_s0: usize,
    pub e_omega_s1: usize,
}

/// Result of restricting a dataset to a node subset: graph, features,
/// attributes, and the map from new dense ids back to original ids.
#[derive(Debug, Clone)]
pub struct InducedSubgraph {
    pub graph: Graph,
    pub features: FeatureMatrix,
    pub sensitive: SensitiveAttrs,
    /// `id_map[new_id] == original_id`; ascending.
    pub id_map: Vec<usize>,
}

/// Extracts the subgraph induced by `nodes` together with consistently
/// sliced features and attributes. Relabeling is dense and preserves the
/// original id order.
pub fn induced_subgraph(
    graph: &Graph,
    nodes: &[usize],
    features: &FeatureMatrix,
    sensitive: &SensitiveAttrs,
) -> Result<InducedSubgraph> {
    if nodes.is_empty() {
        return Err(Error::invalid("induced subgraph needs a nonempty node set"));
    }
    if features.rows() != graph.num_nodes() || sensitive.len() != graph.num_nodes() {
        return Err(Error::invalid(
            "features/sensitive rows must match the graph node count",
        ));
    }
    let mut keep: Vec<usize> = nodes.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&bad) = keep.iter().find(|&&v| v >= graph.num_nodes()) {
        return Err(Error::invalid(format!(
            "node id {bad} out of range (num_nodes = {})",
            graph.num_nodes()
        )));
    }
    let mut new_id = vec![usize::MAX; graph.num_nodes()];
    for (new, &old) in keep.iter().enumerate() {
        new_id[old] = new;
    }
    let mut pairs = Vec::new();
    for &u in &keep {
        for &v in graph.neighbors(u) {
            if u < v && new_id[v] != usize::MAX {
                pairs.push((new_id[u], new_id[v]));
            }
        }
    }
    let sub = Graph::from_edges(&pairs, keep.len())?;
    Ok(InducedSubgraph {
        graph: sub,
        features: features.select_rows(&keep),
        sensitive: sensitive.select(&keep),
        id_map: keep,
    })
}
