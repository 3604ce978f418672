//! Correlation between aggregated representations and the sensitive
//! attribute, and the analytic upper bound on its l1 norm.
//!
//! The bound decomposes into a feature term (`||delta||_1`, driven by
//! feature masking), a population-balance term (`gamma1`, driven by node
//! sampling), a neighborhood-balance term (`gamma2`, driven by edge
//! deletion/addition), and a deviation slack (`2 N Delta`):
//!
//! ```text
//! ||rho||_1 <= ||c||_1 ( ||delta||_1 * max(gamma1, gamma2) + 2 N Delta )
//! ```
//!
//! `delta` and `Delta` are taken from the representation entering the
//! final aggregation step; `c`, `sigma_z`, `rho`, and `epsilon` from the
//! aggregated output, so the bound stays valid for any layer count.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{FeatureMatrix, Graph, GroupPartition, SensitiveAttrs};

/// Parameters of the parameter-free aggregation used for analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AggregationConfig {
    /// Number of mean-aggregation applications (>= 1).
    pub num_layers: usize,
    /// Average over the closed neighborhood `N(i) ∪ {i}` (default) or the
    /// open neighborhood. The open variant requires every node to have
    /// degree >= 1.
    pub include_self: bool,
}

impl Default for AggregationConfig {
    fn default() -> Self {
        AggregationConfig {
            num_layers: 1,
            include_self: true,
        }
    }
}

impl AggregationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_layers == 0 {
            return Err(Error::invalid("num_layers must be >= 1"));
        }
        Ok(())
    }
}

/// Group means and deviations of a (pre-aggregation) representation.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupStats {
    pub mu0: Vec<f64>,
    pub mu1: Vec<f64>,
    /// `mu0 - mu1`.
    pub delta: Vec<f64>,
    /// Min-max normalized `|delta|`; all zeros when `|delta|` is constant.
    pub delta_bar: Vec<f64>,
    /// Max l-infinity deviation from the group mean within `S_0`.
    pub delta0: f64,
    /// Same within `S_1`.
    pub delta1: f64,
    /// `max(delta0, delta1)`.
    pub delta_max: f64,
}

/// Every quantity of the correlation bound for one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasReport {
    pub mu0: Vec<f64>,
    pub mu1: Vec<f64>,
    pub delta: Vec<f64>,
    pub delta_bar: Vec<f64>,
    pub delta0: f64,
    pub delta1: f64,
    pub delta_max: f64,
    /// `c_i = sqrt(|S0||S1|) / (N sigma_z_i)`; 0 for constant columns,
    /// which are excluded from `||c||_1` and have `rho_i = 0`.
    pub c: Vec<f64>,
    pub sigma_z: Vec<f64>,
    pub sigma_s: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub rho: Vec<f64>,
    pub rho_l1: f64,
    pub bound: f64,
    pub epsilon: Vec<f64>,
    pub epsilon_l1: f64,
}

/// Mean aggregation without learned weights: each row becomes the average
/// of its (closed, by default) neighborhood, repeated `num_layers` times.
pub fn mean_aggregate(graph: &Graph, h: &FeatureMatrix, cfg: &AggregationConfig) -> Result<FeatureMatrix> {
    cfg.validate()?;
    if h.rows() != graph.num_nodes() {
        return Err(Error::invalid(format!(
            "feature rows {} do not match node count {}",
            h.rows(),
            graph.num_nodes()
        )));
    }
    if !cfg.include_self {
        if let Some(v) = (0..graph.num_nodes()).find(|&v| graph.degree(v) == 0) {
            return Err(Error::degenerate(format!(
                "node {v} is isolated; open-neighborhood aggregation is undefined"
            )));
        }
    }
    let n = graph.num_nodes();
    let f = h.cols();
    let mut current = h.clone();
    for _ in 0..cfg.num_layers {
        let mut next = vec![0.0f64; n * f];
        for i in 0..n {
            let out = &mut next[i * f..(i + 1) * f];
            if cfg.include_self {
                out.copy_from_slice(current.row(i));
            }
            for &j in graph.neighbors(i) {
                for (o, x) in out.iter_mut().zip(current.row(j)) {
                    *o += x;
                }
            }
            let denom = (graph.degree(i) + usize::from(cfg.include_self)) as f64;
            for o in out.iter_mut() {
                *o /= denom;
            }
        }
        current = FeatureMatrix::from_vec(n, f, next)?;
    }
    Ok(current)
}

fn mean_over(rows: &[usize], h: &FeatureMatrix) -> Vec<f64> {
    let mut mu = vec![0.0f64; h.cols()];
    for &r in rows {
        for (m, x) in mu.iter_mut().zip(h.row(r)) {
            *m += x;
        }
    }
    let k = rows.len() as f64;
    for m in mu.iter_mut() {
        *m /= k;
    }
    mu
}

/// Group means `mu0`/`mu1`, their gap `delta`, the normalized `delta_bar`,
/// and the max deviations `Delta0`/`Delta1`.
pub fn group_stats(h: &FeatureMatrix, part: &GroupPartition) -> Result<GroupStats> {
    part.require_both_groups()?;
    if h.rows() != part.num_nodes() {
        return Err(Error::invalid(
            "feature rows must match the partitioned node count",
        ));
    }
    let mu0 = mean_over(&part.s0, h);
    let mu1 = mean_over(&part.s1, h);
    let delta: Vec<f64> = mu0.iter().zip(&mu1).map(|(a, b)| a - b).collect();

    let abs: Vec<f64> = delta.iter().map(|d| d.abs()).collect();
    let lo = abs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = abs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let delta_bar = if hi > lo {
        abs.iter().map(|a| (a - lo) / (hi - lo)).collect()
    } else {
        vec![0.0; abs.len()] // constant |delta|: no feature preferable
    };

    let max_dev = |rows: &[usize], mu: &[f64]| {
        rows.iter()
            .map(|&r| {
                h.row(r)
                    .iter()
                    .zip(mu)
                    .map(|(x, m)| (x - m).abs())
                    .fold(0.0f64, f64::max)
            })
            .fold(0.0f64, f64::max)
    };
    let delta0 = max_dev(&part.s0, &mu0);
    let delta1 = max_dev(&part.s1, &mu1);
    Ok(GroupStats {
        mu0,
        mu1,
        delta,
        delta_bar,
        delta0,
        delta1,
        delta_max: delta0.max(delta1),
    })
}

/// A column is treated as zero-variance iff it is exactly constant, which
/// is robust against round-off in the centered sums.
fn is_constant_column(z: &FeatureMatrix, j: usize) -> bool {
    let first = z.get(0, j);
    z.column(j).all(|v| v == first)
}

/// Population standard deviation per column (`1/N` normalization).
pub fn column_std(z: &FeatureMatrix) -> Vec<f64> {
    let n = z.rows() as f64;
    (0..z.cols())
        .map(|j| {
            if is_constant_column(z, j) {
                return 0.0;
            }
            let mean = z.column(j).sum::<f64>() / n;
            let ss = z.column(j).map(|v| (v - mean) * (v - mean)).sum::<f64>();
            (ss / n).sqrt()
        })
        .collect()
}

/// Pearson correlation of each representation column with the sensitive
/// attribute. Constant columns map to 0 by convention.
pub fn correlation_rho(z: &FeatureMatrix, s: &SensitiveAttrs) -> Result<(Vec<f64>, f64)> {
    if z.rows() != s.len() {
        return Err(Error::invalid(
            "representation rows must match the sensitive attribute length",
        ));
    }
    let (n0, n1) = s.group_sizes();
    if n0 == 0 || n1 == 0 {
        return Err(Error::degenerate(
            "correlation with the sensitive attribute needs both groups nonempty",
        ));
    }
    let n = z.rows() as f64;
    let s_mean = n1 as f64 / n;
    let s_ss: f64 = s.iter().map(|v| (v as f64 - s_mean).powi(2)).sum();
    let mut rho = Vec::with_capacity(z.cols());
    for j in 0..z.cols() {
        if is_constant_column(z, j) {
            rho.push(0.0);
            continue;
        }
        let z_mean = z.column(j).sum::<f64>() / n;
        let mut cov = 0.0;
        let mut z_ss = 0.0;
        for (i, v) in z.column(j).enumerate() {
            let dz = v - z_mean;
            cov += dz * (s.get(i) as f64 - s_mean);
            z_ss += dz * dz;
        }
        rho.push((cov / (z_ss.sqrt() * s_ss.sqrt())).clamp(-1.0, 1.0));
    }
    let l1 = rho.iter().map(|r| r.abs()).sum();
    Ok((rho, l1))
}

/// The algebraic route to the same correlation: `rho = c ∘ (mean_{S1} z -
/// mean_{S0} z)`. Agrees with [`correlation_rho`] to ~1e-15 on every
/// non-constant column.
pub fn rho_via_group_gap(z: &FeatureMatrix, part: &GroupPartition) -> Result<Vec<f64>> {
    part.require_both_groups()?;
    if z.rows() != part.num_nodes() {
        return Err(Error::invalid(
            "representation rows must match the partitioned node count",
        ));
    }
    let sigma = column_std(z);
    let c = c_vector(&sigma, part.s0.len(), part.s1.len(), z.rows());
    let (eps, _) = epsilon_gap(z, part)?;
    Ok(c
        .iter()
        .zip(&eps)
        .map(|(ci, ei)| (ci * ei).clamp(-1.0, 1.0))
        .collect())
}

/// `c_i = sqrt(|S0||S1|) / (N sigma_i)`, with constant columns mapped to 0
/// so they drop out of `||c||_1`.
pub fn c_vector(sigma_z: &[f64], n0: usize, n1: usize, n: usize) -> Vec<f64> {
    let scale = ((n0 as f64) * (n1 as f64)).sqrt() / n as f64;
    sigma_z
        .iter()
        .map(|&s| if s == 0.0 { 0.0 } else { scale / s })
        .collect()
}

/// `sigma_s` in closed form, `sqrt(|S0||S1|) / N`.
pub fn sigma_s_closed_form(n0: usize, n1: usize) -> f64 {
    ((n0 as f64) * (n1 as f64)).sqrt() / (n0 + n1) as f64
}

/// Population-balance term `|1 - |S0_chi|/|S0| - |S1_chi|/|S1||`.
pub fn gamma1(part: &GroupPartition) -> Result<f64> {
    part.require_both_groups()?;
    let r0 = part.s0_chi.len() as f64 / part.s0.len() as f64;
    let r1 = part.s1_chi.len() as f64 / part.s1.len() as f64;
    Ok((1.0 - r0 - r1).abs())
}

/// Neighborhood-balance term from per-node inter-degree ratios.
/// Degree-0 nodes are excluded from the group means.
pub fn gamma2(part: &GroupPartition) -> Result<f64> {
    part.require_both_groups()?;
    let group_mean = |nodes: &[usize]| -> Option<f64> {
        let mut sum = 0.0;
        let mut count = 0usize;
        for &v in nodes {
            let deg = part.d_chi[v] + part.d_omega[v];
            if deg > 0 {
                sum += part.d_chi[v] as f64 / deg as f64;
                count += 1;
            }
        }
        (count > 0).then(|| sum / count as f64)
    };
    let m0 = group_mean(&part.s0).ok_or_else(|| {
        Error::degenerate("every node of S0 is isolated; gamma2 is undefined")
    })?;
    let m1 = group_mean(&part.s1).ok_or_else(|| {
        Error::degenerate("every node of S1 is isolated; gamma2 is undefined")
    })?;
    Ok((1.0 - 2.0 * m0.min(m1)).abs())
}

/// `||c||_1 ( ||delta||_1 max(gamma1, gamma2) + 2 N Delta )`.
pub fn theorem1_bound(
    c_l1: f64,
    delta_l1: f64,
    gamma1: f64,
    gamma2: f64,
    num_nodes: usize,
    delta_max: f64,
) -> f64 {
    c_l1 * (delta_l1 * gamma1.max(gamma2) + 2.0 * num_nodes as f64 * delta_max)
}

/// Exact group gap of the aggregated representation,
/// `epsilon = mean_{S1}(Z) - mean_{S0}(Z)`, and its l1 norm.
pub fn epsilon_gap(z: &FeatureMatrix, part: &GroupPartition) -> Result<(Vec<f64>, f64)> {
    part.require_both_groups()?;
    if z.rows() != part.num_nodes() {
        return Err(Error::invalid(
            "representation rows must match the partitioned node count",
        ));
    }
    let m0 = mean_over(&part.s0, z);
    let m1 = mean_over(&part.s1, z);
    let eps: Vec<f64> = m1.iter().zip(&m0).map(|(a, b)| a - b).collect();
    let l1 = eps.iter().map(|e| e.abs()).sum();
    Ok((eps, l1))
}

/// Runs the full analysis: aggregate, take group statistics from the
/// representation entering the final aggregation, and assemble every bound
/// term from the aggregated output.
pub fn compute_bias_report(
    graph: &Graph,
    h: &FeatureMatrix,
    s: &SensitiveAttrs,
    cfg: &AggregationConfig,
) -> Result<BiasReport> {
    cfg.validate()?;
    let part = GroupPartition::compute(graph, s)?;
    part.require_both_groups()?;

    let pre = if cfg.num_layers > 1 {
        mean_aggregate(
            graph,
            h,
            &AggregationConfig {
                num_layers: cfg.num_layers - 1,
                include_self: cfg.include_self,
            },
        )?
    } else {
        h.clone()
    };
    let z = mean_aggregate(
        graph,
        &pre,
        &AggregationConfig {
            num_layers: 1,
            include_self: cfg.include_self,
        },
    )?;

    let stats = group_stats(&pre, &part)?;
    let (rho, rho_l1) = correlation_rho(&z, s)?;
    let sigma_z = column_std(&z);
    let c = c_vector(&sigma_z, part.s0.len(), part.s1.len(), z.rows());
    let c_l1: f64 = c.iter().sum();
    let g1 = gamma1(&part)?;
    let g2 = gamma2(&part)?;
    let delta_l1: f64 = stats.delta.iter().map(|d| d.abs()).sum();
    let bound = theorem1_bound(c_l1, delta_l1, g1, g2, graph.num_nodes(), stats.delta_max);
    let (epsilon, epsilon_l1) = epsilon_gap(&z, &part)?;

    Ok(BiasReport {
        mu0: stats.mu0,
        mu1: stats.mu1,
        delta: stats.delta,
        delta_bar: stats.delta_bar,
        delta0: stats.delta0,
        delta1: stats.delta1,
        delta_max: stats.delta_max,
        c,
        sigma_z,
        sigma_s: sigma_s_closed_form(part.s0.len(), part.s1.len()),
        gamma1: g1,
        gamma2: g2,
        rho,
        rho_l1,
        bound,
        epsilon,
        epsilon_l1,
    })
}
