use std::collections::BTreeMap;

use serde::Serialize;

use crate::fiid::{Configuration, Symbol};
use crate::graph::{connected_components, Graph, VertexSet};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityReport {
    pub symbol: Symbol,
    pub count: usize,
    pub density: f64,
    /// Open neighbours per open vertex, counted over half-edges; `None` when
    /// the symbol is absent.
    pub conditional_avg_degree: Option<f64>,
    /// Open fraction among the half-edges of vertices without the symbol;
    /// `None` when every vertex carries it.
    pub kappa_hat: Option<f64>,
    /// Standard errors under a dependence range of `dependence_radius`
    /// (the factor's radius). See [`design_effect`].
    pub density_stderr: f64,
    pub conditional_avg_degree_stderr: Option<f64>,
}

/// Variance inflation for averages of a radius-`r` factor on a graph of
/// maximum degree `d`: the outputs at two vertices are independent beyond
/// distance `2r`, so each vertex is correlated with at most `|B_{2r}|`
/// others. Using that count as the design effect is conservative.
pub fn design_effect(d: usize, r: usize) -> f64 {
    let mut ball = 1.0;
    let mut shell = 1.0;
    for i in 0..2 * r {
        shell *= if i == 0 {
            d as f64
        } else {
            (d as f64 - 1.0).max(1.0)
        };
        ball += shell;
    }
    ball
}

/// Exact density and degree counts of `symbol` over the finite graph.
pub fn density_report(g: &Graph, c: &Configuration, symbol: Symbol) -> DensityReport {
    let n = g.n();
    let s = &c.symbols;
    let mut count = 0usize;
    let mut open_half_edges_from_open = 0u64;
    let mut open_half_edges_from_closed = 0u64;
    let mut closed_half_edges = 0u64;
    let mut sum_sq = 0u64;
    for v in 0..n {
        let k = g
            .neighbours(v)
            .iter()
            .filter(|&&u| s[u as usize] == symbol)
            .count() as u64;
        if s[v] == symbol {
            count += 1;
            open_half_edges_from_open += k;
            sum_sq += k * k;
        } else {
            open_half_edges_from_closed += k;
            closed_half_edges += g.degree(v) as u64;
        }
    }
    let density = if n == 0 { 0.0 } else { count as f64 / n as f64 };
    let deff = design_effect(g.max_degree(), c.factor.radius());
    let density_stderr = (density * (1.0 - density) / n.max(1) as f64 * deff).sqrt();
    let (conditional_avg_degree, conditional_avg_degree_stderr) = if count == 0 {
        (None, None)
    } else {
        let m = count as f64;
        let a = open_half_edges_from_open as f64 / m;
        let var = (sum_sq as f64 / m - a * a).max(0.0);
        // an open-open edge enters two vertex counts, hence the extra factor 2
        let se = (2.0 * var / m * deff).sqrt();
        (Some(a), Some(se))
    };
    let kappa_hat = (closed_half_edges > 0)
        .then(|| open_half_edges_from_closed as f64 / closed_half_edges as f64);
    DensityReport {
        symbol,
        count,
        density,
        conditional_avg_degree,
        kappa_hat,
        density_stderr,
        conditional_avg_degree_stderr,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterStats {
    pub cluster_id: usize,
    pub size: usize,
    pub internal_edges: usize,
    pub avg_degree: f64,
}

impl ClusterStats {
    pub fn is_tree(&self) -> bool {
        self.internal_edges + 1 == self.size
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterSummary {
    pub clusters: Vec<ClusterStats>,
    /// Cluster size to number of clusters of that size.
    pub size_histogram: BTreeMap<usize, usize>,
    pub largest: usize,
    pub tree_clusters: usize,
}

/// Components of the subgraph induced by `symbol`, with exact edge counts.
pub fn cluster_stats(g: &Graph, c: &Configuration, symbol: Symbol) -> ClusterSummary {
    cluster_stats_of(g, &c.support(symbol))
}

pub fn cluster_stats_of(g: &Graph, set: &VertexSet) -> ClusterSummary {
    let cl = connected_components(g, set);
    let mut internal = vec![0usize; cl.len()];
    for &[u, v] in g.edges() {
        if let (Some(a), Some(_)) = (cl.membership[u as usize], cl.membership[v as usize]) {
            internal[a as usize] += 1;
        }
    }
    let clusters: Vec<ClusterStats> = cl
        .members
        .iter()
        .zip(internal)
        .enumerate()
        .map(|(cluster_id, (m, e))| ClusterStats {
            cluster_id,
            size: m.len(),
            internal_edges: e,
            avg_degree: 2.0 * e as f64 / m.len() as f64,
        })
        .collect();
    let mut size_histogram = BTreeMap::new();
    for c in &clusters {
        *size_histogram.entry(c.size).or_insert(0) += 1;
    }
    ClusterSummary {
        largest: cl.largest(),
        tree_clusters: clusters.iter().filter(|c| c.is_tree()).count(),
        clusters,
        size_histogram,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixedEdges {
    pub internal_edges: usize,
    pub mixed: usize,
    /// `None` when no edge joins two vertices with the symbol.
    pub fraction: Option<f64>,
    /// Binomial standard error `sqrt(f (1 - f) / m)`. Exact when edge
    /// indicators are pairwise uncorrelated (e.g. a fair independent colouring),
    /// optimistic otherwise.
    pub stderr: Option<f64>,
}

/// Fraction of edges inside `symbol`'s clusters whose endpoints get
/// different colours.
pub fn mixed_edge_density(
    g: &Graph,
    c: &Configuration,
    symbol: Symbol,
    colouring: &Configuration,
) -> MixedEdges {
    let (mut internal_edges, mut mixed) = (0, 0);
    for &[u, v] in g.edges() {
        let (u, v) = (u as usize, v as usize);
        if c.symbols[u] == symbol && c.symbols[v] == symbol {
            internal_edges += 1;
            if colouring.symbols[u] != colouring.symbols[v] {
                mixed += 1;
            }
        }
    }
    let fraction = (internal_edges > 0).then(|| mixed as f64 / internal_edges as f64);
    MixedEdges {
        internal_edges,
        mixed,
        fraction,
        stderr: fraction.map(|f| (f * (1.0 - f) / internal_edges as f64).sqrt()),
    }
}
