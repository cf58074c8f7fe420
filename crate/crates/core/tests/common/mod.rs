//! Oracles shared by the integration suites. Everything here is written
//! from the definitions, without calling the library code it checks.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use fiid_perc::graph::Graph;

/// Binary entropy in bits, straight from the definition.
pub fn h(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        (-x * x.ln() - (1.0 - x) * (-x).ln_1p()) / std::f64::consts::LN_2
    }
}

fn sparse_margin(eps: f64, delta: f64, d: f64) -> Option<f64> {
    let kappa = (d - 2.0 - delta) * eps / (d * (1.0 - eps));
    (0.0..=1.0)
        .contains(&kappa)
        .then(|| eps * d + d * h(kappa) - (d - 2.0) * h(eps))
}

fn dense_margin(eps: f64, delta: f64, gamma: f64, d: f64) -> Option<f64> {
    let kappa = 1.0 + delta - delta / eps;
    (0.0..=1.0)
        .contains(&kappa)
        .then(|| d * ((1.0 - eps) * h(delta) + eps * h(kappa)) - gamma * h(eps))
}

/// First feasible point of a uniform grid over the sparse domain.
pub fn sparse_grid_threshold(d: usize, delta: f64, points: usize) -> f64 {
    let df = d as f64;
    let top = (df / (2.0 * df - 2.0 - delta)).min(1.0);
    (1..=points)
        .map(|i| top * i as f64 / (points as f64 + 1.0))
        .find(|&e| sparse_margin(e, delta, df).is_some_and(|m| m >= 0.0))
        .unwrap_or(top)
}

/// Last feasible point before the first infeasible one, on a uniform grid
/// over the dense domain `(delta / (1 + delta), 1)`.
pub fn dense_grid_threshold(delta: f64, gamma: f64, d: usize, points: usize) -> f64 {
    let lo = delta / (1.0 + delta);
    let step = (1.0 - lo) / (points as f64 + 1.0);
    let mut last = lo;
    for i in 1..=points {
        let e = lo + step * i as f64;
        match dense_margin(e, delta, gamma, d as f64) {
            Some(m) if m >= 0.0 => last = e,
            _ => return last,
        }
    }
    1.0
}

/// Maximum internal edge count over all `k`-subsets of a simple graph with
/// at most 32 vertices.
pub fn densest_subset_edges(g: &Graph, k: usize) -> usize {
    let n = g.n();
    assert!(n <= 32 && k >= 1 && k <= n);
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbours(v).iter().fold(0u32, |m, &u| m | (1 << u)))
        .collect();
    let mut best = 0;
    let mut s: u64 = (1u64 << k) - 1;
    let limit = 1u64 << n;
    while s < limit {
        let m = s as u32;
        let mut twice = 0;
        let mut bits = m;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            twice += (adj[v] & m).count_ones() as usize;
            bits &= bits - 1;
        }
        best = best.max(twice / 2);
        // Gosper's hack: next subset with the same popcount
        let c = s & s.wrapping_neg();
        let r = s + c;
        s = (((r ^ s) >> 2) / c) | r;
    }
    best
}

/// Components of the subgraph induced by `set`, by breadth-first search.
pub fn bfs_components(g: &Graph, set: &[bool]) -> BTreeSet<BTreeSet<usize>> {
    let n = g.n();
    let mut seen = vec![false; n];
    let mut out = BTreeSet::new();
    for s in 0..n {
        if !set[s] || seen[s] {
            continue;
        }
        let mut comp = BTreeSet::new();
        let mut q = VecDeque::from([s]);
        seen[s] = true;
        while let Some(v) = q.pop_front() {
            comp.insert(v);
            for &u in g.neighbours(v) {
                let u = u as usize;
                if set[u] && !seen[u] {
                    seen[u] = true;
                    q.push_back(u);
                }
            }
        }
        out.insert(comp);
    }
    out
}

/// Edges inside each BFS component, recounted from the edge list.
pub fn bfs_edge_counts(g: &Graph, set: &[bool]) -> Vec<(usize, usize)> {
    let comps = bfs_components(g, set);
    let mut out: Vec<(usize, usize)> = comps
        .iter()
        .map(|c| {
            let e = g
                .edges()
                .iter()
                .filter(|e| c.contains(&(e[0] as usize)) && c.contains(&(e[1] as usize)))
                .count();
            (c.len(), e)
        })
        .collect();
    out.sort_unstable();
    out
}

pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len().max(2) - 1) as f64;
    (m, v.sqrt())
}
