use std::collections::VecDeque;

use rand::Rng;
use serde::Serialize;

use super::density::{cluster_stats_of, ClusterSummary};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::rng::{stream, Domain};

/// Simulated-annealing schedule. The temperature decays geometrically from
/// `t_start` to `t_end` over `iterations` proposals; each restart starts
/// from a fresh breadth-first ball and has its own random stream.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnnealSchedule {
    pub iterations: usize,
    pub restarts: usize,
    pub t_start: f64,
    pub t_end: f64,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        AnnealSchedule {
            iterations: 50_000,
            restarts: 4,
            t_start: 1.0,
            t_end: 0.02,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdversarialResult {
    pub vertices: Vec<usize>,
    pub internal_edges: usize,
    pub avg_degree: f64,
    pub density: f64,
    pub clusters: ClusterSummary,
    /// Best internal edge count of each restart.
    pub restart_best: Vec<usize>,
}

/// Searches for `floor(epsilon n)` vertices spanning as many edges as
/// possible, by single-vertex swaps with Metropolis acceptance. Returns the
/// best set seen.
pub fn adversarial_subgraph_search(
    g: &Graph,
    epsilon: f64,
    schedule: &AnnealSchedule,
    seed: u64,
) -> Result<AdversarialResult> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::invalid(format!(
            "density budget {epsilon} must lie in (0, 1]"
        )));
    }
    let n = g.n();
    let k = (epsilon * n as f64).floor() as usize;
    if k == 0 {
        return Err(Error::invalid(format!(
            "budget {epsilon} selects no vertex of {n}"
        )));
    }
    if !(schedule.t_start > 0.0 && schedule.t_end > 0.0) {
        return Err(Error::invalid("temperatures must be positive"));
    }
    let mut best: Option<(usize, Vec<usize>)> = None;
    let mut restart_best = Vec::new();
    for restart in 0..schedule.restarts.max(1) {
        let mut rng = stream(seed, Domain::Search, restart as u64);
        let (e, set) = anneal(g, k, schedule, &mut rng);
        restart_best.push(e);
        if best.as_ref().is_none_or(|(b, _)| e > *b) {
            best = Some((e, set));
        }
    }
    let (internal_edges, mut vertices) = best.expect("at least one restart");
    vertices.sort_unstable();
    let set = VertexSet::from_vertices(n, vertices.iter().copied());
    debug_assert_eq!(g.internal_edges(&set), internal_edges);
    Ok(AdversarialResult {
        internal_edges,
        avg_degree: 2.0 * internal_edges as f64 / k as f64,
        density: k as f64 / n as f64,
        clusters: cluster_stats_of(g, &set),
        vertices,
        restart_best,
    })
}

/// Indexed membership so that uniform picks from `S` and its complement are
/// O(1).
struct Split {
    pos: Vec<usize>,
    order: Vec<usize>,
    k: usize,
}

impl Split {
    fn new(n: usize, chosen: &[usize]) -> Self {
        let mut order: Vec<usize> = chosen.to_vec();
        let mut inside = vec![false; n];
        for &v in chosen {
            inside[v] = true;
        }
        order.extend((0..n).filter(|&v| !inside[v]));
        let mut pos = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        Split {
            pos,
            order,
            k: chosen.len(),
        }
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v] < self.k
    }

    fn swap(&mut self, out: usize, into: usize) {
        let (a, b) = (self.pos[out], self.pos[into]);
        self.order.swap(a, b);
        self.pos[out] = b;
        self.pos[into] = a;
    }
}

fn bfs_seed_set(g: &Graph, k: usize, rng: &mut impl Rng) -> Vec<usize> {
    let n = g.n();
    let mut seen = vec![false; n];
    let mut out = Vec::with_capacity(k);
    while out.len() < k {
        let root = rng.random_range(0..n);
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            out.push(v);
            if out.len() == k {
                break;
            }
            for &u in g.neighbours(v) {
                let u = u as usize;
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    out
}

fn anneal(
    g: &Graph,
    k: usize,
    schedule: &AnnealSchedule,
    rng: &mut impl Rng,
) -> (usize, Vec<usize>) {
    let n = g.n();
    let start = bfs_seed_set(g, k, rng);
    let mut split = Split::new(n, &start);
    let set = VertexSet::from_vertices(n, start.iter().copied());
    let mut edges = g.internal_edges(&set);
    if k == n {
        return (edges, start);
    }
    let loops: Vec<usize> = (0..n)
        .map(|v| g.neighbours(v).iter().filter(|&&u| u as usize == v).count() / 2)
        .collect();
    // half-edges from each vertex into S
    let mut into_s: Vec<usize> = (0..n).map(|v| g.degree_into(v, &set)).collect();
    let mut best = edges;
    let mut best_set = start;
    let ratio = (schedule.t_end / schedule.t_start).ln();
    let iters = schedule.iterations.max(1);
    for it in 0..schedule.iterations {
        let temp = schedule.t_start * (ratio * it as f64 / iters as f64).exp();
        let out = split.order[rng.random_range(0..k)];
        // half the proposals come from the frontier of S
        let into = {
            let anchor = split.order[rng.random_range(0..k)];
            let nb = g.neighbours(anchor);
            let cand = if rng.random_bool(0.5) && !nb.is_empty() {
                nb[rng.random_range(0..nb.len())] as usize
            } else {
                usize::MAX
            };
            if cand != usize::MAX && !split.contains(cand) {
                cand
            } else {
                split.order[rng.random_range(k..n)]
            }
        };
        let shared = g
            .neighbours(out)
            .iter()
            .filter(|&&u| u as usize == into)
            .count();
        let loss = into_s[out] - loops[out];
        let gain = into_s[into] - shared + loops[into];
        let delta = gain as f64 - loss as f64;
        if delta >= 0.0 || rng.random::<f64>() < (delta / temp).exp() {
            for &u in g.neighbours(out) {
                into_s[u as usize] -= 1;
            }
            for &u in g.neighbours(into) {
                into_s[u as usize] += 1;
            }
            split.swap(out, into);
            edges = edges + gain - loss;
            if edges > best {
                best = edges;
                best_set = split.order[..k].to_vec();
            }
        }
    }
    (best, best_set)
}
