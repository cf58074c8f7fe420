use rand::seq::SliceRandom;

use super::{Graph, Tag};
use crate::error::{Error, Result};
use crate::rng::{stream, Domain};

/// Uniform random pairing of `n * d` half-edges.
///
/// Self-loops and parallel edges are kept. The edge list is the shuffled stub
/// array read in consecutive pairs, so the half-edge order at each vertex is
/// uniformly random given the multigraph.
pub fn generate_configuration_model(n: usize, d: usize, seed: u64) -> Result<Graph> {
    pairing(n, d, seed, 0)
}

/// Configuration model conditioned on a simple outcome, by rejection.
///
/// The number of attempts is bounded by `max_attempts`; for fixed `d` the
/// acceptance probability tends to `exp(-(d^2 - 1) / 4)`.
pub fn generate_simple_configuration_model(
    n: usize,
    d: usize,
    seed: u64,
    max_attempts: usize,
) -> Result<Graph> {
    for attempt in 0..max_attempts {
        let g = pairing(n, d, seed, attempt as u64)?;
        if g.is_simple() {
            return Ok(g);
        }
    }
    Err(Error::invalid(format!(
        "no simple pairing found in {max_attempts} attempts"
    )))
}

fn pairing(n: usize, d: usize, seed: u64, attempt: u64) -> Result<Graph> {
    if d == 0 {
        return Err(Error::invalid("degree must be at least 1"));
    }
    if n < 2 {
        return Err(Error::invalid("need at least 2 vertices"));
    }
    if (n * d) % 2 == 1 {
        return Err(Error::invalid(format!("n*d = {} is odd", n * d)));
    }
    let mut stubs: Vec<u32> = (0..n as u32)
        .flat_map(|v| std::iter::repeat_n(v, d))
        .collect();
    let mut rng = stream(seed, Domain::Graph, attempt);
    stubs.shuffle(&mut rng);
    let edges = stubs.chunks_exact(2).map(|p| [p[0], p[1]]).collect();
    Graph::from_edges(n, edges)
}

/// `k` independent uniform permutations; vertex `v` is joined to `pi_i(v)` by
/// an edge tagged `g_i` at `v` and `g_i^-1` at `pi_i(v)`. The result is
/// `2k`-regular.
pub fn generate_permutation_model(n: usize, k: usize, seed: u64) -> Result<Graph> {
    if n == 0 || k == 0 {
        return Err(Error::invalid("need n >= 1 and k >= 1"));
    }
    if k > u16::MAX as usize {
        return Err(Error::invalid("too many generators"));
    }
    let mut edges = Vec::with_capacity(n * k);
    let mut tags = Vec::with_capacity(n * k);
    for i in 0..k {
        let mut perm: Vec<u32> = (0..n as u32).collect();
        perm.shuffle(&mut stream(seed, Domain::Graph, i as u64));
        for (v, &w) in perm.iter().enumerate() {
            edges.push([v as u32, w]);
            tags.push(Tag::new(i as u16 + 1));
        }
    }
    Graph::from_tagged_edges(n, edges, tags)
}

pub fn cycle_graph(n: usize) -> Graph {
    let edges = (0..n as u32).map(|v| [v, (v + 1) % n as u32]).collect();
    Graph::from_edges(n, edges).expect("valid cycle")
}

pub fn complete_graph(n: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            edges.push([u, v]);
        }
    }
    Graph::from_edges(n, edges).expect("valid complete graph")
}

/// 3-regular, 10 vertices, girth 5.
pub fn petersen_graph() -> Graph {
    let mut edges = Vec::new();
    for i in 0..5u32 {
        edges.push([i, (i + 1) % 5]);
        edges.push([i, i + 5]);
        edges.push([5 + i, 5 + (i + 2) % 5]);
    }
    Graph::from_edges(10, edges).expect("valid Petersen graph")
}

/// 3-regular, 14 vertices, girth 6 (the incidence graph of the Fano plane).
pub fn heawood_graph() -> Graph {
    let mut edges: Vec<[u32; 2]> = (0..14u32).map(|i| [i, (i + 1) % 14]).collect();
    for i in (0..14u32).step_by(2) {
        edges.push([i, (i + 5) % 14]);
    }
    Graph::from_edges(14, edges).expect("valid Heawood graph")
}

/// `K_{a,b}`: vertices `0..a` on one side, `a..a+b` on the other.
pub fn complete_bipartite_graph(a: usize, b: usize) -> Graph {
    let edges = (0..a as u32)
        .flat_map(|u| (a as u32..(a + b) as u32).map(move |v| [u, v]))
        .collect();
    Graph::from_edges(a + b, edges).expect("valid complete bipartite graph")
}

/// The `k`-dimensional hypercube `Q_k` on `2^k` vertices.
pub fn hypercube_graph(k: usize) -> Graph {
    let n = 1u32 << k;
    let edges = (0..n)
        .flat_map(|v| (0..k).map(move |i| [v, v ^ (1 << i)]))
        .filter(|[u, v]| u < v)
        .collect();
    Graph::from_edges(n as usize, edges).expect("valid hypercube")
}

/// The ball of radius `depth` around a vertex of the `d`-regular tree, root 0,
/// vertices numbered in BFS order.
pub fn regular_tree_ball(d: usize, depth: usize) -> Graph {
    let mut edges = Vec::new();
    let mut frontier = vec![0u32];
    let mut next_id = 1u32;
    for level in 0..depth {
        let children = if level == 0 { d } else { d - 1 };
        let mut next = Vec::new();
        for &p in &frontier {
            for _ in 0..children {
                edges.push([p, next_id]);
                next.push(next_id);
                next_id += 1;
            }
        }
        frontier = next;
    }
    Graph::from_edges(next_id as usize, edges).expect("valid tree")
}
