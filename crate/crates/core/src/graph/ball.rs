use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, VecDeque};

use rayon::prelude::*;

use super::Graph;

/// The radius-`r` neighbourhood of a vertex as a rooted, optionally labelled
/// graph.
///
/// Local vertex 0 is the root; local indices follow BFS order. `adjacency`
/// holds the induced subgraph (with multiplicities). `canonical_key` is equal
/// for two balls exactly when a root-preserving isomorphism maps one onto the
/// other, distances and labels included.
#[derive(Clone, Debug, PartialEq)]
pub struct RootedBall {
    pub radius: usize,
    /// Global vertex ids.
    pub vertices: Vec<usize>,
    pub distance: Vec<usize>,
    pub adjacency: Vec<Vec<usize>>,
    pub labels: Option<Vec<f64>>,
    pub canonical_key: Vec<u64>,
}

impl RootedBall {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_tree(&self) -> bool {
        self.edge_count() + 1 == self.len()
    }

    pub fn label(&self, local: usize) -> Option<f64> {
        self.labels.as_ref().map(|l| l[local])
    }

    /// Assembles a ball from local data and computes its key. `distance` is
    /// recomputed from `adjacency`, so callers only need the root at index 0.
    pub fn from_parts(
        radius: usize,
        vertices: Vec<usize>,
        adjacency: Vec<Vec<usize>>,
        labels: Option<Vec<f64>>,
    ) -> Self {
        let distance = bfs_distances(&adjacency);
        let canonical_key = canonical_key(&distance, &adjacency, labels.as_deref());
        RootedBall {
            radius,
            vertices,
            distance,
            adjacency,
            labels,
            canonical_key,
        }
    }

    /// The same ball with local indices renamed by `perm` (local `i` becomes
    /// `perm[i]`); `perm[0]` must be 0.
    pub fn relabelled(&self, perm: &[usize]) -> Self {
        assert_eq!(perm[0], 0, "root must stay at index 0");
        let k = self.len();
        let mut vertices = vec![0; k];
        let mut adjacency = vec![Vec::new(); k];
        let mut labels = self.labels.as_ref().map(|_| vec![0.0; k]);
        for i in 0..k {
            vertices[perm[i]] = self.vertices[i];
            adjacency[perm[i]] = self.adjacency[i].iter().map(|&j| perm[j]).collect();
            if let (Some(out), Some(src)) = (labels.as_mut(), self.labels.as_ref()) {
                out[perm[i]] = src[i];
            }
        }
        Self::from_parts(self.radius, vertices, adjacency, labels)
    }
}

/// BFS ball of radius `r` around `v`, with the induced edges.
///
/// Building the canonical key of an unlabelled ball that contains cycles
/// needs a search over tied vertices, which is exponential in the worst
/// case. Use [`ball_is_tree`] when only the shape matters.
pub fn ball(g: &Graph, labels: Option<&[f64]>, v: usize, r: usize) -> RootedBall {
    let mut local: BTreeMap<usize, usize> = BTreeMap::new();
    let mut vertices = vec![v];
    let mut distance = vec![0usize];
    local.insert(v, 0);
    let mut queue = VecDeque::from([v]);
    while let Some(u) = queue.pop_front() {
        let du = distance[local[&u]];
        if du == r {
            continue;
        }
        for &w in g.neighbours(u) {
            let w = w as usize;
            if let Entry::Vacant(e) = local.entry(w) {
                e.insert(vertices.len());
                vertices.push(w);
                distance.push(du + 1);
                queue.push_back(w);
            }
        }
    }
    let adjacency = vertices
        .iter()
        .map(|&u| {
            g.neighbours(u)
                .iter()
                .filter_map(|&w| local.get(&(w as usize)).copied())
                .collect()
        })
        .collect();
    let labels = labels.map(|l| vertices.iter().map(|&u| l[u]).collect());
    RootedBall::from_parts(r, vertices, adjacency, labels)
}

/// Whether the radius-`r` ball around `v` is a tree, i.e. has one edge
/// fewer than it has vertices. Loops and parallel edges count.
pub fn ball_is_tree(g: &Graph, v: usize, r: usize) -> bool {
    let mut dist: BTreeMap<usize, usize> = BTreeMap::from([(v, 0)]);
    let mut queue = VecDeque::from([v]);
    let mut half_edges = 0usize;
    while let Some(u) = queue.pop_front() {
        let du = dist[&u];
        for &w in g.neighbours(u) {
            let w = w as usize;
            match dist.get(&w) {
                Some(_) => half_edges += 1,
                None if du < r => {
                    dist.insert(w, du + 1);
                    queue.push_back(w);
                    half_edges += 1;
                }
                None => {}
            }
        }
    }
    // every internal edge was seen from both ends
    half_edges / 2 + 1 == dist.len()
}

/// [`ball_is_tree`] for every vertex.
pub fn tree_like_vertices(g: &Graph, r: usize) -> Vec<bool> {
    (0..g.n())
        .into_par_iter()
        .map(|v| ball_is_tree(g, v, r))
        .collect()
}

fn bfs_distances(adjacency: &[Vec<usize>]) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adjacency.len()];
    if adjacency.is_empty() {
        return dist;
    }
    dist[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for &w in &adjacency[u] {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

const OPEN: u64 = u64::MAX;
const CLOSE: u64 = u64::MAX - 1;
const NO_LABEL: u64 = u64::MAX - 2;
const TREE_FORM: u64 = 1;
const GRAPH_FORM: u64 = 2;

fn label_token(labels: Option<&[f64]>, i: usize) -> u64 {
    labels.map_or(NO_LABEL, |l| l[i].to_bits())
}

fn canonical_key(distance: &[usize], adjacency: &[Vec<usize>], labels: Option<&[f64]>) -> Vec<u64> {
    let k = adjacency.len();
    let edges2: usize = adjacency.iter().map(Vec::len).sum();
    if edges2 / 2 + 1 == k {
        let mut key = vec![TREE_FORM];
        key.extend(tree_code(0, usize::MAX, adjacency, labels));
        key
    } else {
        let mut key = vec![GRAPH_FORM, k as u64];
        key.extend(graph_code(distance, adjacency, labels));
        key
    }
}

/// AHU encoding: a node's code is its label followed by its children's codes
/// in sorted order.
fn tree_code(
    v: usize,
    parent: usize,
    adjacency: &[Vec<usize>],
    labels: Option<&[f64]>,
) -> Vec<u64> {
    let mut children: Vec<Vec<u64>> = adjacency[v]
        .iter()
        .filter(|&&w| w != parent)
        .map(|&w| tree_code(w, v, adjacency, labels))
        .collect();
    children.sort();
    let mut code = vec![OPEN, label_token(labels, v)];
    for c in children {
        code.extend(c);
    }
    code.push(CLOSE);
    code
}

/// Canonical form for balls with cycles: colour refinement seeded with
/// distance and label, then individualisation of tied vertices, keeping the
/// lexicographically smallest encoding.
fn graph_code(distance: &[usize], adjacency: &[Vec<usize>], labels: Option<&[f64]>) -> Vec<u64> {
    let initial: Vec<(usize, u64)> = (0..adjacency.len())
        .map(|i| (distance[i], label_token(labels, i)))
        .collect();
    let colours = rank(&initial);
    search(refine(colours, adjacency), adjacency, labels)
}

fn rank<T: Ord + Clone>(sig: &[T]) -> Vec<usize> {
    let mut sorted: Vec<T> = sig.to_vec();
    sorted.sort();
    sorted.dedup();
    sig.iter()
        .map(|s| sorted.binary_search(s).expect("present"))
        .collect()
}

fn refine(mut colours: Vec<usize>, adjacency: &[Vec<usize>]) -> Vec<usize> {
    loop {
        let sig: Vec<(usize, Vec<usize>)> = (0..colours.len())
            .map(|i| {
                let mut nb: Vec<usize> = adjacency[i].iter().map(|&j| colours[j]).collect();
                nb.sort_unstable();
                (colours[i], nb)
            })
            .collect();
        let next = rank(&sig);
        let before = colours.iter().max().map_or(0, |m| m + 1);
        let after = next.iter().max().map_or(0, |m| m + 1);
        colours = next;
        if after == before {
            return colours;
        }
    }
}

fn search(colours: Vec<usize>, adjacency: &[Vec<usize>], labels: Option<&[f64]>) -> Vec<u64> {
    let k = colours.len();
    let mut counts = vec![0usize; k];
    for &c in &colours {
        counts[c] += 1;
    }
    match (0..k).find(|&c| counts[c] > 1) {
        None => encode(&colours, adjacency, labels),
        Some(cell) => {
            let mut best: Option<Vec<u64>> = None;
            for v in (0..k).filter(|&v| colours[v] == cell) {
                // split v off below the rest of its cell
                let mut split: Vec<usize> = colours.iter().map(|&c| 2 * c + 1).collect();
                split[v] = 2 * cell;
                let code = search(refine(rank(&split), adjacency), adjacency, labels);
                if best.as_ref().is_none_or(|b| code < *b) {
                    best = Some(code);
                }
            }
            best.expect("non-empty cell")
        }
    }
}

fn encode(colours: &[usize], adjacency: &[Vec<usize>], labels: Option<&[f64]>) -> Vec<u64> {
    let mut order: Vec<usize> = (0..colours.len()).collect();
    order.sort_by_key(|&v| colours[v]);
    let mut code = Vec::new();
    for &v in &order {
        code.push(OPEN);
        code.push(label_token(labels, v));
        let mut nb: Vec<u64> = adjacency[v].iter().map(|&w| colours[w] as u64).collect();
        nb.sort_unstable();
        code.extend(nb);
        code.push(CLOSE);
    }
    code
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, cycle_graph, heawood_graph, regular_tree_ball};

    #[test]
    fn radius_zero_key_depends_on_label_only() {
        let g = cycle_graph(5);
        let a = ball(&g, Some(&[0.1, 0.2, 0.3, 0.4, 0.5]), 2, 0);
        assert_eq!(a.len(), 1);
        let b = ball(&complete_graph(4), Some(&[0.3, 0.0, 0.0, 0.0]), 0, 0);
        assert_eq!(a.canonical_key, b.canonical_key);
        let c = ball(&complete_graph(4), Some(&[0.31, 0.0, 0.0, 0.0]), 0, 0);
        assert_ne!(a.canonical_key, c.canonical_key);
    }

    #[test]
    fn structural_keys_of_vertex_transitive_graphs_agree() {
        let g = heawood_graph();
        let keys: Vec<_> = (0..14)
            .map(|v| ball(&g, None, v, 3).canonical_key)
            .collect();
        assert!(keys.iter().all(|k| *k == keys[0]));
        let c = cycle_graph(7);
        assert_eq!(
            ball(&c, None, 0, 3).canonical_key,
            ball(&c, None, 4, 3).canonical_key
        );
        assert_ne!(
            ball(&c, None, 0, 3).canonical_key,
            ball(&cycle_graph(6), None, 0, 3).canonical_key
        );
    }

    #[test]
    fn relabelling_preserves_key() {
        let g = complete_graph(5);
        let labels = [0.9, 0.1, 0.5, 0.3, 0.7];
        let b = ball(&g, Some(&labels), 0, 1);
        assert!(!b.is_tree());
        let r = b.relabelled(&[0, 3, 1, 4, 2]);
        assert_eq!(b.canonical_key, r.canonical_key);
        let t = ball(&regular_tree_ball(3, 3), Some(&[0.5; 22]), 0, 2);
        assert!(t.is_tree());
        assert_eq!(
            t.canonical_key,
            t.relabelled(&[0, 2, 1, 3, 4, 5, 6, 7, 8, 9]).canonical_key
        );
    }

    #[test]
    fn tree_ball_size_on_large_girth_graph() {
        // girth 6 > 2r + 1 for r = 2: 1 + 3 * (2^2 - 1) / 1 = 10 vertices
        let b = ball(&heawood_graph(), None, 0, 2);
        assert_eq!(b.len(), 10);
        assert!(b.is_tree());
        assert!(b.distance.iter().all(|&d| d <= 2));
    }

    #[test]
    fn cheap_tree_check_agrees_with_ball() {
        for g in [
            heawood_graph(),
            complete_graph(5),
            cycle_graph(7),
            regular_tree_ball(3, 4),
        ] {
            for v in 0..g.n() {
                for r in 0..4 {
                    assert_eq!(
                        ball_is_tree(&g, v, r),
                        ball(&g, None, v, r).is_tree(),
                        "{v} {r}"
                    );
                }
            }
        }
        let loops = Graph::from_edges(2, vec![[0, 0], [0, 1], [1, 1]]).unwrap();
        assert!(!ball_is_tree(&loops, 0, 0));
        assert_eq!(tree_like_vertices(&cycle_graph(6), 2), vec![true; 6]);
        assert_eq!(tree_like_vertices(&cycle_graph(5), 2), vec![false; 5]);
    }
}
