use std::collections::VecDeque;
use std::fmt;

use super::{DisjointSets, Graph, VertexSet};

/// Length of the shortest cycle. Forests have no cycle at all.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Girth {
    Finite(usize),
    Infinite,
}

impl Girth {
    pub fn finite(self) -> Option<usize> {
        match self {
            Girth::Finite(g) => Some(g),
            Girth::Infinite => None,
        }
    }
}

impl fmt::Display for Girth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Girth::Finite(g) => write!(f, "{g}"),
            Girth::Infinite => f.write_str("inf"),
        }
    }
}

/// Shortest cycle, counting a self-loop as 1 and a parallel pair as 2.
pub fn girth(g: &Graph) -> Girth {
    short_cycle_girth(g, usize::MAX)
}

/// Like [`girth`], but only looks for cycles of length at most `limit`;
/// returns `Infinite` when none is that short.
pub fn short_cycle_girth(g: &Graph, limit: usize) -> Girth {
    if limit >= 1 && g.self_loop_count() > 0 {
        return Girth::Finite(1);
    }
    if limit >= 2 && g.parallel_excess() > 0 {
        return Girth::Finite(2);
    }
    if limit < 3 {
        return Girth::Infinite;
    }
    // Simple graph from here on. A BFS from every vertex finds the shortest
    // cycle through it within one unit; the global minimum is exact.
    let n = g.n();
    let mut best = usize::MAX;
    let mut dist = vec![u32::MAX; n];
    let mut parent_slot = vec![usize::MAX; n];
    let mut touched = Vec::new();
    let mut queue = VecDeque::new();
    for root in 0..n {
        for &v in &touched {
            dist[v] = u32::MAX;
        }
        touched.clear();
        dist[root] = 0;
        touched.push(root);
        queue.clear();
        queue.push_back(root);
        'bfs: while let Some(u) = queue.pop_front() {
            let du = dist[u] as usize;
            if 2 * du + 1 >= best.min(limit.saturating_add(1)) {
                break;
            }
            for s in g.slots(u) {
                if g.slot_partner(s) == parent_slot[u] && u != root {
                    continue;
                }
                let w = g.slot_target(s);
                if dist[w] == u32::MAX {
                    dist[w] = du as u32 + 1;
                    parent_slot[w] = s;
                    touched.push(w);
                    queue.push_back(w);
                } else {
                    let len = du + dist[w] as usize + 1;
                    if len < best {
                        best = len;
                        if best == 3 {
                            break 'bfs;
                        }
                    }
                }
            }
        }
        if best == 3 {
            break;
        }
    }
    if best != usize::MAX && best <= limit {
        Girth::Finite(best)
    } else {
        Girth::Infinite
    }
}

/// Partition of a vertex set into the components of its induced subgraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clusters {
    /// Cluster index per vertex, `None` outside the set.
    pub membership: Vec<Option<u32>>,
    /// Members of each cluster, ascending; clusters ordered by smallest member.
    pub members: Vec<Vec<u32>>,
}

impl Clusters {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn largest(&self) -> usize {
        self.members.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Union-find decomposition of the subgraph induced by `set`.
pub fn connected_components(g: &Graph, set: &VertexSet) -> Clusters {
    let n = g.n();
    let mut dsu = DisjointSets::new(n);
    for &[u, v] in g.edges() {
        if set.contains(u as usize) && set.contains(v as usize) {
            dsu.union(u as usize, v as usize);
        }
    }
    let mut root_index = vec![u32::MAX; n];
    let mut membership = vec![None; n];
    let mut members: Vec<Vec<u32>> = Vec::new();
    for v in set.iter() {
        let r = dsu.find(v);
        if root_index[r] == u32::MAX {
            root_index[r] = members.len() as u32;
            members.push(Vec::new());
        }
        let c = root_index[r];
        membership[v] = Some(c);
        members[c as usize].push(v as u32);
    }
    Clusters {
        membership,
        members,
    }
}

/// Size of the largest component induced by the indicator `open`.
pub fn largest_component_size(g: &Graph, open: &[bool]) -> usize {
    let mut dsu = DisjointSets::new(g.n());
    let mut best = usize::from(open.iter().any(|&b| b));
    for &[u, v] in g.edges() {
        let (u, v) = (u as usize, v as usize);
        if open[u] && open[v] && dsu.union(u, v) {
            best = best.max(dsu.set_size(u));
        }
    }
    best
}

pub fn is_connected(g: &Graph) -> bool {
    g.n() <= 1 || connected_components(g, &VertexSet::full(g.n())).len() == 1
}
