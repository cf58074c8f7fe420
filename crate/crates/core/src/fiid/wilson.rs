use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{is_connected, Graph};
use crate::rng::{stream, Domain};

const NONE: u32 = u32::MAX;

/// A spanning tree stored as parent pointers toward `root`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningTree {
    pub root: usize,
    /// Half-edge slot at `v` leading to its parent; `u32::MAX` at the root.
    parent_slot: Vec<u32>,
}

impl SpanningTree {
    pub fn n(&self) -> usize {
        self.parent_slot.len()
    }

    pub fn parent_slot(&self, v: usize) -> Option<usize> {
        let s = self.parent_slot[v];
        (s != NONE).then_some(s as usize)
    }

    pub fn parent(&self, g: &Graph, v: usize) -> Option<usize> {
        self.parent_slot(v).map(|s| g.slot_target(s))
    }

    /// Edge indices of `g` used by the tree, ascending.
    pub fn edge_ids(&self, g: &Graph) -> Vec<usize> {
        let mut ids: Vec<usize> = (0..self.n())
            .filter_map(|v| self.parent_slot(v).map(|s| g.slot_edge(s)))
            .collect();
        ids.sort_unstable();
        ids
    }

    pub fn depth(&self, g: &Graph, mut v: usize) -> usize {
        let mut d = 0;
        while let Some(p) = self.parent(g, v) {
            v = p;
            d += 1;
        }
        d
    }

    /// Half-edge slots along the tree path from `from` to `to`, in order.
    pub fn path_slots(&self, g: &Graph, from: usize, to: usize) -> Vec<usize> {
        let (mut a, mut b) = (from, to);
        let (mut da, mut db) = (self.depth(g, a), self.depth(g, b));
        let mut up = Vec::new();
        let mut down = Vec::new();
        while da > db {
            let s = self.parent_slot(a).expect("non-root");
            up.push(s);
            a = g.slot_target(s);
            da -= 1;
        }
        while db > da {
            let s = self.parent_slot(b).expect("non-root");
            down.push(g.slot_partner(s));
            b = g.slot_target(s);
            db -= 1;
        }
        while a != b {
            let sa = self.parent_slot(a).expect("non-root");
            let sb = self.parent_slot(b).expect("non-root");
            up.push(sa);
            down.push(g.slot_partner(sb));
            a = g.slot_target(sa);
            b = g.slot_target(sb);
        }
        up.extend(down.into_iter().rev());
        up
    }

    /// Checks that the parent pointers form a spanning tree of `g`.
    pub fn is_spanning_tree_of(&self, g: &Graph) -> bool {
        let n = g.n();
        if self.n() != n || self.parent_slot(self.root).is_some() {
            return false;
        }
        for v in 0..n {
            if v == self.root {
                continue;
            }
            match self.parent_slot(v) {
                Some(s) if g.slots(v).contains(&s) => {}
                _ => return false,
            }
        }
        // acyclic and connected: every vertex reaches the root within n steps
        (0..n).all(|v| {
            let mut x = v;
            for _ in 0..n {
                match self.parent(g, x) {
                    Some(p) => x = p,
                    None => return x == self.root,
                }
            }
            false
        })
    }
}

/// Uniform spanning tree by Wilson's algorithm: loop-erased random walks
/// started from each vertex in index order, run until they hit the tree.
pub fn wilson_ust(g: &Graph, root: usize, seed: u64) -> Result<SpanningTree> {
    let n = g.n();
    if root >= n {
        return Err(Error::invalid(format!("root {root} out of range")));
    }
    if !is_connected(g) {
        return Err(Error::Disconnected);
    }
    let mut rng = stream(seed, Domain::Wilson, 0);
    let mut in_tree = vec![false; n];
    let mut next = vec![NONE; n];
    in_tree[root] = true;
    for start in 0..n {
        let mut u = start;
        while !in_tree[u] {
            let range = g.slots(u);
            let s = rng.random_range(range);
            next[u] = s as u32;
            u = g.slot_target(s);
        }
        let mut u = start;
        while !in_tree[u] {
            in_tree[u] = true;
            u = g.slot_target(next[u] as usize);
        }
    }
    next[root] = NONE;
    Ok(SpanningTree {
        root,
        parent_slot: next,
    })
}

/// 1 iff more than `window` of the first `2 * window + 1` edges on the tree
/// path from `v` to `root` carry generator 1 (in either direction).
pub fn majority_label_statistic(
    g: &Graph,
    tree: &SpanningTree,
    v: usize,
    root: usize,
    window: usize,
) -> Result<bool> {
    if !g.is_labelled() {
        return Err(Error::invalid("majority statistic needs generator tags"));
    }
    let needed = 2 * window + 1;
    let path = tree.path_slots(g, v, root);
    if path.len() < needed {
        return Err(Error::PathTooShort {
            from: v,
            to: root,
            len: path.len(),
            needed,
        });
    }
    let hits = path[..needed]
        .iter()
        .filter(|&&s| g.slot_tag(s).is_some_and(|t| t.generator == 1))
        .count();
    Ok(hits > window)
}
