//! Finite regular multigraphs with a half-edge structure.
//!
//! A graph is stored as its edge list. Every edge `(u, v)` contributes one
//! half-edge at `u` and one at `v`; the half-edges of a vertex are ordered by
//! the position of their edge in the list. That order is the neighbour order
//! used everywhere an ordered star or a "uniform half-edge" is needed, and it
//! is exactly what the edge-list text format preserves.

mod ball;
mod dsu;
mod expansion;
mod generate;
mod io;
mod spectral;
mod structure;

use std::fmt;

pub use ball::{ball, ball_is_tree, tree_like_vertices, RootedBall};
pub use dsu::DisjointSets;
pub use expansion::{
    boundary, edge_cheeger_exhaustive, vertex_expansion_exhaustive, vertex_expansion_unrestricted,
    vertex_expansion_within, Boundary, Expansion, DEFAULT_ENUMERATION_CAP,
};
pub use generate::{
    complete_bipartite_graph, complete_graph, cycle_graph, generate_configuration_model,
    generate_permutation_model, generate_simple_configuration_model, heawood_graph,
    hypercube_graph, petersen_graph, regular_tree_ball,
};
pub use io::{read_edge_list, write_edge_list};
pub use spectral::{spectral_gap, SpectralGap};
pub use structure::{
    connected_components, girth, is_connected, largest_component_size, short_cycle_girth, Clusters,
    Girth,
};

use crate::error::{Error, Result};

const SECOND_SIDE: u32 = 1 << 31;

/// Generator tag carried by a half-edge: `g{index}` or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tag {
    /// 1-based generator index.
    pub generator: u16,
    pub inverse: bool,
}

impl Tag {
    pub fn new(generator: u16) -> Self {
        Tag {
            generator,
            inverse: false,
        }
    }

    pub fn inverted(self) -> Self {
        Tag {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "g{}inv", self.generator)
        } else {
            write!(f, "g{}", self.generator)
        }
    }
}

impl std::str::FromStr for Tag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let body = s
            .strip_prefix('g')
            .ok_or_else(|| Error::invalid(format!("bad tag `{s}`")))?;
        let (digits, inverse) = match body.strip_suffix("inv") {
            Some(d) => (d, true),
            None => (body, false),
        };
        let generator: u16 = digits
            .parse()
            .map_err(|_| Error::invalid(format!("bad tag `{s}`")))?;
        if generator == 0 {
            return Err(Error::invalid("generator indices start at 1"));
        }
        Ok(Tag { generator, inverse })
    }
}

/// An immutable multigraph. Self-loops and parallel edges are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<[u32; 2]>,
    /// Tag of the half-edge at `edges[e][0]`; the other side carries the inverse.
    tags: Option<Vec<Tag>>,
    offsets: Vec<usize>,
    target: Vec<u32>,
    partner: Vec<u32>,
    /// Edge index per slot; the high bit marks the second endpoint's side.
    slot_edge: Vec<u32>,
    regular: Option<usize>,
}

impl Graph {
    pub fn from_edges(n: usize, edges: Vec<[u32; 2]>) -> Result<Self> {
        Self::build(n, edges, None)
    }

    pub fn from_tagged_edges(n: usize, edges: Vec<[u32; 2]>, tags: Vec<Tag>) -> Result<Self> {
        if tags.len() != edges.len() {
            return Err(Error::invalid("one tag per edge required"));
        }
        Self::build(n, edges, Some(tags))
    }

    fn build(n: usize, edges: Vec<[u32; 2]>, tags: Option<Vec<Tag>>) -> Result<Self> {
        if n > u32::MAX as usize || edges.len() >= SECOND_SIDE as usize {
            return Err(Error::invalid("graph too large"));
        }
        let mut degree = vec![0usize; n];
        for (i, &[u, v]) in edges.iter().enumerate() {
            if u as usize >= n || v as usize >= n {
                return Err(Error::invalid(format!(
                    "edge {i} = ({u}, {v}) out of range for n = {n}"
                )));
            }
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for &k in &degree {
            offsets.push(offsets.last().unwrap() + k);
        }
        let slots = 2 * edges.len();
        let mut fill = offsets[..n].to_vec();
        let mut target = vec![0u32; slots];
        let mut partner = vec![0u32; slots];
        let mut slot_edge = vec![0u32; slots];
        for (e, &[u, v]) in edges.iter().enumerate() {
            let a = fill[u as usize];
            fill[u as usize] += 1;
            let b = fill[v as usize];
            fill[v as usize] += 1;
            target[a] = v;
            target[b] = u;
            partner[a] = b as u32;
            partner[b] = a as u32;
            slot_edge[a] = e as u32;
            slot_edge[b] = e as u32 | SECOND_SIDE;
        }
        let regular = match degree.first() {
            Some(&d) if degree.iter().all(|&k| k == d) => Some(d),
            None => Some(0),
            _ => None,
        };
        Ok(Graph {
            n,
            edges,
            tags,
            offsets,
            target,
            partner,
            slot_edge,
            regular,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[[u32; 2]] {
        &self.edges
    }

    pub fn edge_tags(&self) -> Option<&[Tag]> {
        self.tags.as_deref()
    }

    pub fn is_labelled(&self) -> bool {
        self.tags.is_some()
    }

    /// The common degree, if every vertex has the same number of half-edges.
    pub fn regular_degree(&self) -> Option<usize> {
        self.regular
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Global half-edge slots of `v`, in neighbour order.
    #[inline]
    pub fn slots(&self, v: usize) -> std::ops::Range<usize> {
        self.offsets[v]..self.offsets[v + 1]
    }

    #[inline]
    pub fn slot_target(&self, slot: usize) -> usize {
        self.target[slot] as usize
    }

    #[inline]
    pub fn slot_partner(&self, slot: usize) -> usize {
        self.partner[slot] as usize
    }

    #[inline]
    pub fn slot_edge(&self, slot: usize) -> usize {
        (self.slot_edge[slot] & !SECOND_SIDE) as usize
    }

    /// Vertex owning a half-edge slot.
    pub fn slot_owner(&self, slot: usize) -> usize {
        self.target[self.partner[slot] as usize] as usize
    }

    pub fn slot_tag(&self, slot: usize) -> Option<Tag> {
        let tags = self.tags.as_ref()?;
        let raw = self.slot_edge[slot];
        let tag = tags[(raw & !SECOND_SIDE) as usize];
        if raw & SECOND_SIDE == 0 {
            Some(tag)
        } else {
            Some(tag.inverted())
        }
    }

    /// Neighbours of `v` in half-edge order, with multiplicity.
    #[inline]
    pub fn neighbours(&self, v: usize) -> &[u32] {
        &self.target[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn self_loop_count(&self) -> usize {
        self.edges.iter().filter(|[u, v]| u == v).count()
    }

    /// Number of edges that duplicate an earlier edge between the same pair.
    pub fn parallel_excess(&self) -> usize {
        let mut pairs: Vec<(u32, u32)> = self
            .edges
            .iter()
            .map(|&[u, v]| (u.min(v), u.max(v)))
            .collect();
        pairs.sort_unstable();
        pairs.windows(2).filter(|w| w[0] == w[1]).count()
    }

    pub fn is_simple(&self) -> bool {
        self.self_loop_count() == 0 && self.parallel_excess() == 0
    }

    /// Number of half-edges from `v` landing in `set` (loops count twice).
    pub fn degree_into(&self, v: usize, set: &VertexSet) -> usize {
        self.neighbours(v)
            .iter()
            .filter(|&&w| set.contains(w as usize))
            .count()
    }

    /// Edges with both endpoints in `set`.
    pub fn internal_edges(&self, set: &VertexSet) -> usize {
        self.edges
            .iter()
            .filter(|&&[u, v]| set.contains(u as usize) && set.contains(v as usize))
            .count()
    }
}

/// A subset of `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexSet {
    member: Vec<bool>,
    size: usize,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        VertexSet {
            member: vec![false; n],
            size: 0,
        }
    }

    pub fn full(n: usize) -> Self {
        VertexSet {
            member: vec![true; n],
            size: n,
        }
    }

    pub fn from_indicator(member: Vec<bool>) -> Self {
        let size = member.iter().filter(|&&b| b).count();
        VertexSet { member, size }
    }

    pub fn from_vertices(n: usize, vertices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(n);
        for v in vertices {
            s.insert(v);
        }
        s
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        self.member[v]
    }

    pub fn insert(&mut self, v: usize) -> bool {
        let fresh = !self.member[v];
        if fresh {
            self.member[v] = true;
            self.size += 1;
        }
        fresh
    }

    pub fn remove(&mut self, v: usize) -> bool {
        let present = self.member[v];
        if present {
            self.member[v] = false;
            self.size -= 1;
        }
        present
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn universe(&self) -> usize {
        self.member.len()
    }

    pub fn indicator(&self) -> &[bool] {
        &self.member
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.member
            .iter()
            .enumerate()
            .filter_map(|(v, &b)| b.then_some(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_edge_pairing_is_an_involution() {
        let g = Graph::from_edges(3, vec![[0, 1], [1, 2], [2, 2], [0, 1]]).unwrap();
        for s in 0..2 * g.edge_count() {
            assert_eq!(g.slot_partner(g.slot_partner(s)), s);
            assert_eq!(g.slot_target(g.slot_partner(s)), g.slot_owner(s));
        }
        assert_eq!(g.degree(2), 3);
        assert_eq!(g.neighbours(2), &[1, 2, 2]);
        assert_eq!(g.self_loop_count(), 1);
        assert_eq!(g.parallel_excess(), 1);
        assert_eq!(g.regular_degree(), None);
    }

    #[test]
    fn tags_are_inverse_across_an_edge() {
        let g = Graph::from_tagged_edges(2, vec![[0, 1], [1, 1]], vec![Tag::new(1), Tag::new(2)])
            .unwrap();
        let s0 = g.slots(0).start;
        assert_eq!(g.slot_tag(s0), Some(Tag::new(1)));
        assert_eq!(g.slot_tag(g.slot_partner(s0)), Some(Tag::new(1).inverted()));
        let loops: Vec<_> = g.slots(1).skip(1).map(|s| g.slot_tag(s).unwrap()).collect();
        assert_eq!(loops, vec![Tag::new(2), Tag::new(2).inverted()]);
    }

    #[test]
    fn tag_text() {
        for s in ["g1", "g2inv", "g12"] {
            assert_eq!(s.parse::<Tag>().unwrap().to_string(), s);
        }
        assert!("h1".parse::<Tag>().is_err());
        assert!("g0".parse::<Tag>().is_err());
    }

    #[test]
    fn out_of_range_edge_rejected() {
        assert!(Graph::from_edges(2, vec![[0, 2]]).is_err());
    }

    #[test]
    fn vertex_set_size_tracks_membership() {
        let mut s = VertexSet::empty(5);
        assert!(s.insert(3));
        assert!(!s.insert(3));
        s.insert(1);
        assert_eq!(s.len(), 2);
        assert!(s.remove(3));
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![1]);
    }
}
