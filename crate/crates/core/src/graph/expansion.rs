use super::{Graph, VertexSet};
use crate::error::{Error, Result};

pub const DEFAULT_ENUMERATION_CAP: usize = 5_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Boundary {
    /// Edges with exactly one endpoint in the set.
    pub edge_boundary: usize,
    /// Distinct vertices outside the set adjacent to it.
    pub exterior_vertex_boundary: usize,
}

pub fn boundary(g: &Graph, w: &VertexSet) -> Boundary {
    let mut edge_boundary = 0;
    for &[u, v] in g.edges() {
        if w.contains(u as usize) != w.contains(v as usize) {
            edge_boundary += 1;
        }
    }
    let mut seen = vec![false; g.n()];
    let mut exterior = 0;
    for v in w.iter() {
        for &x in g.neighbours(v) {
            let x = x as usize;
            if !w.contains(x) && !seen[x] {
                seen[x] = true;
                exterior += 1;
            }
        }
    }
    Boundary {
        edge_boundary,
        exterior_vertex_boundary: exterior,
    }
}

/// Minimum of `|W ∪ ∂W| / |W|` over an enumerated family of sets.
#[derive(Clone, Debug, PartialEq)]
pub struct Expansion {
    pub value: f64,
    pub argmin: Vec<usize>,
    pub sets_visited: usize,
}

/// Minimum of `|W ∪ ∂W| / |W|` over connected `W` with `|W| <= max_size`.
///
/// Restricting to connected sets keeps the enumeration polynomial for fixed
/// `max_size`; on trees the infimum is approached by paths, which are
/// connected.
pub fn vertex_expansion_exhaustive(g: &Graph, max_size: usize, cap: usize) -> Result<Expansion> {
    vertex_expansion_within(g, &VertexSet::full(g.n()), max_size, cap)
}

/// As [`vertex_expansion_exhaustive`], with `W` restricted to `candidates`.
/// Boundaries are still measured in all of `g`.
pub fn vertex_expansion_within(
    g: &Graph,
    candidates: &VertexSet,
    max_size: usize,
    cap: usize,
) -> Result<Expansion> {
    if max_size == 0 {
        return Err(Error::invalid("max_size must be positive"));
    }
    let mut e = Enumerator {
        g,
        candidates,
        max_size,
        cap,
        cover: vec![0; g.n()],
        covered: 0,
        members: Vec::new(),
        best: Expansion {
            value: f64::INFINITY,
            argmin: Vec::new(),
            sets_visited: 0,
        },
        exceeded: false,
    };
    for root in candidates.iter() {
        e.push(root);
        let ext: Vec<usize> = distinct_neighbours(g, root)
            .into_iter()
            .filter(|&u| u > root && candidates.contains(u))
            .collect();
        e.extend(root, ext);
        e.pop(root);
        if e.exceeded {
            break;
        }
    }
    finish(e.best, e.exceeded, cap)
}

/// Minimum over all (not necessarily connected) subsets of size at most
/// `max_size`. Exponential; meant for small graphs.
pub fn vertex_expansion_unrestricted(g: &Graph, max_size: usize, cap: usize) -> Result<Expansion> {
    if max_size == 0 {
        return Err(Error::invalid("max_size must be positive"));
    }
    let n = g.n();
    let mut best = Expansion {
        value: f64::INFINITY,
        argmin: Vec::new(),
        sets_visited: 0,
    };
    let mut exceeded = false;
    let mut current: Vec<usize> = Vec::new();
    fn rec(
        g: &Graph,
        start: usize,
        max_size: usize,
        cap: usize,
        current: &mut Vec<usize>,
        best: &mut Expansion,
        exceeded: &mut bool,
    ) {
        for v in start..g.n() {
            if *exceeded {
                return;
            }
            current.push(v);
            best.sets_visited += 1;
            if best.sets_visited > cap {
                *exceeded = true;
                current.pop();
                return;
            }
            let set = VertexSet::from_vertices(g.n(), current.iter().copied());
            let ratio = (current.len() + boundary(g, &set).exterior_vertex_boundary) as f64
                / current.len() as f64;
            if ratio < best.value {
                best.value = ratio;
                best.argmin = current.clone();
            }
            if current.len() < max_size {
                rec(g, v + 1, max_size, cap, current, best, exceeded);
            }
            current.pop();
        }
    }
    if n > 0 {
        rec(g, 0, max_size, cap, &mut current, &mut best, &mut exceeded);
    }
    finish(best, exceeded, cap)
}

fn finish(best: Expansion, exceeded: bool, cap: usize) -> Result<Expansion> {
    if exceeded {
        Err(Error::EnumerationCapExceeded {
            cap,
            partial: Box::new(best),
        })
    } else if best.argmin.is_empty() {
        Err(Error::invalid("no candidate sets"))
    } else {
        Ok(best)
    }
}

fn distinct_neighbours(g: &Graph, v: usize) -> Vec<usize> {
    let mut nb: Vec<usize> = g
        .neighbours(v)
        .iter()
        .map(|&w| w as usize)
        .filter(|&w| w != v)
        .collect();
    nb.sort_unstable();
    nb.dedup();
    nb
}

/// ESU-style enumeration of connected sets; each is visited exactly once,
/// from its smallest vertex. `cover[u]` counts members `w` with `u` in the
/// closed neighbourhood of `w`, so `covered` is `|W ∪ ∂W|`.
struct Enumerator<'a> {
    g: &'a Graph,
    candidates: &'a VertexSet,
    max_size: usize,
    cap: usize,
    cover: Vec<u32>,
    covered: usize,
    members: Vec<usize>,
    best: Expansion,
    exceeded: bool,
}

impl Enumerator<'_> {
    fn push(&mut self, w: usize) {
        self.members.push(w);
        self.bump(w, true);
        for u in distinct_neighbours(self.g, w) {
            self.bump(u, true);
        }
    }

    fn pop(&mut self, w: usize) {
        self.members.pop();
        self.bump(w, false);
        for u in distinct_neighbours(self.g, w) {
            self.bump(u, false);
        }
    }

    fn bump(&mut self, u: usize, up: bool) {
        if up {
            if self.cover[u] == 0 {
                self.covered += 1;
            }
            self.cover[u] += 1;
        } else {
            self.cover[u] -= 1;
            if self.cover[u] == 0 {
                self.covered -= 1;
            }
        }
    }

    fn extend(&mut self, root: usize, mut ext: Vec<usize>) {
        self.best.sets_visited += 1;
        if self.best.sets_visited > self.cap {
            self.exceeded = true;
            return;
        }
        let ratio = self.covered as f64 / self.members.len() as f64;
        if ratio < self.best.value {
            self.best.value = ratio;
            self.best.argmin = self.members.clone();
        }
        if self.members.len() == self.max_size {
            return;
        }
        while let Some(w) = ext.pop() {
            let mut next = ext.clone();
            for u in distinct_neighbours(self.g, w) {
                if u > root && self.candidates.contains(u) && self.cover[u] == 0 {
                    next.push(u);
                }
            }
            self.push(w);
            self.extend(root, next);
            self.pop(w);
            if self.exceeded {
                return;
            }
        }
    }
}

/// Exact edge Cheeger constant `min_{0 < |A| <= n/2} e(A, A^c) / |A|` by
/// enumerating all subsets. Returns the value and a minimising set.
pub fn edge_cheeger_exhaustive(g: &Graph) -> Result<(f64, Vec<usize>)> {
    let n = g.n();
    if !(2..=24).contains(&n) {
        return Err(Error::invalid(
            "exhaustive cut enumeration needs 2 <= n <= 24",
        ));
    }
    let mut best = (f64::INFINITY, Vec::new());
    for mask in 1u32..(1u32 << n) {
        let size = mask.count_ones() as usize;
        if 2 * size > n {
            continue;
        }
        let cut = g
            .edges()
            .iter()
            .filter(|&&[u, v]| ((mask >> u) & 1) != ((mask >> v) & 1))
            .count();
        let ratio = cut as f64 / size as f64;
        if ratio < best.0 {
            best = (ratio, (0..n).filter(|&v| (mask >> v) & 1 == 1).collect());
        }
    }
    Ok(best)
}
