use std::collections::BTreeMap;

use rand_distr::{Binomial, Distribution as _};
use rayon::prelude::*;
use serde::Serialize;

use super::dist::{count_entropy, h2};
use crate::error::{Error, Result};
use crate::fiid::{Configuration, Symbol};
use crate::graph::{vertex_expansion_exhaustive, vertex_expansion_unrestricted, Expansion, Graph};
use crate::rng::{stream, Domain};

/// Tally of `(root, neighbour_1, ..., neighbour_d)` symbol tuples, neighbours
/// in half-edge order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StarSample {
    pub d: usize,
    pub counts: BTreeMap<Vec<Symbol>, u64>,
    pub total: u64,
}

impl StarSample {
    pub fn new(d: usize) -> Self {
        StarSample {
            d,
            counts: BTreeMap::new(),
            total: 0,
        }
    }

    pub fn record(&mut self, tuple: Vec<Symbol>) {
        debug_assert_eq!(tuple.len(), self.d + 1);
        *self.counts.entry(tuple).or_insert(0) += 1;
        self.total += 1;
    }

    pub fn merge(mut self, other: StarSample) -> StarSample {
        assert_eq!(self.d, other.d, "merging stars of different degree");
        for (k, c) in other.counts {
            *self.counts.entry(k).or_insert(0) += c;
        }
        self.total += other.total;
        self
    }

    /// Stars of all degree-`d` vertices `v` with `keep(v)`.
    pub fn from_configuration(
        g: &Graph,
        config: &Configuration,
        d: usize,
        keep: impl Fn(usize) -> bool + Sync,
    ) -> StarSample {
        let symbols = &config.symbols;
        (0..g.n())
            .into_par_iter()
            .filter(|&v| g.degree(v) == d && keep(v))
            .fold(
                || StarSample::new(d),
                |mut s, v| {
                    let mut t = Vec::with_capacity(d + 1);
                    t.push(symbols[v]);
                    t.extend(g.neighbours(v).iter().map(|&u| symbols[u as usize]));
                    s.record(t);
                    s
                },
            )
            .reduce(|| StarSample::new(d), StarSample::merge)
    }

    fn root_counts(&self) -> BTreeMap<Symbol, u64> {
        let mut m = BTreeMap::new();
        for (k, &c) in &self.counts {
            *m.entry(k[0]).or_insert(0) += c;
        }
        m
    }

    /// Plug-in entropy of the ordered star tuple.
    pub fn star_entropy(&self) -> f64 {
        count_entropy(self.counts.values().copied())
    }

    pub fn root_entropy(&self) -> f64 {
        count_entropy(self.root_counts().values().copied())
    }

    /// Plug-in entropy of the root together with the multiset of neighbour
    /// symbols.
    pub fn unordered_entropy(&self) -> f64 {
        let mut m: BTreeMap<Vec<Symbol>, u64> = BTreeMap::new();
        for (k, &c) in &self.counts {
            let mut key = k.clone();
            key[1..].sort_unstable();
            *m.entry(key).or_insert(0) += c;
        }
        count_entropy(m.values().copied())
    }

    /// Multinomial resample with the same total.
    fn resample(&self, rng: &mut impl rand::Rng) -> StarSample {
        let mut out = StarSample::new(self.d);
        let mut remaining = self.total;
        let mut mass_left = self.total;
        for (k, &c) in &self.counts {
            if remaining == 0 {
                break;
            }
            let x = if c >= mass_left {
                remaining
            } else {
                let p = c as f64 / mass_left as f64;
                Binomial::new(remaining, p)
                    .expect("p in [0, 1]")
                    .sample(rng)
            };
            mass_left -= c;
            if x > 0 {
                out.counts.insert(k.clone(), x);
                remaining -= x;
            }
        }
        out.total = self.total;
        out
    }
}

fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Bootstrap standard errors of several statistics of one sample.
fn bootstrap<const K: usize>(
    s: &StarSample,
    reps: usize,
    seed: u64,
    stat: impl Fn(&StarSample) -> [f64; K] + Sync,
) -> [f64; K] {
    let draws: Vec<[f64; K]> = (0..reps)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, Domain::Bootstrap, i as u64);
            stat(&s.resample(&mut rng))
        })
        .collect();
    std::array::from_fn(|j| std_dev(&draws.iter().map(|d| d[j]).collect::<Vec<_>>()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StarEntropyReport {
    pub total: u64,
    pub h_star: f64,
    pub h_root: f64,
    /// `H(X_S) - H(X_o)`, the entropy of the neighbours given the root.
    pub h_leaves_given_root: f64,
    /// `H(X_S) / H(X_o)`; infinite when the root is deterministic but the
    /// star is not, NaN when both are.
    pub ratio: f64,
    pub threshold_factor: f64,
    /// `H(X_S) - threshold_factor * H(X_o)`.
    pub margin: f64,
    pub h_star_unordered: f64,
    pub se_h_star: f64,
    pub se_h_root: f64,
    pub se_margin: f64,
    pub bootstrap_reps: usize,
}

/// Compares the star entropy with `threshold_factor` times the root entropy.
pub fn star_entropy_check(
    s: &StarSample,
    threshold_factor: f64,
    bootstrap_reps: usize,
    seed: u64,
) -> Result<StarEntropyReport> {
    if s.total == 0 {
        return Err(Error::EmptySample);
    }
    let h_star = s.star_entropy();
    let h_root = s.root_entropy();
    let [se_h_star, se_h_root, se_margin] = bootstrap(s, bootstrap_reps, seed, |b| {
        let (hs, hr) = (b.star_entropy(), b.root_entropy());
        [hs, hr, hs - threshold_factor * hr]
    });
    Ok(StarEntropyReport {
        total: s.total,
        h_star,
        h_root,
        h_leaves_given_root: h_star - h_root,
        ratio: h_star / h_root,
        threshold_factor,
        margin: h_star - threshold_factor * h_root,
        h_star_unordered: s.unordered_entropy(),
        se_h_star,
        se_h_root,
        se_margin,
        bootstrap_reps,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeafEntropyCheck {
    /// Stars whose root is closed.
    pub roots: u64,
    /// Mean open fraction among neighbours of closed roots.
    pub kappa_hat: f64,
    /// Plug-in `H(X_{S \ o} | X_o = closed)`.
    pub conditional_entropy: f64,
    /// `d h(kappa_hat)`.
    pub bound: f64,
    pub se_difference: f64,
}

/// Neighbour entropy around closed roots against `d h(kappa_hat)`, for a
/// binary alphabet with `open` the open symbol.
pub fn leaf_entropy_check(
    s: &StarSample,
    open: Symbol,
    bootstrap_reps: usize,
    seed: u64,
) -> Result<LeafEntropyCheck> {
    if s.counts.keys().flatten().any(|&x| x > 1) {
        return Err(Error::invalid("leaf entropy check needs a binary alphabet"));
    }
    let closed = 1 - open;
    let stat = |b: &StarSample| -> (u64, f64, f64, f64) {
        let mut roots = 0;
        let mut open_leaves = 0u64;
        let mut tally = Vec::new();
        for (k, &c) in b
            .counts
            .range(vec![closed]..)
            .take_while(|(k, _)| k[0] == closed)
        {
            roots += c;
            open_leaves += c * k[1..].iter().filter(|&&x| x == open).count() as u64;
            tally.push(c);
        }
        let kappa = open_leaves as f64 / (roots.max(1) * b.d as u64) as f64;
        let h = count_entropy(tally.iter().copied());
        (roots, kappa, h, b.d as f64 * h2(kappa))
    };
    let (roots, kappa_hat, conditional_entropy, bound) = stat(s);
    if roots == 0 {
        return Err(Error::EmptySample);
    }
    let [se_difference] = bootstrap(s, bootstrap_reps, seed, |b| {
        let (_, _, h, bd) = stat(b);
        [bd - h]
    });
    Ok(LeafEntropyCheck {
        roots,
        kappa_hat,
        conditional_entropy,
        bound,
        se_difference,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BetaEstimate {
    /// Minimum of `|W ∪ ∂W| / |W|` over connected `W` up to the size limit.
    pub connected: Expansion,
    /// The same over all subsets, when requested.
    pub unrestricted: Option<Expansion>,
    /// The value `d - 1` attained on the regular tree.
    pub tree_value: Option<f64>,
}

/// Star-family weight: with unit weight on every star, the number of stars
/// meeting `W` is `|W ∪ ∂W|`, so the infimum is the vertex expansion ratio.
pub fn beta_weight(
    g: &Graph,
    max_size: usize,
    cap: usize,
    unrestricted: bool,
) -> Result<BetaEstimate> {
    let connected = vertex_expansion_exhaustive(g, max_size, cap)?;
    let unrestricted = if unrestricted {
        Some(vertex_expansion_unrestricted(g, max_size, cap)?)
    } else {
        None
    };
    Ok(BetaEstimate {
        connected,
        unrestricted,
        tree_value: g.regular_degree().map(|d| d as f64 - 1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, petersen_graph};

    fn constant_sample(d: usize, n: u64) -> StarSample {
        let mut s = StarSample::new(d);
        for _ in 0..n {
            s.record(vec![1; d + 1]);
        }
        s
    }

    #[test]
    fn deterministic_sample_has_zero_entropy() {
        let r = star_entropy_check(&constant_sample(4, 50), 3.0, 20, 1).unwrap();
        assert_eq!(r.h_star, 0.0);
        assert_eq!(r.h_root, 0.0);
        assert_eq!(r.margin, 0.0);
        assert_eq!(r.se_h_star, 0.0);
    }

    #[test]
    fn empty_sample_rejected() {
        assert!(matches!(
            star_entropy_check(&StarSample::new(3), 2.0, 10, 0),
            Err(Error::EmptySample)
        ));
    }

    #[test]
    fn merge_is_additive() {
        let a = constant_sample(3, 4);
        let mut b = StarSample::new(3);
        b.record(vec![0, 1, 0, 1]);
        let m = a.clone().merge(b);
        assert_eq!(m.total, 5);
        assert_eq!(m.counts.values().sum::<u64>(), m.total);
    }

    #[test]
    fn unordered_never_exceeds_ordered() {
        let mut s = StarSample::new(3);
        for t in [[0, 0, 1, 1], [0, 1, 1, 0], [1, 0, 0, 0], [0, 1, 0, 1]] {
            s.record(t.to_vec());
        }
        assert!(s.unordered_entropy() < s.star_entropy());
    }

    #[test]
    fn resample_preserves_total() {
        let mut s = StarSample::new(2);
        for i in 0..30u8 {
            s.record(vec![i % 2, i % 3 % 2, 0]);
        }
        let mut rng = stream(3, Domain::Bootstrap, 0);
        let r = s.resample(&mut rng);
        assert_eq!(r.total, 30);
        assert_eq!(r.counts.values().sum::<u64>(), 30);
    }

    #[test]
    fn beta_on_small_graphs() {
        let k4 = complete_graph(4);
        let b = beta_weight(&k4, 4, 1000, true).unwrap();
        assert_eq!(b.connected.value, 1.0);
        assert_eq!(b.tree_value, Some(2.0));
        // single vertices of the Petersen graph give 4; larger sets do better
        let b = beta_weight(&petersen_graph(), 1, 1000, false).unwrap();
        assert_eq!(b.connected.value, 4.0);
    }
}
