use std::io::{BufRead, Write};

use crate::error::{Error, Result};

const SUM_TOLERANCE: f64 = 1e-12;

/// Binary entropy in bits, `h(0) = h(1) = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::invalid(format!("{x} is not a probability")));
    }
    Ok(h2(x))
}

/// Unchecked binary entropy for hot loops; accurate for tiny `x` and `1 - x`.
#[inline]
pub(crate) fn h2(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    let ln2 = std::f64::consts::LN_2;
    (-x * x.ln() - (1.0 - x) * (-x).ln_1p()) / ln2
}

/// `-sum p log2 p` over positive entries.
pub(crate) fn plug_in_bits(probs: impl IntoIterator<Item = f64>) -> f64 {
    probs
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

/// Entropy in bits of a tally.
pub(crate) fn count_entropy(counts: impl IntoIterator<Item = u64> + Clone) -> f64 {
    let total: u64 = counts.clone().into_iter().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    counts
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

fn validate(probs: &[f64]) -> Result<()> {
    if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::InvalidDistribution(format!("entry {p}")));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::InvalidDistribution(format!(
            "probabilities sum to {sum}"
        )));
    }
    Ok(())
}

/// A finite distribution over named symbols.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    support: Vec<String>,
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(support: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        if support.len() != probs.len() {
            return Err(Error::InvalidDistribution(
                "support and probabilities differ in length".into(),
            ));
        }
        let mut names = support.clone();
        names.sort();
        names.dedup();
        if names.len() != support.len() {
            return Err(Error::InvalidDistribution("repeated symbol".into()));
        }
        validate(&probs)?;
        Ok(Distribution { support, probs })
    }

    /// Symbols `0..k` with the given probabilities.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        Self::new((0..probs.len()).map(|i| i.to_string()).collect(), probs)
    }

    pub fn uniform(k: usize) -> Result<Self> {
        Self::from_probs(vec![1.0 / k as f64; k])
    }

    pub fn support(&self) -> &[String] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn entropy(&self) -> f64 {
        plug_in_bits(self.probs.iter().copied())
    }

    /// Reads `symbol,probability` lines; an optional header line is skipped.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut support = Vec::new();
        let mut probs = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::parse(i + 1, e.to_string()))?;
            let line = line.trim();
            if line.is_empty() || (i == 0 && line == "symbol,probability") {
                continue;
            }
            let (s, p) = line
                .rsplit_once(',')
                .ok_or_else(|| Error::parse(i + 1, "expected `symbol,probability`"))?;
            let p: f64 = p
                .trim()
                .parse()
                .map_err(|_| Error::parse(i + 1, format!("bad probability `{p}`")))?;
            support.push(s.trim().to_string());
            probs.push(p);
        }
        Self::new(support, probs)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "symbol,probability")?;
        for (s, p) in self.support.iter().zip(&self.probs) {
            writeln!(out, "{s},{p}")?;
        }
        Ok(())
    }
}

pub fn entropy(p: &Distribution) -> f64 {
    p.entropy()
}

/// Which coordinate of a pair is conditioned on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Given {
    First,
    Second,
}

/// A distribution over pairs, stored row-major: `probs[i * cols + j]` is the
/// probability of `(i, j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    rows: usize,
    cols: usize,
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn new(rows: usize, cols: usize, probs: Vec<f64>) -> Result<Self> {
        if rows * cols != probs.len() || rows == 0 || cols == 0 {
            return Err(Error::InvalidDistribution(
                "shape does not match entries".into(),
            ));
        }
        validate(&probs)?;
        Ok(JointDistribution { rows, cols, probs })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn prob(&self, i: usize, j: usize) -> f64 {
        self.probs[i * self.cols + j]
    }

    pub fn entropy(&self) -> f64 {
        plug_in_bits(self.probs.iter().copied())
    }

    pub fn marginal(&self, which: Given) -> Vec<f64> {
        match which {
            Given::First => (0..self.rows)
                .map(|i| (0..self.cols).map(|j| self.prob(i, j)).sum())
                .collect(),
            Given::Second => (0..self.cols)
                .map(|j| (0..self.rows).map(|i| self.prob(i, j)).sum())
                .collect(),
        }
    }
}

/// `H(X | Y) = H(X, Y) - H(Y)`, where `Y` is the coordinate named by `given`.
pub fn conditional_entropy(joint: &JointDistribution, given: Given) -> f64 {
    joint.entropy() - plug_in_bits(joint.marginal(given))
}
