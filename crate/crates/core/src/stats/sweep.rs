use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fiid::{Configuration, Symbol};
use crate::graph::{largest_component_size, Graph};
use crate::rng::{stream, unit, Domain};

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOptions {
    /// Giant fraction that counts as percolating.
    pub threshold: f64,
    /// The largest cluster of the symbol must have at least this many vertices.
    pub min_cluster: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            threshold: 0.05,
            min_cluster: 1000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PcSweepResult {
    pub p_grid: Vec<f64>,
    /// `giant_fraction[i][r]`: replica `r` at `p_grid[i]`.
    pub giant_fraction: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Size of the largest cluster before thinning.
    pub reference_size: usize,
    pub threshold: f64,
    /// Interpolated crossing of the mean curve; `None` unless the grid
    /// brackets it.
    pub p_c_estimate: Option<f64>,
    /// Standard error of the per-replica crossings; needs two replicas.
    pub p_c_stderr: Option<f64>,
    /// Whether the mean curve is non-decreasing. Replicas reuse one uniform
    /// per vertex across the grid, so each replica curve is monotone by
    /// construction and this can only fail through a bug.
    pub monotone: bool,
}

/// First crossing of `threshold`, linearly interpolated between grid points.
/// A curve that starts above the threshold crosses somewhere below the grid,
/// which is not an estimate, so that case is `None` too.
fn crossing(p: &[f64], y: &[f64], threshold: f64) -> Option<f64> {
    let i = y.iter().position(|&v| v > threshold)?;
    if i == 0 {
        return None;
    }
    let (x0, x1, y0, y1) = (p[i - 1], p[i], y[i - 1], y[i]);
    Some(x0 + (threshold - y0) / (y1 - y0) * (x1 - x0))
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    if xs.len() < 2 {
        return (m, 0.0);
    }
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64;
    (m, (var / xs.len() as f64).sqrt())
}

/// Bernoulli site thinning inside the clusters of `symbol`.
///
/// Replica `r` draws one uniform `U_v` per vertex from the retention stream
/// `r` of `seed` and keeps the vertices with `U_v < p`, so all grid points
/// of a replica are coupled. The giant fraction is the largest retained
/// component divided by the largest original cluster.
pub fn pc_sweep(
    g: &Graph,
    c: &Configuration,
    symbol: Symbol,
    p_grid: &[f64],
    replicas: usize,
    seed: u64,
    options: &SweepOptions,
) -> Result<PcSweepResult> {
    if p_grid.is_empty() || p_grid.iter().any(|&p| !(p > 0.0 && p <= 1.0)) {
        return Err(Error::invalid("retention probabilities must lie in (0, 1]"));
    }
    if p_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("retention grid must be strictly increasing"));
    }
    if replicas == 0 {
        return Err(Error::invalid("at least one replica is needed"));
    }
    let support = c.indicator(symbol);
    let reference_size = largest_component_size(g, &support);
    if reference_size < options.min_cluster.max(1) {
        return Err(Error::InsufficientCluster {
            largest: reference_size,
            required: options.min_cluster.max(1),
        });
    }
    let n = g.n();
    // per[r][i]
    let per: Vec<Vec<f64>> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream(seed, Domain::Retention, r as u64);
            let u: Vec<f64> = (0..n).map(|_| unit(rng.next_u64())).collect();
            p_grid
                .par_iter()
                .map(|&p| {
                    let open: Vec<bool> =
                        support.iter().zip(&u).map(|(&s, &x)| s && x < p).collect();
                    largest_component_size(g, &open) as f64 / reference_size as f64
                })
                .collect()
        })
        .collect();
    let giant_fraction: Vec<Vec<f64>> = (0..p_grid.len())
        .map(|i| per.iter().map(|row| row[i]).collect())
        .collect();
    let (mean, stderr): (Vec<f64>, Vec<f64>) =
        giant_fraction.iter().map(|xs| mean_and_stderr(xs)).unzip();
    let monotone = mean.windows(2).all(|w| w[0] <= w[1]);
    let p_c_estimate = crossing(p_grid, &mean, options.threshold);
    let per_replica: Option<Vec<f64>> = per
        .iter()
        .map(|row| crossing(p_grid, row, options.threshold))
        .collect();
    let p_c_stderr = per_replica
        .filter(|xs| xs.len() > 1)
        .map(|xs| mean_and_stderr(&xs).1);
    Ok(PcSweepResult {
        p_grid: p_grid.to_vec(),
        giant_fraction,
        mean,
        stderr,
        reference_size,
        threshold: options.threshold,
        p_c_estimate,
        p_c_stderr,
        monotone,
    })
}
